"""Batch command-line runner.

Subcommands: ball-eigen, fem-eigen, verify, degree, transplant-check, sweep.
All outputs (CSV, JSON, SVG) are deterministic for a fixed config and seed:
floats print at full precision, JSON keys are sorted, timestamps are omitted,
and wall-clock timings appear only with --timings. The default output
directory comes from $SPECSHAPE_OUT, falling back to ./specshape-out.
"""

import argparse
import concurrent.futures
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from . import balleig, corpus, degree, fem, trial
from .geom import EUCLIDEAN, HYPERBOLIC
from .mesh import DomainSpec, build_mesh
from .transplant import WeightedRegion, transplant_check

_GEOMETRY_ALIASES = {"euclid": EUCLIDEAN, "euclidean": EUCLIDEAN,
                     "hyp": HYPERBOLIC, "hyperbolic": HYPERBOLIC}


def _fmt(x):
    return f"{float(x):.17g}"


def default_out_dir():
    return os.environ.get("SPECSHAPE_OUT", "specshape-out")


def _ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path


def canonical_json(doc):
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def config_hash(doc):
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


@dataclass
class ExperimentConfig:
    """Declarative sweep description; round-trips through JSON canonically."""

    name: str = "run"
    seed: int = 7
    mesh_h: float = None
    domains: list = field(default_factory=list)  # DomainSpec dicts
    generate: dict = None  # {"geometry": ..., "count": ...}
    tolerances: dict = field(default_factory=dict)
    out_dir: str = None

    def to_dict(self):
        return {
            "name": self.name,
            "seed": self.seed,
            "mesh_h": self.mesh_h,
            "domains": self.domains,
            "generate": self.generate,
            "tolerances": self.tolerances,
            "out_dir": self.out_dir,
        }

    @classmethod
    def from_dict(cls, doc):
        known = {k: doc[k] for k in
                 ("name", "seed", "mesh_h", "domains", "generate", "tolerances",
                  "out_dir") if k in doc}
        return cls(**known)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def domain_specs(self):
        specs = [DomainSpec.from_dict(d) for d in self.domains]
        if self.generate:
            geometry = _GEOMETRY_ALIASES[self.generate.get("geometry", "euclidean")]
            count = int(self.generate.get("count", 20))
            if geometry == EUCLIDEAN:
                h = self.mesh_h or 0.12
                specs.extend(corpus.euclid_corpus(count, seed=self.seed, h=h))
            else:
                h = self.mesh_h or 0.035
                specs.extend(corpus.hyperbolic_corpus(count, seed=self.seed, h=h))
        if self.mesh_h:
            for spec in specs:
                spec.h = float(self.mesh_h)
        return specs


# ---------------------------------------------------------------------------
# subcommands


def cmd_ball_eigen(args):
    geometry = _GEOMETRY_ALIASES[args.geometry]
    out_dir = _ensure_dir(args.out)
    rows = []
    if geometry == EUCLIDEAN:
        root = balleig.euclid_bessel_root(args.n)
        rows.append(("euclidean", args.n, 1.0, 1, "bessel_root", root))
        rows.append(("euclidean", args.n, 1.0, 1, "eigenvalue", root * root))
        profile = balleig.euclid_profile(args.n)
        balleig.export_profile_csv(profile, os.path.join(out_dir, "profile_euclid.csv"))
    else:
        for ell in args.ell:
            if ell == 0:
                rows.append(("hyperbolic", args.n, args.a, 0, "eigenvalue", 0.0))
            eta, profile = balleig.hyp_eigen(args.n, args.a, ell=max(ell, 0))
            rows.append(("hyperbolic", args.n, args.a, ell, "eigenvalue", eta))
            balleig.export_profile_csv(
                profile, os.path.join(out_dir, f"profile_hyp_ell{ell}.csv")
            )
    path = os.path.join(out_dir, "ball_eigen.csv")
    with open(path, "w") as fh:
        fh.write("geometry,n,a,ell,kind,value\n")
        for geometry_name, n, a, ell, kind, value in rows:
            fh.write(f"{geometry_name},{n},{_fmt(a)},{ell},{kind},{_fmt(value)}\n")
    for row in rows:
        print(" ".join(str(v) for v in row))
    print(f"wrote {path}")
    return 0


def cmd_fem_eigen(args):
    out_dir = _ensure_dir(args.out)
    if args.config:
        spec = DomainSpec.from_json(args.config)
    else:
        spec = _builtin_domain(args.domain, args.mesh_h)
    if args.mesh_h:
        spec.h = args.mesh_h
    mesh = build_mesh(spec)
    result = fem.solve_mesh(mesh, k=args.k)
    doc = result.to_dict()
    doc["domain"] = spec.to_dict()
    path = os.path.join(out_dir, "fem_eigen.json")
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print("eigenvalues:", " ".join(_fmt(v) for v in result.eigenvalues))
    print(f"wrote {path}")
    return 0


def _builtin_domain(name, mesh_h=None):
    from .mesh import DiskPrimitive, PolygonPrimitive

    h = mesh_h or 0.08
    if name == "disk":
        return DomainSpec(EUCLIDEAN, [DiskPrimitive((0.0, 0.0), 1.0)], h, name="disk")
    if name == "square":
        length = float(np.sqrt(2.0 * np.pi))
        poly = PolygonPrimitive(((0, 0), (length, 0), (length, length), (0, length)))
        return DomainSpec(EUCLIDEAN, [poly], h, name="square")
    if name == "two-disks":
        return DomainSpec(
            EUCLIDEAN,
            [DiskPrimitive((-1.35, 0.0), 1.0), DiskPrimitive((1.35, 0.0), 1.0)],
            h,
            name="two-disks",
        )
    raise SystemExit(f"unknown builtin domain {name!r}")


def _certify_one(payload):
    """Worker: certify one domain, write its certificate/plot, return a plain row.

    Only picklable data crosses the process boundary; file outputs are written
    here so parallel runs produce the same artifacts as serial ones.
    """
    index, spec_dict, params, cert_dir, plot_dir = payload
    spec = DomainSpec.from_dict(spec_dict)
    started = time.perf_counter()
    try:
        cert = trial.certify_bound(
            spec,
            n_angle=params.get("n_angle", 64),
            n_t=params.get("n_t", 32),
            fem_tol=params.get("fem_tol", 0.01),
        )
        row = {
            "index": index,
            "name": cert.name,
            "status": "ok",
            "geometry": cert.geometry,
            "mu1": cert.eigenvalues[0],
            "mu2": cert.eigenvalues[1],
            "mu3": cert.eigenvalues[2],
            "reference": cert.reference_eigenvalue,
            "trial_bound": cert.trial_bound,
            "margin": cert.margin,
            "margin_rel": cert.margin_rel,
            "defect": cert.orthogonality_defect,
            "transplant_slack_rel": cert.transplant["slack_rel"],
            "equality_case": cert.equality_case,
            "bound_dominates": cert.bound_dominates,
            "bound_below_reference": cert.bound_below_reference,
            "inequality_ok": cert.eigenvalues[2]
            <= cert.reference_eigenvalue * (1.0 + params.get("ineq_tol", 0.02)),
        }
        if cert_dir is not None:
            with open(os.path.join(cert_dir, f"{cert.name}.json"), "w") as fh:
                json.dump(cert.to_dict(), fh, indent=2, sort_keys=True)
                fh.write("\n")
        if plot_dir is not None:
            from .plots import plot_trial_components

            plot_trial_components(cert, os.path.join(plot_dir, f"{cert.name}.svg"))
        return row, time.perf_counter() - started
    except Exception as exc:  # crash isolation: a domain failure never aborts the sweep
        row = {
            "index": index,
            "name": spec.name or f"domain-{index}",
            "status": f"error: {type(exc).__name__}: {exc}",
            "geometry": spec.geometry,
        }
        return row, time.perf_counter() - started


_RESULT_COLUMNS = [
    "index", "name", "status", "geometry", "mu1", "mu2", "mu3", "reference",
    "trial_bound", "margin", "margin_rel", "defect", "transplant_slack_rel",
    "equality_case", "bound_dominates", "bound_below_reference", "inequality_ok",
]


def _write_results_csv(path, rows):
    with open(path, "w") as fh:
        fh.write(",".join(_RESULT_COLUMNS) + "\n")
        for row in rows:
            cells = []
            for col in _RESULT_COLUMNS:
                val = row.get(col, "")
                if isinstance(val, bool):
                    cells.append(str(val).lower())
                elif isinstance(val, float):
                    cells.append(_fmt(val))
                else:
                    cells.append(str(val))
            fh.write(",".join(cells) + "\n")


def run_experiment(config, out_dir=None, jobs=1, timings=False, plots=True):
    """Certify every domain of an experiment; returns (records, n_failures)."""
    out_dir = _ensure_dir(out_dir or config.out_dir or default_out_dir())
    cert_dir = _ensure_dir(os.path.join(out_dir, "certificates"))
    plot_dir = _ensure_dir(os.path.join(out_dir, "plots")) if plots else None
    specs = config.domain_specs()
    params = dict(config.tolerances)
    payloads = [
        (i, spec.to_dict(), params, cert_dir, plot_dir) for i, spec in enumerate(specs)
    ]

    outputs = [None] * len(payloads)
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = {pool.submit(_certify_one, p): p[0] for p in payloads}
            for fut in concurrent.futures.as_completed(futures):
                row, elapsed = fut.result()
                outputs[row["index"]] = (row, elapsed)
    else:
        for payload in payloads:
            row, elapsed = _certify_one(payload)
            outputs[row["index"]] = (row, elapsed)

    rows = [row for row, _ in outputs]
    failures = sum(1 for row in rows if row["status"] != "ok")
    _write_results_csv(os.path.join(out_dir, "results.csv"), rows)

    record = {
        "version": __version__,
        "config": config.to_dict(),
        "config_hash": config_hash(config.to_dict()),
        "n_domains": len(specs),
        "n_failures": failures,
        "rows": rows,
        "effort": {
            "certificates": len(specs) - failures,
        },
    }
    if timings:
        record["wall_times"] = {row["name"]: elapsed for row, elapsed in outputs}
    with open(os.path.join(out_dir, "run_record.json"), "w") as fh:
        json.dump(record, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
    return rows, failures


def cmd_verify(args):
    config = ExperimentConfig.from_json(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.mesh_h is not None:
        config.mesh_h = args.mesh_h
    rows, failures = run_experiment(
        config, out_dir=args.out, jobs=args.jobs, timings=args.timings,
        plots=not args.no_plots,
    )
    for row in rows:
        status = row["status"]
        if status == "ok":
            print(
                f"{row['name']}: mu3={row['mu3']:.6g} <= ref={row['reference']:.6g} "
                f"margin_rel={row['margin_rel']:.4f} "
                f"{'EQUALITY' if row['equality_case'] else ''}"
            )
        else:
            print(f"{row['name']}: {status}")
    print(f"{len(rows) - failures}/{len(rows)} domains certified")
    return 1 if failures else 0


def cmd_sweep(args):
    config = ExperimentConfig.from_json(args.config) if args.config else ExperimentConfig()
    if not config.generate:
        config.generate = {"geometry": args.geometry, "count": args.count}
    if args.seed is not None:
        config.seed = args.seed
    if args.mesh_h is not None:
        config.mesh_h = args.mesh_h
    rows, failures = run_experiment(
        config, out_dir=args.out, jobs=args.jobs, timings=args.timings,
        plots=not args.no_plots,
    )
    bad = [r for r in rows if r["status"] != "ok" or not r.get("inequality_ok")]
    print(f"{len(rows) - len(bad)}/{len(rows)} domains passed the inequality sweep")
    for row in bad:
        print(f"  FAILED {row['name']}: {row['status']}")
    return 1 if bad else 0


def cmd_degree(args):
    out_dir = _ensure_dir(args.out)
    rng = np.random.default_rng(args.seed if args.seed is not None else 7)
    reports = []
    failures = 0
    if args.map:
        named = {
            "identity": degree.identity_map(args.m),
            "negation": degree.antipodal_map(args.m),
            "constant": degree.constant_map(args.m),
        }
        sphere_map = named[args.map]
        if args.map == "constant":
            defect = degree.check_reflection_symmetry(sphere_map)
            result = (
                degree.winding_number(sphere_map)
                if args.m == 1
                else degree.degree_jacobian(sphere_map)
            )
            reports.append(
                {"map": args.map, "m": args.m, "defect": defect,
                 "degree": result.degree, "method": result.method, "ok": True}
            )
        else:
            rep = degree.verify_symmetric_degree(sphere_map)
            rep["map"] = args.map
            reports.append(rep)
    for i in range(args.random):
        sphere_map = degree.random_symmetric_map(args.m, rng)
        try:
            rep = degree.verify_symmetric_degree(sphere_map)
            rep["map"] = sphere_map.name
            reports.append(rep)
        except Exception as exc:
            failures += 1
            reports.append(
                {"map": sphere_map.name, "m": args.m, "ok": False, "error": str(exc)}
            )
    path = os.path.join(out_dir, "degree_report.json")
    with open(path, "w") as fh:
        json.dump({"m": args.m, "reports": reports, "failures": failures},
                  fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
    degrees = [r.get("degree") for r in reports if r.get("ok")]
    print(f"{len(degrees)} maps verified; degrees: {sorted(set(degrees))}")
    print(f"wrote {path}")
    return 1 if failures else 0


def cmd_transplant_check(args):
    out_dir = _ensure_dir(args.out)
    geometry = _GEOMETRY_ALIASES[args.geometry]
    if geometry == EUCLIDEAN:
        profile = balleig.euclid_profile(2)
        a = 1.0
        weight = "unit"
    else:
        a = args.ball
        _, profile = balleig.hyp_eigen(2, a)
        weight = "hyp_volume"
    comparison = balleig.h_profile(profile)
    ball = WeightedRegion.ball(a, weight=weight)
    if args.inner is not None:
        shell = WeightedRegion.shell(args.inner, args.outer, weight=weight)
        regions = (shell, shell)
        label = f"shell({args.inner}, {args.outer})"
    else:
        regions = (ball, ball)
        label = "ball (equality case)"
    report = transplant_check(regions[0], regions[1], ball, comparison)
    report["label"] = label
    report["geometry"] = geometry
    path = os.path.join(out_dir, "transplant_report.json")
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=float)
        fh.write("\n")
    print(
        f"{label}: lhs={report['lhs']:.6g} rhs={report['rhs']:.6g} "
        f"slack_rel={report['slack_rel']:.3e} inequality_ok={report['inequality_ok']}"
    )
    print(f"wrote {path}")
    return 0 if report["inequality_ok"] else 1


# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="specshape",
        description="Spectral shape bounds: Neumann eigenvalues, fold-map trial "
        "functions, sphere-map degrees.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", default=default_out_dir(), help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--mesh-h", type=float, default=None)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--timings", action="store_true",
                       help="include wall-clock times in run records")

    p = sub.add_parser("ball-eigen", help="radial ball eigenvalues and profiles")
    p.add_argument("--geometry", choices=sorted(_GEOMETRY_ALIASES), default="euclid")
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--a", type=float, default=0.5)
    p.add_argument("--ell", type=int, nargs="+", default=[1])
    p.add_argument("--out", default=default_out_dir())
    p.set_defaults(func=cmd_ball_eigen)

    p = sub.add_parser("fem-eigen", help="Neumann FEM eigenvalues of one domain")
    p.add_argument("--config", help="DomainSpec JSON path")
    p.add_argument("--domain", default="disk", help="builtin: disk, square, two-disks")
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--mesh-h", type=float, default=None)
    p.add_argument("--out", default=default_out_dir())
    p.set_defaults(func=cmd_fem_eigen)

    p = sub.add_parser("verify", help="certify every domain of a config")
    p.add_argument("--config", required=True)
    p.add_argument("--no-plots", action="store_true")
    add_common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="generated-corpus inequality sweep")
    p.add_argument("--config", default=None)
    p.add_argument("--geometry", choices=sorted(_GEOMETRY_ALIASES), default="euclid")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--no-plots", action="store_true")
    add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("degree", help="sphere-map degree verification suite")
    p.add_argument("--m", type=int, choices=(1, 2), required=True)
    p.add_argument("--random", type=int, default=0)
    p.add_argument("--map", choices=("identity", "negation", "constant"))
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", default=default_out_dir())
    p.set_defaults(func=cmd_degree)

    p = sub.add_parser("transplant-check", help="mass-transplantation inequality check")
    p.add_argument("--geometry", choices=sorted(_GEOMETRY_ALIASES), default="euclid")
    p.add_argument("--ball", type=float, default=0.4, help="hyperbolic ball radius")
    p.add_argument("--inner", type=float, default=None, help="shell inner radius")
    p.add_argument("--outer", type=float, default=None, help="shell outer radius")
    p.add_argument("--out", default=default_out_dir())
    p.set_defaults(func=cmd_transplant_check)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        return 1


if __name__ == "__main__":
    sys.exit(main())
