"""Topological degree of maps S^m -> S^m for m in {1, 2}.

Three routes, kept independent so they can cross-check each other:

* winding_number  -- accumulated angle of the image loop (m = 1), with
  adaptive bisection whenever a step exceeds pi/2;
* degree_jacobian -- average of the pullback Jacobian, computed exactly for
  the geodesic interpolant as the sum of signed spherical areas of image
  triangles over a subdivided icosahedron (m = 2);
* degree_preimage -- signed count of Newton-located preimages of a regular
  value (any m), deduplicated by clustering.

On top of these sits the reflection-symmetry suite: maps satisfying
phi(-p) = R_p(phi(p)) must have degree exactly 1 on S^1 and odd degree on
S^2, and maps whose normal component never changes sign are homotopic to
the identity (degree 1) or to the antipodal map (degree (-1)^{m+1}).
"""

import functools
from dataclasses import dataclass

import numpy as np

from .errors import (
    PreconditionError,
    PropertyViolation,
    RetryWithNewValue,
    UnreliableSampling,
)

_NORM_TOL = 1e-10
_INTEGER_RESIDUAL = 0.1


@dataclass
class SphereMap:
    """Continuous self-map of S^m given by a vectorized evaluator."""

    m: int
    evaluator: callable
    lipschitz: float = None
    name: str = ""

    def __post_init__(self):
        if self.m not in (1, 2):
            raise ValueError("only S^1 and S^2 maps are supported")

    def __call__(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        out = np.atleast_2d(self.evaluator(pts))
        norms = np.linalg.norm(out, axis=-1)
        if np.any(np.abs(norms - 1.0) > _NORM_TOL):
            raise PropertyViolation(
                f"map output left the sphere: |phi| deviates by "
                f"{np.abs(norms - 1.0).max():.2e}"
            )
        return out


@dataclass
class DegreeResult:
    degree: int
    method: str
    residual: float
    reliable: bool
    samples: int

    def to_dict(self):
        return {
            "degree": int(self.degree),
            "method": self.method,
            "residual": float(self.residual),
            "reliable": bool(self.reliable),
            "samples": int(self.samples),
        }


def circle_points(thetas):
    return np.stack([np.cos(thetas), np.sin(thetas)], axis=-1)


def reflect_rows(p, v):
    """Row-wise reflection R_p(v) = v - 2 (v . p) p for unit rows p."""
    return v - 2.0 * np.sum(v * p, axis=-1, keepdims=True) * p


def winding_number(sphere_map, samples=256, max_refine=14):
    """Degree of an S^1 map by accumulated angle with adaptive bisection."""
    if sphere_map.m != 1:
        raise ValueError("winding_number requires an S^1 map")
    if sphere_map.lipschitz:
        samples = max(samples, int(4 * sphere_map.lipschitz))
    thetas = np.linspace(0.0, 2.0 * np.pi, samples + 1)
    angles = _image_angles(sphere_map, thetas)
    for _ in range(max_refine):
        steps = _wrap(np.diff(angles))
        bad = np.abs(steps) > 0.5 * np.pi
        if not np.any(bad):
            break
        mids = 0.5 * (thetas[:-1][bad] + thetas[1:][bad])
        thetas = np.sort(np.concatenate([thetas, mids]))
        angles = _image_angles(sphere_map, thetas)
    else:
        raise UnreliableSampling("winding steps stayed above pi/2 after max refinement")
    total = float(np.sum(_wrap(np.diff(angles)))) / (2.0 * np.pi)
    degree = int(np.rint(total))
    residual = abs(total - degree)
    return DegreeResult(degree, "winding", residual, residual < _INTEGER_RESIDUAL,
                        len(thetas))


def _image_angles(sphere_map, thetas):
    img = sphere_map(circle_points(thetas))
    return np.arctan2(img[:, 1], img[:, 0])


def _wrap(steps):
    return (steps + np.pi) % (2.0 * np.pi) - np.pi


@functools.lru_cache(maxsize=None)
def icosphere(level):
    """Recursively subdivided icosahedron; returns (vertices, faces), outward CCW."""
    t = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            [-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
            [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
            [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1],
        ],
        dtype=float,
    )
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = np.array(
        [
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ],
        dtype=np.int64,
    )
    verts_list = [v for v in verts]
    for _ in range(level):
        cache = {}
        new_faces = []

        def midpoint(i, j):
            key = (min(i, j), max(i, j))
            if key not in cache:
                v = verts_list[i] + verts_list[j]
                verts_list.append(v / np.linalg.norm(v))
                cache[key] = len(verts_list) - 1
            return cache[key]

        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]])
        faces = np.array(new_faces, dtype=np.int64)
    verts = np.array(verts_list)
    # enforce outward orientation
    tri = verts[faces]
    det = np.einsum("fi,fi->f", tri[:, 0], np.cross(tri[:, 1], tri[:, 2]))
    flip = det < 0
    faces[flip] = faces[flip][:, [0, 2, 1]]
    return verts, faces


def _signed_spherical_areas(tri):
    """Oriented spherical areas of unit-vector triangles (F, 3, 3)."""
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    num = np.einsum("fi,fi->f", a, np.cross(b, c))
    den = 1.0 + np.einsum("fi,fi->f", a, b) + np.einsum("fi,fi->f", b, c) + np.einsum(
        "fi,fi->f", c, a
    )
    return 2.0 * np.arctan2(num, den)


def degree_jacobian(sphere_map, level=5, max_level=7):
    """Degree of an S^2 map as the normalized integral of its pullback Jacobian.

    The image of each icosphere triangle contributes its signed spherical
    area; the sum over all triangles divided by 4 pi is the exact Jacobian
    integral of the geodesic interpolant and converges to the degree.
    """
    if sphere_map.m != 2:
        raise ValueError("degree_jacobian requires an S^2 map")
    while True:
        verts, faces = icosphere(level)
        img = sphere_map(verts)
        total = float(np.sum(_signed_spherical_areas(img[faces]))) / (4.0 * np.pi)
        degree = int(np.rint(total))
        residual = abs(total - degree)
        if residual < _INTEGER_RESIDUAL:
            return DegreeResult(degree, "jacobian_average", residual, True, len(faces))
        if level >= max_level:
            raise UnreliableSampling(
                f"jacobian average {total} is not near an integer at level {level}"
            )
        level += 1


def _tangent_frame(p):
    """Positively-oriented orthonormal tangent frame at p (rows of S^m)."""
    if p.size == 2:
        return np.array([[-p[1], p[0]]])
    helper = np.array([1.0, 0.0, 0.0])
    if abs(p @ helper) > 0.9:
        helper = np.array([0.0, 1.0, 0.0])
    t1 = np.cross(p, helper)
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(p, t1)
    return np.stack([t1, t2])  # t1 x t2 = p: outward-positive orientation


def _default_regular_value(m, rng=None):
    if rng is not None:
        v = rng.normal(size=m + 1)
        return v / np.linalg.norm(v)
    v = np.array([0.31, -0.52]) if m == 1 else np.array([0.31, -0.52, 0.83])
    return v / np.linalg.norm(v)


def degree_preimage(sphere_map, q=None, seeds=None, rng=None, newton_tol=1e-10,
                    max_retries=4):
    """Degree as the signed count of preimages of a regular value q.

    Newton iterations run in tangent charts from a seed grid; converged
    preimages are clustered and each contributes the sign of its chart
    Jacobian determinant. A value that looks non-regular (tiny Jacobian at
    some preimage) triggers a retry with a fresh value.
    """
    m = sphere_map.m
    rng = rng or np.random.default_rng(2357)
    for attempt in range(max_retries):
        if attempt == 0 and q is not None:
            value = np.asarray(q, dtype=float)
            value = value / np.linalg.norm(value)
        else:
            value = _default_regular_value(m, rng if attempt > 0 else None)
        try:
            return _preimage_once(sphere_map, value, seeds, newton_tol)
        except RetryWithNewValue:
            if attempt == max_retries - 1:
                raise
    raise RetryWithNewValue("no regular value found")


def _normalize_rows(p):
    return p / np.linalg.norm(p, axis=-1, keepdims=True)


def _tangent_frames(p):
    """Positively-oriented tangent frames for rows of p, shape (S, m, m+1)."""
    if p.shape[-1] == 2:
        return np.stack([-p[:, 1], p[:, 0]], axis=1)[:, None, :]
    helper = np.tile(np.array([1.0, 0.0, 0.0]), (len(p), 1))
    swap = np.abs(p[:, 0]) > 0.9
    helper[swap] = np.array([0.0, 1.0, 0.0])
    t1 = _normalize_rows(np.cross(p, helper))
    t2 = np.cross(p, t1)
    return np.stack([t1, t2], axis=1)


def _chart_jacobians(sphere_map, p, frame_q, fd=1e-7):
    """Batched chart Jacobians frame_q . Dphi . frame_p, shape (S, m, m)."""
    m = sphere_map.m
    frames = _tangent_frames(p)
    jac = np.empty((len(p), m, m))
    for k in range(m):
        dp = fd * frames[:, k]
        plus = sphere_map(_normalize_rows(p + dp))
        minus = sphere_map(_normalize_rows(p - dp))
        jac[:, :, k] = (plus - minus) @ frame_q.T / (2.0 * fd)
    return jac, frames


def _preimage_once(sphere_map, q, seeds, newton_tol):
    m = sphere_map.m
    if seeds is None:
        if m == 1:
            seeds = circle_points(np.linspace(0, 2 * np.pi, 64, endpoint=False))
        else:
            seeds = icosphere(2)[0]
    frame_q = _tangent_frame(q)

    p = _normalize_rows(np.asarray(seeds, dtype=float))
    active = np.ones(len(p), dtype=bool)
    for _ in range(40):
        img = sphere_map(p)
        dist = np.linalg.norm(img - q, axis=1)
        active &= dist >= newton_tol
        if not np.any(active):
            break
        res = (img[active] - q) @ frame_q.T
        jac, frames = _chart_jacobians(sphere_map, p[active], frame_q)
        dets = np.linalg.det(jac)
        solvable = np.abs(dets) > 1e-14
        steps = np.zeros_like(res)
        if np.any(solvable):
            steps[solvable] = np.linalg.solve(jac[solvable], -res[solvable][..., None])[
                ..., 0
            ]
        # stop hopeless seeds, cap step length for the rest
        drop = ~solvable
        lengths = np.linalg.norm(steps, axis=1)
        big = lengths > 0.8
        steps[big] *= (0.8 / lengths[big])[:, None]
        moved = _normalize_rows(
            p[active] + np.einsum("skd,sk->sd", frames, steps)
        )
        idx = np.nonzero(active)[0]
        p[idx] = moved
        active[idx[drop]] = False

    img = sphere_map(p)
    dist = np.linalg.norm(img - q, axis=1)
    found = p[dist < newton_tol]

    unique = []
    for pt in found:
        if not any(np.linalg.norm(pt - u) < 1e-5 for u in unique):
            unique.append(pt)
    if not unique:
        return DegreeResult(0, "preimage_count", 0.0, True, len(seeds))

    unique = np.array(unique)
    jac, _ = _chart_jacobians(sphere_map, unique, frame_q)
    dets = np.linalg.det(jac)
    if np.abs(dets).min() < 1e-6 * max(np.abs(dets).max(), 1.0):
        raise RetryWithNewValue(
            f"value near the critical set (|det| = {np.abs(dets).min():.2e})"
        )
    degree = int(np.sum(np.sign(dets)))
    return DegreeResult(degree, "preimage_count", 0.0, True, len(seeds))


def check_reflection_symmetry(sphere_map, samples=400):
    """Max sampled defect of phi(-p) = R_p(phi(p))."""
    if sphere_map.m == 1:
        pts = circle_points(np.linspace(0, 2 * np.pi, samples, endpoint=False))
    else:
        pts = icosphere(3)[0]
    img = sphere_map(pts)
    img_anti = sphere_map(-pts)
    defect = np.linalg.norm(img_anti - reflect_rows(pts, img), axis=1)
    return float(defect.max())


def verify_symmetric_degree(sphere_map, defect_tol=1e-6):
    """Degree certificate for a reflection-symmetric map.

    Symmetric maps must have degree exactly 1 when m = 1 and odd degree when
    m = 2; violations flag a numerics bug and raise PropertyViolation.
    """
    defect = check_reflection_symmetry(sphere_map)
    if defect > defect_tol:
        raise PreconditionError(
            f"reflection-symmetry defect {defect:.2e} exceeds {defect_tol:.0e}"
        )
    if sphere_map.m == 1:
        result = winding_number(sphere_map)
        expected_ok = result.degree == 1
        requirement = "degree == 1"
    else:
        result = degree_jacobian(sphere_map)
        expected_ok = result.degree % 2 != 0
        requirement = "odd degree"
    if not expected_ok:
        raise PropertyViolation(
            f"symmetric map {sphere_map.name!r} got degree {result.degree}; "
            f"required {requirement}"
        )
    return {
        "name": sphere_map.name,
        "m": sphere_map.m,
        "defect": defect,
        "degree": result.degree,
        "method": result.method,
        "residual": result.residual,
        "ok": True,
    }


def homotopy_degree(sphere_map, samples=600):
    """Degree of a map whose normal component phi(p) . p never changes sign.

    Such maps are homotopic to the identity (if the sign is >= 0, degree 1)
    or to the antipodal map (if <= 0, degree (-1)^{m+1}). Computes the degree
    and checks it against the forced value.
    """
    m = sphere_map.m
    if m == 1:
        pts = circle_points(np.linspace(0, 2 * np.pi, samples, endpoint=False))
    else:
        pts = icosphere(4)[0]
    normal = np.sum(sphere_map(pts) * pts, axis=1)
    if np.all(normal >= -1e-12):
        expected = 1
    elif np.all(normal <= 1e-12):
        expected = (-1) ** (m + 1)
    else:
        raise PreconditionError(
            f"normal component changes sign: [{normal.min():.3f}, {normal.max():.3f}]"
        )
    result = winding_number(sphere_map) if m == 1 else degree_jacobian(sphere_map)
    if result.degree != expected:
        raise PropertyViolation(
            f"sign-definite map has degree {result.degree}, lemma forces {expected}"
        )
    return result


# ---------------------------------------------------------------------------
# random reflection-symmetric maps


def _smoothstep(z, z0=0.15, z1=0.5):
    t = np.clip((z - z0) / (z1 - z0), 0.0, 1.0)
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0)


def random_symmetric_map(m, rng, max_draws=60):
    """Random smooth map satisfying the reflection symmetry by construction.

    Free data: a symmetric base map (identity or antipodal) plus a random
    quadratic vector field, blended in away from the equator so the equator
    constraint is inherited from the base map; the lower hemisphere is the
    reflected copy of the upper one.
    """
    dim = m + 1
    for _ in range(max_draws):
        base_sign = 1.0 if rng.random() < 0.5 else -1.0  # identity / antipodal
        amp = rng.uniform(0.3, 2.5)
        const = amp * rng.normal(size=dim)
        lin = amp * rng.normal(size=(dim, dim))
        quad = amp * rng.normal(size=(dim, dim, dim))

        def perturbation(pts):
            out = const[None, :] + pts @ lin.T
            out += np.einsum("ijk,nj,nk->ni", quad, pts, pts)
            return out

        def upper_map(pts):
            raw = base_sign * pts + _smoothstep(pts[:, -1])[:, None] * perturbation(pts)
            return raw / np.linalg.norm(raw, axis=1, keepdims=True)

        # reject draws whose unnormalized field gets close to zero
        if m == 1:
            theta = np.linspace(0, np.pi, 721)
            probe = circle_points(theta)
        else:
            verts = icosphere(4)[0]
            probe = verts[verts[:, -1] >= 0]
        raw = base_sign * probe + _smoothstep(probe[:, -1])[:, None] * perturbation(probe)
        if np.linalg.norm(raw, axis=1).min() < 0.1:
            continue

        def evaluator(pts, _upper=upper_map):
            pts = np.atleast_2d(pts)
            out = np.empty_like(pts)
            upper = pts[:, -1] >= 0.0
            if np.any(upper):
                out[upper] = _upper(pts[upper])
            if np.any(~upper):
                low = pts[~upper]
                out[~upper] = reflect_rows(low, _upper(-low))
            return out

        label = "identity" if base_sign > 0 else "antipodal"
        return SphereMap(m, evaluator, name=f"random-symmetric({label}, amp={amp:.2f})")
    raise RetryWithNewValue("could not draw a nonvanishing symmetric field")


def identity_map(m):
    return SphereMap(m, lambda pts: np.array(pts, copy=True), name="identity")

def antipodal_map(m):
    return SphereMap(m, lambda pts: -np.asarray(pts), name="antipodal")

def constant_map(m, value=None):
    dim = m + 1
    if value is None:
        value = np.zeros(dim)
        value[0] = 1.0
    value = np.asarray(value, dtype=float)
    value = value / np.linalg.norm(value)
    return SphereMap(
        m, lambda pts: np.tile(value, (np.atleast_2d(pts).shape[0], 1)), name="constant"
    )
