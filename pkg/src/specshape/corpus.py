"""Seeded domain-family generators for the verification sweeps.

Euclidean families: ellipses (aspect 1-4), rectangles, L-shapes, two-disk
unions (equal and unequal, varying separation), star-convex polygons with
trigonometric-polynomial radii. Hyperbolic families: geodesic-disk pairs of
fixed total volume, single Mobius-placed geodesic balls, and star polygons
scaled to the target hyperbolic volume by bisection.

Generated polygons carry boundary vertices at roughly the mesh spacing, so
mesh quality does not degrade near curved boundaries. Exact area/volume
normalization happens inside the certification pipeline; generators only get
within a few percent.
"""

import numpy as np

from .geom import EUCLIDEAN, HYPERBOLIC, hyp_ball_volume
from .mesh import DiskPrimitive, DomainSpec, GeodesicDiskPrimitive, PolygonPrimitive
from .transplant import WeightedRegion


def _resample_closed(points, spacing):
    """Resample a closed polyline to roughly uniform arclength spacing."""
    seg = np.linalg.norm(np.roll(points, -1, axis=0) - points, axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    count = max(16, int(np.ceil(total / spacing)))
    targets = np.linspace(0.0, total, count, endpoint=False)
    closed = np.vstack([points, points[:1]])
    out = np.empty((count, 2))
    out[:, 0] = np.interp(targets, s, closed[:, 0])
    out[:, 1] = np.interp(targets, s, closed[:, 1])
    return out


def _polygon(points, spacing):
    return PolygonPrimitive(tuple(map(tuple, _resample_closed(points, spacing))))


def _star_points(rng, base_radius, noise, modes=6, samples=512):
    theta = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    rho = np.ones_like(theta)
    for k in range(2, modes + 1):
        a, b = rng.normal(size=2) * noise / np.sqrt(k)
        rho += a * np.cos(k * theta) + b * np.sin(k * theta)
    rho = np.clip(rho, 0.35, None) * base_radius
    return np.stack([rho * np.cos(theta), rho * np.sin(theta)], axis=1)


def ellipse_spec(rng, h, aspect=None):
    aspect = aspect if aspect is not None else rng.uniform(1.0, 4.0)
    area = 2.0 * np.pi
    b = np.sqrt(area / (np.pi * aspect))
    a = aspect * b
    theta = np.linspace(0.0, 2.0 * np.pi, 720, endpoint=False)
    pts = np.stack([a * np.cos(theta), b * np.sin(theta)], axis=1)
    return DomainSpec(EUCLIDEAN, [_polygon(pts, 0.8 * h)], h, name=f"ellipse-{aspect:.2f}")


def rectangle_spec(rng, h, aspect=None):
    aspect = aspect if aspect is not None else rng.uniform(1.0, 4.0)
    area = 2.0 * np.pi
    w = np.sqrt(area * aspect)
    v = area / w
    pts = np.array([[0, 0], [w, 0], [w, v], [0, v]], dtype=float)
    pts -= pts.mean(axis=0)
    return DomainSpec(
        EUCLIDEAN, [PolygonPrimitive(tuple(map(tuple, pts)))], h,
        name=f"rectangle-{aspect:.2f}",
    )


def l_shape_spec(rng, h):
    notch = rng.uniform(0.3, 0.6)
    pts = np.array(
        [[0, 0], [1, 0], [1, notch], [notch, notch], [notch, 1], [0, 1]], dtype=float
    )
    area = 1.0 - (1.0 - notch) ** 2
    pts *= np.sqrt(2.0 * np.pi / area)
    pts -= pts.mean(axis=0)
    return DomainSpec(
        EUCLIDEAN, [PolygonPrimitive(tuple(map(tuple, pts)))], h,
        name=f"l-shape-{notch:.2f}",
    )


def two_disks_spec(rng, h, split=0.5, gap=None):
    r1 = np.sqrt(2.0 * split)
    r2 = np.sqrt(2.0 * (1.0 - split))
    gap = gap if gap is not None else rng.uniform(0.3, 1.0)
    d = r1 + r2 + gap
    kind = "equal" if abs(split - 0.5) < 1e-12 else f"split-{split:.2f}"
    return DomainSpec(
        EUCLIDEAN,
        [
            DiskPrimitive((-d / 2.0, 0.0), r1),
            DiskPrimitive((d / 2.0, 0.0), r2),
        ],
        h,
        name=f"two-disks-{kind}-gap-{gap:.2f}",
    )


def star_spec(rng, h, noise=0.18):
    pts = _star_points(rng, 1.0, noise)
    x, y = pts[:, 0], pts[:, 1]
    area = 0.5 * abs(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
    pts = pts * np.sqrt(2.0 * np.pi / area)
    return DomainSpec(EUCLIDEAN, [_polygon(pts, 0.8 * h)], h, name="star-polygon")


def euclid_corpus(count, seed=7, h=0.12):
    """Seeded corpus of Euclidean domains with area about 2 pi."""
    rng = np.random.default_rng(seed)
    makers = [
        lambda: ellipse_spec(rng, h),
        lambda: rectangle_spec(rng, h),
        lambda: l_shape_spec(rng, h),
        lambda: two_disks_spec(rng, h, split=0.5),
        lambda: two_disks_spec(rng, h, split=rng.uniform(0.35, 0.48)),
        lambda: star_spec(rng, h),
    ]
    specs = []
    for i in range(count):
        spec = makers[i % len(makers)]()
        spec.name = f"{i:02d}-{spec.name}"
        specs.append(spec)
    return specs


def noisy_two_disks_spec(seed=11, noise=0.05, h=0.1, separation=2.7):
    """Two near-disks with trig-polynomial boundary noise; regression domain."""
    rng = np.random.default_rng(seed)
    left = _star_points(rng, 1.0, noise) + np.array([-separation / 2.0, 0.0])
    right = _star_points(rng, 1.0, noise) + np.array([separation / 2.0, 0.0])
    return DomainSpec(
        EUCLIDEAN,
        [_polygon(left, 0.8 * h), _polygon(right, 0.8 * h)],
        h,
        name=f"noisy-two-disks-{noise:.2f}",
    )


# ---------------------------------------------------------------------------
# hyperbolic families


def _polygon_hyp_volume(pts):
    center = pts.mean(axis=0)
    tris = np.stack(
        [np.tile(center, (len(pts), 1)), pts, np.roll(pts, -1, axis=0)], axis=1
    )
    return WeightedRegion.from_triangles(tris, weight="hyp_volume").volume()


def _scale_to_hyp_volume(pts, target, lo=1e-3, hi=None):
    """Bisection on the chart scale factor; hyperbolic volume is monotone in it."""
    if hi is None:
        hi = 0.95 / np.abs(np.linalg.norm(pts, axis=1)).max()
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _polygon_hyp_volume(mid * pts) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi) * pts


def geodesic_pair_spec(rng, h, total_volume, split=0.5, name="geodesic-pair"):
    v1, v2 = split * total_volume, (1.0 - split) * total_volume
    a1 = np.tanh(np.arcsinh(np.sqrt(v1 / np.pi)))
    a2 = np.tanh(np.arcsinh(np.sqrt(v2 / np.pi)))
    angle = rng.uniform(0.0, 2.0 * np.pi)
    axis = np.array([np.cos(angle), np.sin(angle)])
    d = rng.uniform(0.52, 0.62)
    return DomainSpec(
        HYPERBOLIC,
        [
            GeodesicDiskPrimitive(tuple(-d * axis), a1),
            GeodesicDiskPrimitive(tuple(d * axis), a2),
        ],
        h,
        name=name,
    )


def single_ball_spec(rng, h, total_volume, name="single-ball"):
    a = np.tanh(np.arcsinh(np.sqrt(total_volume / np.pi)))
    angle = rng.uniform(0.0, 2.0 * np.pi)
    offset = rng.uniform(0.1, 0.3)
    center = offset * np.array([np.cos(angle), np.sin(angle)])
    return DomainSpec(HYPERBOLIC, [GeodesicDiskPrimitive(tuple(center), a)], h, name=name)


def hyp_star_spec(rng, h, total_volume, name="hyperbolic-star"):
    pts = _star_points(rng, 1.0, 0.15)
    pts = _scale_to_hyp_volume(pts, total_volume)
    shift = rng.uniform(0.05, 0.2) * np.array(
        [np.cos(rng.uniform(0, 2 * np.pi)), np.sin(rng.uniform(0, 2 * np.pi))]
    )
    poly = PolygonPrimitive(tuple(map(tuple, _resample_closed(pts, 0.8 * h))))
    poly = poly.mobius_transformed(shift)
    return DomainSpec(HYPERBOLIC, [poly], h, name=name)


def hyperbolic_corpus(count, seed=7, h=0.035, total_volume=None):
    """Seeded hyperbolic corpus of fixed total volume (default: 2 x vol B(0.35))."""
    if total_volume is None:
        total_volume = 2.0 * hyp_ball_volume(0.35)
    rng = np.random.default_rng(seed)
    makers = [
        lambda i: geodesic_pair_spec(rng, h, total_volume, split=0.5,
                                     name="equal-geodesic-pair"),
        lambda i: geodesic_pair_spec(rng, h, total_volume,
                                     split=rng.uniform(0.36, 0.47),
                                     name="unequal-geodesic-pair"),
        lambda i: single_ball_spec(rng, h, total_volume),
        lambda i: hyp_star_spec(rng, h, total_volume),
    ]
    specs = []
    for i in range(count):
        spec = makers[i % len(makers)](i)
        spec.name = f"{i:02d}-{spec.name}"
        specs.append(spec)
    return specs
