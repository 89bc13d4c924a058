"""Geometry kernel: Euclidean reflections and folds, Poincare-ball Mobius maps,
hyperbolic reflections/folds, and the metric weights of the curvature -4 disk model.

All point arguments accept a single point of shape (n,) or a batch of shape
(..., n); coordinates live on the last axis. Every map here has an exact
closed form, so operations are pure and safe to vectorize freely.
"""

import numpy as np
from dataclasses import dataclass

EUCLIDEAN = "euclidean"
HYPERBOLIC = "hyperbolic"

CURVATURE = -4.0  # fixed by the metric normalization (1-|x|^2)^{-2} dx^2

# points this close to a fold hyperplane count as on-boundary and stay fixed
FOLD_BOUNDARY_TOL = 1e-14
# interior-only hyperbolic formulas require |y| <= 1 - this margin
INTERIOR_MARGIN = 1e-12


def unit_vector(p):
    """Validate and return p as a float array with |p| = 1 (tol 1e-12)."""
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size < 2:
        raise ValueError("normal vector must be 1-d with length >= 2")
    norm = np.linalg.norm(p)
    if abs(norm - 1.0) > 1e-12:
        raise ValueError(f"normal vector must be unit length, got |p| = {norm!r}")
    return p


@dataclass(frozen=True)
class GeometryConfig:
    """Ambient geometry: dimension n >= 2, curvature fixed at -4 in hyperbolic mode."""

    dimension: int
    geometry: str = EUCLIDEAN

    def __post_init__(self):
        if self.dimension < 2:
            raise ValueError("dimension must be >= 2")
        if self.geometry not in (EUCLIDEAN, HYPERBOLIC):
            raise ValueError(f"unknown geometry {self.geometry!r}")

    @property
    def curvature(self):
        return CURVATURE if self.geometry == HYPERBOLIC else 0.0


@dataclass(frozen=True)
class Halfspace:
    """Halfspace H_{p,t} with unit normal p and height t.

    Euclidean: H = {y : y.p < t}, t >= 0.
    Hyperbolic: H = T_{pt}(H_p), the Mobius image of the halfball
    H_p = {y in B : y.p < 0}, with t in [0, 1).
    """

    normal: np.ndarray
    height: float
    geometry: str = EUCLIDEAN

    def __post_init__(self):
        object.__setattr__(self, "normal", unit_vector(self.normal))
        object.__setattr__(self, "height", float(self.height))
        if self.geometry not in (EUCLIDEAN, HYPERBOLIC):
            raise ValueError(f"unknown geometry {self.geometry!r}")
        if self.height < 0:
            raise ValueError("halfspace height must be >= 0")
        if self.geometry == HYPERBOLIC and self.height >= 1.0:
            raise ValueError("hyperbolic halfspace height must be < 1")

    @property
    def dim(self):
        return self.normal.size


@dataclass(frozen=True)
class MobiusMap:
    """Mobius self-map T_x of the closed unit ball with T_x(0) = x.

    T_x fixes +-x/|x| on the sphere; x = 0 is the identity; inverse is T_{-x}.
    """

    center: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.center, dtype=float)
        if np.linalg.norm(x) >= 1.0:
            raise ValueError("Mobius center must lie strictly inside the unit ball")
        object.__setattr__(self, "center", x)

    def __call__(self, y):
        return mobius(self.center, y)

    def jacobian(self, y):
        return mobius_jacobian(self.center, y)

    @property
    def inverse(self):
        return MobiusMap(-self.center)


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def reflect_origin(p, y):
    """Reflection R_p(y) = y - 2(y.p)p across the hyperplane through 0 normal to p."""
    p = unit_vector(p)
    y = np.asarray(y, dtype=float)
    return y - 2.0 * _dot(y, p)[..., None] * p


def reflect_hyperplane(h, y):
    """Euclidean reflection R_{p,t}(y) = y + 2(t - y.p)p across {y.p = t}."""
    if h.geometry != EUCLIDEAN:
        raise ValueError("reflect_hyperplane requires a Euclidean halfspace")
    y = np.asarray(y, dtype=float)
    return y + 2.0 * (h.height - _dot(y, h.normal))[..., None] * h.normal


def fold_euclid(h, y):
    """Fold map onto the closed halfspace {y.p <= t}: identity on H, reflection off H."""
    if h.geometry != EUCLIDEAN:
        raise ValueError("fold_euclid requires a Euclidean halfspace")
    y = np.asarray(y, dtype=float)
    side = _dot(y, h.normal) - h.height
    outside = side > FOLD_BOUNDARY_TOL
    if not np.any(outside):
        return y.copy()
    out = y.copy()
    reflected = reflect_hyperplane(h, y)
    out[outside] = reflected[outside] if y.ndim > 1 else reflected
    return out


def _check_in_closed_ball(y, *, strict=False):
    y = np.asarray(y, dtype=float)
    norms = np.linalg.norm(y, axis=-1)
    limit = 1.0 - INTERIOR_MARGIN if strict else 1.0 + 1e-12
    if np.any(norms > limit):
        where = "strictly inside" if strict else "in the closed"
        raise ValueError(f"point must lie {where} unit ball, got |y| = {norms.max()!r}")
    return y


def mobius(x, y):
    """T_x(y) = ((1 + 2 x.y + |y|^2) x + (1 - |x|^2) y) / (1 + 2 x.y + |x|^2 |y|^2)."""
    x = np.asarray(x, dtype=float)
    if np.linalg.norm(x) >= 1.0:
        raise ValueError("Mobius center must satisfy |x| < 1")
    y = _check_in_closed_ball(y)
    xy = _dot(y, x)
    y2 = _dot(y, y)
    x2 = float(np.dot(x, x))
    num = (1.0 + 2.0 * xy + y2)[..., None] * x + (1.0 - x2) * y
    den = 1.0 + 2.0 * xy + x2 * y2
    return num / den[..., None]


def mobius_jacobian(x, y):
    """Jacobian determinant of T_x at y: ((1 - |T_x y|^2) / (1 - |y|^2))^n."""
    x = np.asarray(x, dtype=float)
    y = _check_in_closed_ball(y, strict=True)
    n = y.shape[-1]
    ty = mobius(x, y)
    ratio = (1.0 - _dot(ty, ty)) / (1.0 - _dot(y, y))
    return ratio**n


def hyp_reflect(h, y):
    """Hyperbolic reflection across the geodesic hyperplane bounding H_{p,t}.

    Defined by conjugation: R_{p,t} = T_{pt} o R_p o T_{-pt}.
    """
    if h.geometry != HYPERBOLIC:
        raise ValueError("hyp_reflect requires a hyperbolic halfspace")
    y = _check_in_closed_ball(y)
    if h.height == 0.0:
        return reflect_origin(h.normal, y)
    pt = h.normal * h.height
    return mobius(pt, reflect_origin(h.normal, mobius(-pt, y)))


def hyp_halfspace_side(h, y):
    """Signed coordinate of y relative to H_{p,t}: negative inside H.

    Computed as T_{-pt}(y).p, which is the defining inequality of the halfball.
    """
    if h.geometry != HYPERBOLIC:
        raise ValueError("hyp_halfspace_side requires a hyperbolic halfspace")
    y = _check_in_closed_ball(y)
    if h.height == 0.0:
        return _dot(y, h.normal)
    return _dot(mobius(-h.normal * h.height, y), h.normal)


def fold_hyp(h, y):
    """Hyperbolic fold onto the closure of H_{p,t}: identity on H, reflection off H."""
    y = _check_in_closed_ball(y, strict=True)
    side = hyp_halfspace_side(h, y)
    outside = side > FOLD_BOUNDARY_TOL
    if not np.any(outside):
        return y.copy()
    out = y.copy()
    reflected = hyp_reflect(h, y)
    out[outside] = reflected[outside] if y.ndim > 1 else reflected
    return out


def geodesic_boundary_circle(h):
    """Euclidean-chart circle carrying the geodesic boundary of H_{p,t}.

    Returns (center, radius), or None when t = 0 (the boundary is then the
    hyperplane through the origin normal to p). The circle meets the unit
    circle orthogonally and crosses the p-axis at pt and p/t.
    """
    if h.geometry != HYPERBOLIC:
        raise ValueError("geodesic_boundary_circle requires a hyperbolic halfspace")
    t = h.height
    if t == 0.0:
        return None
    center = h.normal * ((1.0 + t * t) / (2.0 * t))
    radius = (1.0 - t * t) / (2.0 * t)
    return center, radius


def hyp_volume_weight(r, n):
    """Density (1 - r^2)^{-n} of the hyperbolic volume element against dx."""
    r = np.asarray(r, dtype=float)
    if np.any(r >= 1.0) or np.any(r < 0.0):
        raise ValueError("hyp_volume_weight requires 0 <= r < 1")
    return (1.0 - r * r) ** (-n)


def hyp_gradient_weight(r, n):
    """Density (1 - r^2)^{2-n} weighting |grad u|^2 in the hyperbolic energy."""
    r = np.asarray(r, dtype=float)
    if np.any(r >= 1.0) or np.any(r < 0.0):
        raise ValueError("hyp_gradient_weight requires 0 <= r < 1")
    return (1.0 - r * r) ** (2 - n)


def hyp_distance(r):
    """Hyperbolic distance arctanh(r) from the origin to Euclidean radius r."""
    r = np.asarray(r, dtype=float)
    if np.any(r >= 1.0) or np.any(r < 0.0):
        raise ValueError("hyp_distance requires 0 <= r < 1")
    return np.arctanh(r)


def hyp_ball_volume(a, n=2):
    """Hyperbolic volume of the centered ball of Euclidean radius a (n = 2 only)."""
    if n != 2:
        raise NotImplementedError("closed-form ball volume implemented for n = 2")
    a = float(a)
    if not 0.0 <= a < 1.0:
        raise ValueError("ball radius must lie in [0, 1)")
    return np.pi * a * a / (1.0 - a * a)


def hyp_ball_radius_for_volume(volume, n=2):
    """Euclidean radius a with hyp_ball_volume(a) = volume (n = 2 only)."""
    if n != 2:
        raise NotImplementedError("closed-form inverse implemented for n = 2")
    v = float(volume)
    if v <= 0.0:
        raise ValueError("volume must be positive")
    return float(np.sqrt(v / (v + np.pi)))


def euclid_disk_of_geodesic_ball(x, a):
    """Euclidean-chart (center, radius) of the geodesic ball T_x(B(a)).

    Mobius maps send circles to circles; the chart image of a centered ball is
    again a Euclidean disk whose diameter along the axis through 0 and x is the
    image of the corresponding diameter of B(a).
    """
    x = np.asarray(x, dtype=float)
    a = float(a)
    if not 0.0 < a < 1.0:
        raise ValueError("radius parameter must lie in (0, 1)")
    if np.linalg.norm(x) == 0.0:
        return np.zeros_like(x), a
    axis = x / np.linalg.norm(x)
    lo = mobius(x, -a * axis)
    hi = mobius(x, a * axis)
    return 0.5 * (lo + hi), 0.5 * float(np.linalg.norm(hi - lo))
