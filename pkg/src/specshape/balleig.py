"""Radial Neumann eigenproblems on balls.

Euclidean unit ball: the lowest nonconstant mode has radial part
g(r) = r^{1-n/2} J_{n/2}(k r) where k is the first positive zero of
(r^{1-n/2} J_{n/2}(r))', and eigenvalue k^2.

Hyperbolic ball B(a) in the curvature -4 Poincare model: the radial part of an
angular-index-ell mode solves

    -g'' = ((n-1)/r + 2(n-2) r/(1-r^2)) g' + (eta/(1-r^2)^2 - ell(ell+n-2)/r^2) g

with Neumann condition g'(a) = 0, solved here by shooting from the regular
singular point at r = 0.

Profiles are extended by the constant g(a) outside the ball, so g' = 0 there.
"""

import functools

import numpy as np
from scipy import integrate, optimize, special

from .errors import NumericalError, PropertyViolation
from .geom import EUCLIDEAN, HYPERBOLIC

PROFILE_SAMPLES = 2001
_SHOOT_R0 = 1e-6
_SHOOT_RTOL = 1e-11
_SHOOT_ATOL = 1e-14


def sphere_area(n):
    """Surface measure of the unit sphere S^{n-1}."""
    return 2.0 * np.pi ** (n / 2.0) / special.gamma(n / 2.0)


def _bessel_shape_deriv(n, r):
    """d/dr of r^{1-n/2} J_{n/2}(r), the function whose first zero is k'_{n/2}."""
    nu = n / 2.0
    return (1.0 - n) * r ** (-nu) * special.jv(nu, r) + r ** (1.0 - nu) * special.jv(
        nu - 1.0, r
    )


@functools.lru_cache(maxsize=None)
def euclid_bessel_root(n):
    """First positive zero k'_{n/2} of (r^{1-n/2} J_{n/2}(r))'.

    The squared root is the lowest nonzero Neumann eigenvalue of the unit ball.
    """
    if n < 2:
        raise ValueError("dimension must be >= 2")
    rs = np.linspace(0.05, 25.0, 5000)
    vals = _bessel_shape_deriv(n, rs)
    sign = np.sign(vals)
    flips = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    if flips.size == 0:
        raise NumericalError(f"no sign change found for the order-{n / 2} shape derivative")
    lo, hi = rs[flips[0]], rs[flips[0] + 1]
    root = optimize.brentq(lambda r: _bessel_shape_deriv(n, r), lo, hi, xtol=1e-14)
    if abs(_bessel_shape_deriv(n, root)) > 1e-10:
        raise NumericalError(f"root residual too large at k' = {root}")
    return float(root)


class RadialProfile:
    """Sampled radial eigenfunction g on [0, a] with constant extension beyond a.

    Normalized with g'(0) = 1 for ell = 1. Evaluation uses cubic splines of the
    stored samples; optional exact callables back the Euclidean Bessel case.
    """

    def __init__(self, n, ball_radius, r, g, gp, eigenvalue, ell=1,
                 geometry=EUCLIDEAN, exact=None):
        self.n = int(n)
        self.ball_radius = float(ball_radius)
        self.r = np.asarray(r, dtype=float)
        self.g = np.asarray(g, dtype=float)
        self.gp = np.asarray(gp, dtype=float)
        self.eigenvalue = float(eigenvalue)
        self.ell = int(ell)
        self.geometry = geometry
        self.exact = exact  # dict of callables g, gp, gpp or None
        steps = np.diff(self.r)
        if steps.size == 0 or np.abs(steps - steps[0]).max() > 1e-12 * steps[0]:
            raise ValueError("profile grid must be uniform")
        self._dr = float(steps[0])
        # per-interval power-basis coefficients of the cubic Hermite interpolant
        d = self._dr
        g0, g1 = self.g[:-1], self.g[1:]
        d0, d1 = self.gp[:-1] * d, self.gp[1:] * d
        self._c0 = g0
        self._c1 = d0
        self._c2 = 3.0 * (g1 - g0) - 2.0 * d0 - d1
        self._c3 = 2.0 * (g0 - g1) + d0 + d1

    @property
    def boundary_value(self):
        return float(self.g[-1])

    def g_at(self, r):
        """g(r), extended by g(a) for r > a (clipping realizes the extension)."""
        rq = np.minimum(np.asarray(r, dtype=float), self.ball_radius)
        u = rq / self._dr
        i = np.minimum(u.astype(np.int64), len(self.r) - 2)
        s = u - i
        return ((self._c3[i] * s + self._c2[i]) * s + self._c1[i]) * s + self._c0[i]

    def gp_at(self, r):
        """g'(r), zero for r > a."""
        r = np.asarray(r, dtype=float)
        inside = r < self.ball_radius
        out = np.zeros(r.shape)
        if np.any(inside):
            out[inside] = np.interp(r[inside], self.r, self.gp)
        return out

    def slope_at(self, r):
        """g(r)/r, with the limit g'(0) at r = 0."""
        r = np.asarray(r, dtype=float)
        tiny = r < 1e-12
        safe = np.where(tiny, 1.0, r)
        out = self.g_at(r) / safe
        if np.any(tiny):
            out = np.where(tiny, self.gp[0], out)
        return out

    def monotone_increasing(self):
        """True when the sampled g' is positive strictly inside (0, a)."""
        interior = (self.r > 0) & (self.r < self.ball_radius * (1 - 1e-12))
        return bool(np.all(self.gp[interior] > 0))


def euclid_profile(n, samples=PROFILE_SAMPLES):
    """Radial part of the lowest nonconstant Neumann mode of the unit ball.

    Returns a RadialProfile on [0, 1] with eigenvalue (k'_{n/2})^2, normalized
    so g'(0) = 1, carrying exact Bessel-identity callables for g, g', g''.
    """
    k = euclid_bessel_root(n)
    nu = n / 2.0
    # g ~ r * k^nu / (2^nu Gamma(nu+1)) near 0; rescale for unit initial slope
    scale = 2.0**nu * special.gamma(nu + 1.0) / k**nu

    def g_exact(r):
        r = np.asarray(r, dtype=float)
        out = np.empty_like(r)
        tiny = r < 1e-12
        rs = np.where(tiny, 1.0, r)
        out = scale * rs ** (1.0 - nu) * special.jv(nu, k * rs)
        return np.where(tiny, 0.0, out)

    def gp_exact(r):
        r = np.asarray(r, dtype=float)
        tiny = r < 1e-12
        rs = np.where(tiny, 1.0, r)
        val = scale * (
            (1.0 - n) * rs ** (-nu) * special.jv(nu, k * rs)
            + k * rs ** (1.0 - nu) * special.jv(nu - 1.0, k * rs)
        )
        return np.where(tiny, 1.0, val)

    def gpp_exact(r):
        r = np.asarray(r, dtype=float)
        return scale * (
            n * (n - 1.0) * r ** (-nu - 1.0) * special.jv(nu, k * r)
            + k * (3.0 - 2.0 * n) * r ** (-nu) * special.jv(nu - 1.0, k * r)
            + k * k * r ** (1.0 - nu) * special.jv(nu - 2.0, k * r)
        )

    r = np.linspace(0.0, 1.0, samples)
    return RadialProfile(
        n,
        1.0,
        r,
        g_exact(r),
        gp_exact(r),
        k * k,
        ell=1,
        geometry=EUCLIDEAN,
        exact={"g": g_exact, "gp": gp_exact, "gpp": gpp_exact},
    )


def hyp_ode_rhs(n, ell, eta, r, g, gp):
    """g'' for the hyperbolic radial equation at radius r in (0, 1)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0) or np.any(r >= 1.0):
        raise ValueError("hyp_ode_rhs requires 0 < r < 1")
    one_m = 1.0 - r * r
    drift = (n - 1.0) / r + 2.0 * (n - 2.0) * r / one_m
    potential = eta / one_m**2 - ell * (ell + n - 2.0) / r**2
    return -(drift * gp + potential * g)


def _shoot(n, ell, eta, a):
    """Integrate the radial equation from the regular singular point to r = a."""
    r0 = _SHOOT_R0
    if ell >= 1:
        y0 = [r0**ell, ell * r0 ** (ell - 1)]
    else:
        # Frobenius start for the regular ell = 0 branch: g = 1 - eta r^2/(2n)
        y0 = [1.0 - eta * r0 * r0 / (2.0 * n), -eta * r0 / n]

    def rhs(r, y):
        return [y[1], hyp_ode_rhs(n, ell, eta, r, y[0], y[1])]

    sol = integrate.solve_ivp(
        rhs, (r0, a), y0, method="DOP853", rtol=_SHOOT_RTOL, atol=_SHOOT_ATOL,
        dense_output=True,
    )
    if not sol.success:
        raise NumericalError(f"radial integration failed: {sol.message}")
    return sol


def hyp_eigen(n, a, ell=1, samples=PROFILE_SAMPLES):
    """Smallest positive Neumann eigenvalue of angular index ell on the ball B(a).

    Shooting in eta: scan a geometric grid until the boundary mismatch g'(a)
    changes sign, then Brent refine. For ell = 1 the result is the first
    nonconstant eigenvalue of B(a); for ell = 0 the constant mode is excluded.

    Returns (eigenvalue, RadialProfile).
    """
    if not 0.0 < a < 1.0:
        raise ValueError("ball radius must lie in (0, 1)")
    if ell < 0:
        raise ValueError("angular index must be >= 0")

    euclid_scale = euclid_bessel_root(n) ** 2 / a**2

    def mismatch(eta):
        return _shoot(n, ell, eta, a).y[1, -1]

    grid = euclid_scale * np.geomspace(1e-3, 12.0, 90)
    prev_eta, prev_val = grid[0], mismatch(grid[0])
    bracket = None
    for eta in grid[1:]:
        val = mismatch(eta)
        if prev_val == 0.0 or prev_val * val < 0.0:
            bracket = (prev_eta, eta)
            break
        prev_eta, prev_val = eta, val
    if bracket is None:
        raise NumericalError(
            f"no shooting sign change for n={n}, a={a}, ell={ell} in the scanned window"
        )
    eta = optimize.brentq(mismatch, *bracket, xtol=1e-13, rtol=1e-15)

    sol = _shoot(n, ell, eta, a)
    r = np.linspace(0.0, a, samples)
    vals = sol.sol(np.clip(r, _SHOOT_R0, a))
    g, gp = vals[0], vals[1]
    if ell >= 1:
        g[0], gp[0] = 0.0, (1.0 if ell == 1 else 0.0)
    else:
        g[0], gp[0] = 1.0, 0.0

    gmax = np.max(np.abs(g))
    residual = abs(gp[-1]) / max(gmax / a, np.max(np.abs(gp)))
    if residual > 1e-9:
        raise NumericalError(f"shooting residual {residual:.2e} exceeds 1e-9")

    profile = RadialProfile(n, a, r, g, gp, eta, ell=ell, geometry=HYPERBOLIC)
    return float(eta), profile


def _euclid_radial_first(n):
    """First nonzero eigenvalue of the purely radial (ell = 0) unit-ball problem.

    The regular radial solution is r^{1-n/2} J_{n/2-1}(k r); the Neumann
    condition is a zero of its derivative at r = 1.
    """
    nu = n / 2.0

    def deriv(k):
        # d/dr [r^{1-nu} J_{nu-1}(k r)] at r = 1
        return (2.0 - n) * special.jv(nu - 1.0, k) + k * special.jv(nu - 2.0, k)

    ks = np.linspace(0.5, 25.0, 5000)
    vals = deriv(ks)
    flips = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if flips.size == 0:
        raise NumericalError("no radial Neumann root found")
    k = optimize.brentq(deriv, ks[flips[0]], ks[flips[0] + 1], xtol=1e-13)
    return float(k * k)


def verify_second_nonradial(n, a=None, geometry=HYPERBOLIC):
    """Check that the ell = 1 eigenvalue sits below the first nonconstant radial one.

    Returns a report dict with both values; raises PropertyViolation when the
    strict inequality fails (it is a proved property of the ball).
    """
    if geometry == EUCLIDEAN:
        ell1 = euclid_bessel_root(n) ** 2
        ell0 = _euclid_radial_first(n)
    else:
        if a is None:
            raise ValueError("hyperbolic check requires the ball radius a")
        ell1, _ = hyp_eigen(n, a, ell=1)
        ell0, _ = hyp_eigen(n, a, ell=0)
    report = {
        "geometry": geometry,
        "n": n,
        "a": a,
        "eigenvalue_ell1": ell1,
        "eigenvalue_ell0": ell0,
        "nonradial_second": ell1 < ell0,
    }
    if not ell1 < ell0:
        raise PropertyViolation(
            f"ell=1 eigenvalue {ell1} is not below the radial one {ell0}"
        )
    return report


class ComparisonProfile:
    """The decreasing comparison function h built from a radial profile.

    Euclidean:  h = g'^2 + (n-1) g^2/r^2 - mu g^2.
    Hyperbolic: h = (g'^2 + (n-1) g^2/r^2)(1-r^2)^2 - eta g^2.
    Outside the ball the profile is constant, so h has the closed-form tail
    with g = g(a), g' = 0.
    """

    def __init__(self, profile, samples=PROFILE_SAMPLES, r_max=None):
        self.profile = profile
        self.n = profile.n
        self.geometry = profile.geometry
        self.eigenvalue = profile.eigenvalue
        a = profile.ball_radius
        if r_max is None:
            r_max = 2.0 * a if self.geometry == EUCLIDEAN else 0.5 * (1.0 + a)
        if self.geometry == HYPERBOLIC and r_max >= 1.0:
            raise ValueError("hyperbolic comparison grid must stay inside the disk")
        self.r_max = float(r_max)
        self.r = np.linspace(0.0, self.r_max, samples)
        self.h = self.h_at(self.r)

    def h_at(self, r):
        r = np.asarray(r, dtype=float)
        p = self.profile
        g = p.g_at(r)
        gp = p.gp_at(r)
        slope = p.slope_at(r)
        radial = gp**2 + (self.n - 1.0) * slope**2
        if self.geometry == HYPERBOLIC:
            radial = radial * (1.0 - r * r) ** 2
        return radial - self.eigenvalue * g**2

    def strictly_decreasing(self):
        """Finite-difference sign test on the stored grid."""
        return bool(np.all(np.diff(self.h) < 0.0))

    def ball_integral(self):
        """Weighted integral of h over the profile's ball; zero for an eigenpair.

        Returns (value, scale) where scale is the same integral of |h|.
        """
        a = self.profile.ball_radius
        area = sphere_area(self.n)

        def weight(r):
            w = r ** (self.n - 1)
            if self.geometry == HYPERBOLIC:
                w = w * (1.0 - r * r) ** (-self.n)
            return w

        val, _ = integrate.quad(
            lambda r: self.h_at(np.array([r]))[0] * weight(r), 0.0, a, limit=200
        )
        scale, _ = integrate.quad(
            lambda r: abs(self.h_at(np.array([r]))[0]) * weight(r), 0.0, a, limit=200
        )
        return area * val, area * scale


def h_profile(profile, samples=PROFILE_SAMPLES, r_max=None):
    """Comparison profile for a radial eigenfunction (see ComparisonProfile)."""
    return ComparisonProfile(profile, samples=samples, r_max=r_max)


def gradient_sum_identity(profile, x, step=1e-6):
    """Check sum_j |grad(g(r) x_j/r)|^2 = g'^2 + (n-1) g^2/r^2 at the point x.

    The left side is computed by central finite differences of each component;
    the right side from the profile. Returns (lhs, rhs).
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    r = float(np.linalg.norm(x))
    if r <= 0.0:
        raise ValueError("gradient_sum_identity requires x != 0")

    def component(j, pts):
        rr = np.linalg.norm(pts, axis=-1)
        return profile.g_at(rr) * pts[..., j] / rr

    lhs = 0.0
    for j in range(n):
        for i in range(n):
            ei = np.zeros(n)
            ei[i] = step
            lhs += ((component(j, x + ei) - component(j, x - ei)) / (2.0 * step)) ** 2
    rr = np.array([r])
    rhs = float(profile.gp_at(rr)[0] ** 2 + (n - 1.0) * profile.slope_at(rr)[0] ** 2)
    return float(lhs), rhs


def export_profile_csv(profile, path, comparison=None):
    """Write columns r, g, g_prime, h for plotting and cross-validation."""
    comp = comparison if comparison is not None else h_profile(profile)
    h_vals = comp.h_at(profile.r)
    with open(path, "w") as fh:
        fh.write("r,g,g_prime,h\n")
        for r, g, gp, h in zip(profile.r, profile.g, profile.gp, h_vals):
            fh.write(f"{r:.17g},{g:.17g},{gp:.17g},{h:.17g}\n")
