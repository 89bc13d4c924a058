import numpy as np
import pytest
from numpy.testing import assert_allclose

from specshape import balleig
from specshape.errors import PropertyViolation
from specshape.geom import EUCLIDEAN, HYPERBOLIC


def brute_force_shape_root(n, step=1e-4):
    """Sign-scan oracle for the first zero of (r^{1-n/2} J_{n/2}(r))'."""
    rs = np.arange(step, 8.0, step)
    vals = balleig._bessel_shape_deriv(n, rs)
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0][0]
    return 0.5 * (rs[idx] + rs[idx + 1])


class TestBesselRoot:
    def test_paper_anchor_n2(self):
        assert abs(balleig.euclid_bessel_root(2) - 1.8412) < 5e-4

    def test_unit_ball_eigenvalue(self):
        mu2 = balleig.euclid_bessel_root(2) ** 2
        assert abs(mu2 - 3.390) < 1e-3

    def test_n3_against_sign_scan_oracle(self):
        root = balleig.euclid_bessel_root(3)
        assert abs(root - brute_force_shape_root(3)) < 1e-4

    def test_residual_at_root(self):
        for n in (2, 3, 4):
            root = balleig.euclid_bessel_root(n)
            assert abs(balleig._bessel_shape_deriv(n, root)) < 1e-10


class TestEuclidProfile:
    def test_endpoint_values(self):
        p = balleig.euclid_profile(2)
        assert p.g[0] == 0.0
        assert abs(p.gp[-1]) < 1e-12
        assert p.gp[0] == 1.0

    def test_ode_residual_interior(self):
        p = balleig.euclid_profile(2)
        for r in (0.25, 0.5, 0.75):
            rr = np.array([r])
            g, gp, gpp = p.exact["g"](rr), p.exact["gp"](rr), p.exact["gpp"](rr)
            resid = gpp + gp / r + (p.eigenvalue - 1.0 / r**2) * g
            assert abs(resid[0]) < 1e-8

    def test_strictly_increasing(self):
        assert balleig.euclid_profile(2).monotone_increasing()
        assert balleig.euclid_profile(3).monotone_increasing()

    def test_constant_extension(self):
        p = balleig.euclid_profile(2)
        r = np.array([1.2, 1.7, 3.0])
        assert_allclose(p.g_at(r), p.boundary_value)
        assert_allclose(p.gp_at(r), 0.0)

    def test_spline_matches_exact(self):
        p = balleig.euclid_profile(2)
        r = np.linspace(0.01, 0.99, 321)
        assert np.abs(p.g_at(r) - p.exact["g"](r)).max() < 1e-12


class TestHypOdeRhs:
    def test_n2_drift_term_vanishes(self):
        # at n = 2 the (n-2) drift is identically zero, so the rhs matches
        # the reduced two-term form
        r, g, gp, eta = 0.37, 0.8, 1.1, 5.0
        got = balleig.hyp_ode_rhs(2, 1, eta, r, g, gp)
        reduced = -(gp / r + (eta / (1 - r**2) ** 2 - 1.0 / r**2) * g)
        assert_allclose(got, reduced, rtol=1e-15)

    def test_constant_solves_ell0_eta0(self):
        assert balleig.hyp_ode_rhs(3, 0, 0.0, 0.5, 1.0, 0.0) == 0.0

    def test_frobenius_limit_near_origin(self):
        # with g = r, ell = 1, n = 2 the rhs reduces to -eta r/(1-r^2)^2 -> 0;
        # the 1/r terms cancel, leaving O(eps/r) float noise
        eta = 7.3
        for r in (1e-6, 1e-5, 1e-4):
            val = balleig.hyp_ode_rhs(2, 1, eta, r, r, 1.0)
            assert abs(val + eta * r / (1 - r * r) ** 2) < 1e-9
        assert abs(balleig.hyp_ode_rhs(2, 1, eta, 1e-6, 1e-6, 1.0)) < 1e-5

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            balleig.hyp_ode_rhs(2, 1, 1.0, 1.5, 1.0, 0.0)


class TestHypEigen:
    def test_small_ball_euclidean_limit(self):
        a = 0.02
        eta, _ = balleig.hyp_eigen(2, a)
        mu2 = balleig.euclid_bessel_root(2) ** 2
        assert abs(eta * a * a - mu2) / mu2 < 0.01

    def test_shooting_residual_contract(self):
        eta, prof = balleig.hyp_eigen(2, 0.5)
        scale = max(np.abs(prof.g).max() / 0.5, np.abs(prof.gp).max())
        assert abs(prof.gp[-1]) / scale < 1e-9

    def test_profile_shape(self):
        eta, prof = balleig.hyp_eigen(2, 0.5)
        assert prof.g[0] == 0.0
        assert prof.gp[0] == 1.0
        assert prof.monotone_increasing()
        assert prof.geometry == HYPERBOLIC
        r = np.array([0.6, 0.9])
        assert_allclose(prof.g_at(r), prof.boundary_value)
        assert_allclose(prof.gp_at(r), 0.0)

    def test_profile_satisfies_ode_pointwise(self):
        # 4th-order finite differences of the stored g' against the
        # curvature-corrected radial equation
        eta, prof = balleig.hyp_eigen(2, 0.5)
        r, g, gp = prof.r, prof.g, prof.gp
        dr = r[1] - r[0]
        i = np.arange(2, len(r) - 2)
        gpp_fd = (-gp[i + 2] + 8 * gp[i + 1] - 8 * gp[i - 1] + gp[i - 2]) / (12 * dr)
        gpp_ode = balleig.hyp_ode_rhs(2, 1, eta, r[i], g[i], gp[i])
        scale = np.abs(gpp_ode).max()
        assert np.abs(gpp_fd - gpp_ode).max() / scale < 1e-8

    def test_radius_trend_recorded_not_asserted(self):
        # sampled trend of eta_2(B(a)) in a; recorded as a diagnostic only
        radii = [0.1, 0.3, 0.5, 0.7, 0.9]
        values = [balleig.hyp_eigen(2, a)[0] for a in radii]
        trend = np.diff(values)
        print("eta_2(B(a)) samples:", dict(zip(radii, values)))
        print("monotone decreasing trend:", bool(np.all(trend < 0)))
        assert all(v > 0 for v in values)


class TestSecondNonradial:
    def test_hyperbolic_n2(self):
        rep = balleig.verify_second_nonradial(2, a=0.5)
        assert rep["nonradial_second"]
        assert rep["eigenvalue_ell1"] < rep["eigenvalue_ell0"]

    def test_euclid_anchors(self):
        rep = balleig.verify_second_nonradial(2, geometry=EUCLIDEAN)
        assert abs(rep["eigenvalue_ell1"] - 3.390) < 1e-3
        # first radial: square of the first positive zero of J_1
        assert abs(rep["eigenvalue_ell0"] - 14.682) < 1e-3

    def test_hyperbolic_n3(self):
        rep = balleig.verify_second_nonradial(3, a=0.3)
        assert rep["eigenvalue_ell1"] < rep["eigenvalue_ell0"]


class TestComparisonProfile:
    def test_euclid_zero_average(self):
        comp = balleig.h_profile(balleig.euclid_profile(2))
        val, scale = comp.ball_integral()
        assert abs(val) / scale < 1e-6

    def test_euclid_positive_at_origin(self):
        p = balleig.euclid_profile(2)
        comp = balleig.h_profile(p)
        assert_allclose(comp.h[0], 2.0 * p.gp[0] ** 2, rtol=1e-10)
        assert comp.h[0] > 0

    def test_strictly_decreasing_both_regimes(self):
        comp = balleig.h_profile(balleig.euclid_profile(2))
        assert comp.r.size >= 2000
        assert comp.strictly_decreasing()
        # grid spans inside and outside the unit ball
        assert comp.r[-1] > 1.0

    def test_hyperbolic_zero_average_and_monotone(self):
        eta, prof = balleig.hyp_eigen(2, 0.5)
        comp = balleig.h_profile(prof)
        val, scale = comp.ball_integral()
        assert abs(val) / scale < 1e-6
        assert comp.strictly_decreasing()

    def test_continuity_across_ball_boundary(self):
        comp = balleig.h_profile(balleig.euclid_profile(2))
        a = 1.0
        eps = 1e-9
        left = comp.h_at(np.array([a - eps]))[0]
        right = comp.h_at(np.array([a + eps]))[0]
        assert abs(left - right) < 1e-6

    def test_euclid_tail_formula(self):
        p = balleig.euclid_profile(2)
        comp = balleig.h_profile(p)
        r = np.array([1.5])
        expected = p.boundary_value**2 / r**2 - p.eigenvalue * p.boundary_value**2
        assert_allclose(comp.h_at(r), expected, rtol=1e-12)


class TestGradientSumIdentity:
    def test_random_points_n2(self):
        p = balleig.euclid_profile(2)
        rng = np.random.default_rng(42)
        count = 0
        while count < 100:
            x = rng.uniform(-0.95, 0.95, 2)
            if np.linalg.norm(x) < 0.05:
                continue
            lhs, rhs = balleig.gradient_sum_identity(p, x)
            assert abs(lhs - rhs) / abs(rhs) < 1e-5
            count += 1

    def test_axis_point_reduces_to_split(self):
        p = balleig.euclid_profile(2)
        r = 0.6
        lhs, rhs = balleig.gradient_sum_identity(p, np.array([r, 0.0]))
        rr = np.array([r])
        split = p.gp_at(rr)[0] ** 2 + (p.g_at(rr)[0] / r) ** 2
        assert_allclose(rhs, split, rtol=1e-12)
        assert abs(lhs - split) / split < 1e-5

    def test_spot_check_n3(self):
        p = balleig.euclid_profile(3)
        rng = np.random.default_rng(43)
        for _ in range(5):
            x = rng.uniform(-0.5, 0.5, 3)
            if np.linalg.norm(x) < 0.05:
                continue
            lhs, rhs = balleig.gradient_sum_identity(p, x)
            assert abs(lhs - rhs) / abs(rhs) < 1e-5


def test_csv_export(tmp_path):
    p = balleig.euclid_profile(2)
    path = tmp_path / "profile.csv"
    balleig.export_profile_csv(p, path)
    rows = path.read_text().strip().splitlines()
    assert rows[0] == "r,g,g_prime,h"
    assert len(rows) == p.r.size + 1
