import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from specshape import geom
from specshape.geom import EUCLIDEAN, HYPERBOLIC, Halfspace, MobiusMap


def unit(theta):
    return np.array([np.cos(theta), np.sin(theta)])


def random_ball_points(rng, count, rmax=0.85, dim=2):
    out = []
    while len(out) < count:
        pts = rng.uniform(-1.0, 1.0, size=(4 * count + 8, dim))
        out.extend(pts[np.linalg.norm(pts, axis=1) < rmax])
    return np.array(out[:count])


def hyp_metric_dist(u, v):
    # distance in the curvature -4 model; monotone in the standard one
    du = 1.0 - np.sum(u * u, axis=-1)
    dv = 1.0 - np.sum(v * v, axis=-1)
    q = 1.0 + 2.0 * np.sum((u - v) ** 2, axis=-1) / (du * dv)
    return 0.5 * np.arccosh(q)


class TestReflections:
    def test_reflect_origin_coordinate_flip(self):
        assert_allclose(geom.reflect_origin([1.0, 0.0], [3.0, 4.0]), [-3.0, 4.0])

    def test_reflect_origin_normal_negates(self):
        p = unit(1.234)
        assert_allclose(geom.reflect_origin(p, p), -p, atol=1e-15)

    def test_reflect_origin_fixes_hyperplane(self):
        assert_allclose(geom.reflect_origin([1.0, 0.0], [0.0, 5.0]), [0.0, 5.0])

    def test_reflect_origin_rejects_non_unit(self):
        with pytest.raises(ValueError):
            geom.reflect_origin([1.0, 1.0], [0.0, 0.0])

    def test_hyperplane_distance_doubling(self):
        h = Halfspace([1.0, 0.0], 1.0)
        assert_allclose(geom.reflect_hyperplane(h, [0.0, 0.0]), [2.0, 0.0])

    def test_hyperplane_t0_reduces_to_origin_reflection(self):
        h = Halfspace([1.0, 0.0], 0.0)
        assert_allclose(geom.reflect_hyperplane(h, [3.0, 4.0]), [-3.0, 4.0])

    def test_hyperplane_involution_random(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            h = Halfspace(unit(rng.uniform(0, 2 * np.pi)), rng.uniform(0, 2.0))
            y = rng.normal(size=(5, 2)) * 3.0
            assert_allclose(
                geom.reflect_hyperplane(h, geom.reflect_hyperplane(h, y)), y,
                atol=1e-12,
            )

    def test_hyperplane_rejects_hyperbolic(self):
        h = Halfspace([1.0, 0.0], 0.3, HYPERBOLIC)
        with pytest.raises(ValueError):
            geom.reflect_hyperplane(h, [0.0, 0.0])


class TestEuclideanFold:
    def test_interior_point_fixed(self):
        h = Halfspace([1.0, 0.0], 0.0)
        assert_allclose(geom.fold_euclid(h, [-1.0, 2.0]), [-1.0, 2.0])

    def test_exterior_point_mirrored(self):
        h = Halfspace([1.0, 0.0], 0.0)
        assert_allclose(geom.fold_euclid(h, [1.0, 2.0]), [-1.0, 2.0])

    def test_idempotent_random(self):
        rng = np.random.default_rng(11)
        h = Halfspace(unit(0.4), 0.7)
        y = rng.normal(size=(200, 2)) * 2.5
        once = geom.fold_euclid(h, y)
        assert_allclose(geom.fold_euclid(h, once), once, atol=1e-12)
        assert np.all(once @ h.normal <= h.height + 1e-12)

    def test_fold_is_nonexpansive(self):
        rng = np.random.default_rng(12)
        h = Halfspace(unit(2.2), 0.5)
        a = rng.normal(size=(100, 2)) * 2.0
        b = rng.normal(size=(100, 2)) * 2.0
        fa, fb = geom.fold_euclid(h, a), geom.fold_euclid(h, b)
        assert np.all(
            np.linalg.norm(fa - fb, axis=1)
            <= np.linalg.norm(a - b, axis=1) + 1e-10
        )


class TestMobius:
    def test_maps_origin_to_center(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            x = random_ball_points(rng, 1)[0]
            assert_allclose(geom.mobius(x, np.zeros(2)), x, atol=1e-15)

    def test_zero_center_is_identity(self):
        rng = np.random.default_rng(4)
        y = random_ball_points(rng, 30, rmax=0.999)
        assert_allclose(geom.mobius(np.zeros(2), y), y, atol=1e-15)

    def test_complex_formula_agreement(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            x = random_ball_points(rng, 1)[0]
            y = random_ball_points(rng, 1, rmax=0.999)[0]
            zx, zy = complex(*x), complex(*y)
            expected = (zx + zy) / (1.0 + np.conj(zx) * zy)
            got = geom.mobius(x, y)
            assert abs(complex(*got) - expected) < 1e-12

    def test_rejects_points_outside_ball(self):
        with pytest.raises(ValueError):
            geom.mobius(np.array([0.1, 0.0]), np.array([1.5, 0.0]))

    def test_inverse_law_100_random(self):
        rng = np.random.default_rng(6)
        x = random_ball_points(rng, 100)
        y = random_ball_points(rng, 100, rmax=0.95)
        for xi, yi in zip(x, y):
            assert_allclose(geom.mobius(-xi, geom.mobius(xi, yi)), yi, atol=1e-10)

    def test_ball_and_sphere_preserved(self):
        rng = np.random.default_rng(8)
        x = np.array([0.4, -0.3])
        inside = random_ball_points(rng, 50, rmax=0.999)
        assert np.all(np.linalg.norm(geom.mobius(x, inside), axis=1) < 1.0)
        theta = rng.uniform(0, 2 * np.pi, size=40)
        boundary = np.stack([np.cos(theta), np.sin(theta)], axis=1)
        norms = np.linalg.norm(geom.mobius(x, boundary), axis=1)
        assert_allclose(norms, 1.0, atol=1e-12)


class TestMobiusJacobian:
    def test_identity_map(self):
        rng = np.random.default_rng(9)
        y = random_ball_points(rng, 20)
        assert_allclose(geom.mobius_jacobian(np.zeros(2), y), np.ones(20))

    def test_value_at_origin(self):
        x = np.array([0.5, 0.2])
        expected = (1.0 - x @ x) ** 2
        assert_allclose(geom.mobius_jacobian(x, np.zeros(2)), expected, rtol=1e-14)

    def test_matches_finite_difference_determinant(self):
        rng = np.random.default_rng(10)
        step = 1e-6
        for _ in range(30):
            x = random_ball_points(rng, 1, rmax=0.7)[0]
            y = random_ball_points(rng, 1, rmax=0.7)[0]
            jac = np.zeros((2, 2))
            for i in range(2):
                e = np.zeros(2)
                e[i] = step
                jac[:, i] = (geom.mobius(x, y + e) - geom.mobius(x, y - e)) / (2 * step)
            assert abs(np.linalg.det(jac) - geom.mobius_jacobian(x, y)) < 1e-6

    def test_derivative_matrix_is_conformal(self):
        # derivative / conformal factor should be orthogonal
        rng = np.random.default_rng(20)
        step = 1e-6
        for _ in range(10):
            x = random_ball_points(rng, 1, rmax=0.6)[0]
            y = random_ball_points(rng, 1, rmax=0.6)[0]
            jac = np.zeros((2, 2))
            for i in range(2):
                e = np.zeros(2)
                e[i] = step
                jac[:, i] = (geom.mobius(x, y + e) - geom.mobius(x, y - e)) / (2 * step)
            ty = geom.mobius(x, y)
            factor = (1.0 - ty @ ty) / (1.0 - y @ y)
            q = jac / factor
            assert np.abs(q @ q.T - np.eye(2)).max() < 1e-5

    def test_rejects_boundary_point(self):
        with pytest.raises(ValueError):
            geom.mobius_jacobian(np.array([0.1, 0.0]), np.array([1.0, 0.0]))


class TestHyperbolicReflection:
    def test_t0_coincides_with_origin_reflection(self):
        rng = np.random.default_rng(13)
        p = unit(0.9)
        h = Halfspace(p, 0.0, HYPERBOLIC)
        y = random_ball_points(rng, 30)
        assert_allclose(geom.hyp_reflect(h, y), geom.reflect_origin(p, y), atol=1e-14)

    def test_involution_100_random(self):
        rng = np.random.default_rng(14)
        for _ in range(100):
            h = Halfspace(unit(rng.uniform(0, 2 * np.pi)), rng.uniform(0, 0.8), HYPERBOLIC)
            y = random_ball_points(rng, 3)
            assert_allclose(geom.hyp_reflect(h, geom.hyp_reflect(h, y)), y, atol=1e-10)

    def test_conjugation_identity_100_random(self):
        # T_{R_p x} o R_p = R_p o T_x
        rng = np.random.default_rng(15)
        for _ in range(100):
            p = unit(rng.uniform(0, 2 * np.pi))
            x = random_ball_points(rng, 1, rmax=0.8)[0]
            y = random_ball_points(rng, 1, rmax=0.99)[0]
            lhs = geom.mobius(geom.reflect_origin(p, x), geom.reflect_origin(p, y))
            rhs = geom.reflect_origin(p, geom.mobius(x, y))
            assert_allclose(lhs, rhs, atol=1e-10)

    def test_hyperbolic_isometry(self):
        rng = np.random.default_rng(16)
        h = Halfspace(unit(0.3), 0.45, HYPERBOLIC)
        u = random_ball_points(rng, 40)
        v = random_ball_points(rng, 40)
        assert_allclose(
            hyp_metric_dist(geom.hyp_reflect(h, u), geom.hyp_reflect(h, v)),
            hyp_metric_dist(u, v),
            rtol=1e-10,
        )


class TestHyperbolicFold:
    def test_interior_point_fixed(self):
        h = Halfspace([1.0, 0.0], 0.4, HYPERBOLIC)
        y = np.array([-0.3, 0.1])
        assert geom.hyp_halfspace_side(h, y) < 0
        assert_allclose(geom.fold_hyp(h, y), y)

    def test_t0_reduces_to_origin_fold(self):
        rng = np.random.default_rng(17)
        p = unit(1.7)
        h = Halfspace(p, 0.0, HYPERBOLIC)
        y = random_ball_points(rng, 50)
        outside = (y @ p) > 0
        expected = y.copy()
        expected[outside] = geom.reflect_origin(p, y[outside])
        assert_allclose(geom.fold_hyp(h, y), expected, atol=1e-14)

    def test_idempotent_and_lands_in_halfspace(self):
        rng = np.random.default_rng(18)
        for _ in range(20):
            h = Halfspace(unit(rng.uniform(0, 2 * np.pi)), rng.uniform(0, 0.8), HYPERBOLIC)
            y = random_ball_points(rng, 20)
            once = geom.fold_hyp(h, y)
            assert_allclose(geom.fold_hyp(h, once), once, atol=1e-12)
            assert np.all(geom.hyp_halfspace_side(h, once) <= 1e-13)

    def test_fold_nonexpansive_in_hyperbolic_metric(self):
        rng = np.random.default_rng(19)
        h = Halfspace(unit(0.8), 0.3, HYPERBOLIC)
        u = random_ball_points(rng, 60)
        v = random_ball_points(rng, 60)
        du = hyp_metric_dist(geom.fold_hyp(h, u), geom.fold_hyp(h, v))
        assert np.all(du <= hyp_metric_dist(u, v) + 1e-10)


class TestWeightsAndDistance:
    def test_volume_weight_values(self):
        assert geom.hyp_volume_weight(0.0, 2) == 1.0
        assert_allclose(geom.hyp_volume_weight(0.5, 2), 16.0 / 9.0, rtol=1e-15)

    def test_volume_weight_rejects_boundary(self):
        with pytest.raises(ValueError):
            geom.hyp_volume_weight(1.0, 2)

    def test_weight_integral_over_disk(self):
        # oracle: 1-d quadrature of 2 pi r (1-r^2)^{-2}; closed form pi a^2/(1-a^2)
        a = 0.5
        quad_val, _ = integrate.quad(
            lambda r: 2 * np.pi * r * geom.hyp_volume_weight(r, 2), 0.0, a
        )
        closed = np.pi * a**2 / (1 - a**2)
        assert_allclose(quad_val, closed, rtol=1e-12)
        assert_allclose(geom.hyp_ball_volume(a), closed, rtol=1e-15)

    def test_ball_radius_for_volume_roundtrip(self):
        for a in (0.1, 0.45, 0.8):
            v = geom.hyp_ball_volume(a)
            assert_allclose(geom.hyp_ball_radius_for_volume(v), a, rtol=1e-14)

    def test_distance_values(self):
        assert geom.hyp_distance(0.0) == 0.0
        assert_allclose(geom.hyp_distance(np.tanh(1.0)), 1.0, rtol=1e-14)

    def test_distance_derivative(self):
        step = 1e-7
        for r in (0.1, 0.5, 0.8):
            fd = (geom.hyp_distance(r + step) - geom.hyp_distance(r - step)) / (2 * step)
            assert_allclose(fd, 1.0 / (1.0 - r * r), rtol=1e-6)

    def test_distance_rejects_boundary(self):
        with pytest.raises(ValueError):
            geom.hyp_distance(1.0)


class TestHalfspaceGeometry:
    def test_geodesic_circle_orthogonal_to_unit_circle(self):
        h = Halfspace(unit(0.6), 0.4, HYPERBOLIC)
        center, radius = geom.geodesic_boundary_circle(h)
        assert_allclose(center @ center, radius**2 + 1.0, rtol=1e-12)

    def test_geodesic_circle_passes_through_pt(self):
        p = unit(2.0)
        t = 0.55
        h = Halfspace(p, t, HYPERBOLIC)
        center, radius = geom.geodesic_boundary_circle(h)
        assert_allclose(np.linalg.norm(p * t - center), radius, rtol=1e-12)

    def test_side_function_matches_circle(self):
        rng = np.random.default_rng(21)
        h = Halfspace(unit(1.1), 0.5, HYPERBOLIC)
        center, radius = geom.geodesic_boundary_circle(h)
        y = random_ball_points(rng, 200)
        side = geom.hyp_halfspace_side(h, y)
        outside_circle = np.linalg.norm(y - center, axis=1) > radius
        assert np.array_equal(side < 0, outside_circle)

    def test_geodesic_disk_chart_image(self):
        x = np.array([0.3, 0.2])
        a = 0.4
        center, radius = geom.euclid_disk_of_geodesic_ball(x, a)
        # oracle: map many boundary points, all should be at distance radius
        theta = np.linspace(0, 2 * np.pi, 64, endpoint=False)
        circle = a * np.stack([np.cos(theta), np.sin(theta)], axis=1)
        image = geom.mobius(x, circle)
        assert_allclose(np.linalg.norm(image - center, axis=1), radius, rtol=1e-10)


class TestGeometryConfig:
    def test_curvature_fixed(self):
        euclid = geom.GeometryConfig(2)
        hyp = geom.GeometryConfig(2, HYPERBOLIC)
        assert euclid.curvature == 0.0
        assert hyp.curvature == -4.0

    def test_dimension_validated(self):
        with pytest.raises(ValueError):
            geom.GeometryConfig(1)
        with pytest.raises(ValueError):
            geom.GeometryConfig(2, "spherical")


class TestMobiusMapClass:
    def test_callable_and_inverse(self):
        rng = np.random.default_rng(22)
        t = MobiusMap(np.array([0.25, -0.4]))
        y = random_ball_points(rng, 10)
        assert_allclose(t.inverse(t(y)), y, atol=1e-12)
        assert_allclose(t.jacobian(y), geom.mobius_jacobian(t.center, y))

    def test_rejects_center_outside_ball(self):
        with pytest.raises(ValueError):
            MobiusMap(np.array([1.0, 0.2]))
