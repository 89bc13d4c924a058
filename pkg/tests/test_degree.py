import numpy as np
import pytest

from specshape import degree as deg
from specshape.errors import PreconditionError, PropertyViolation


def normalized_map(m, field):
    def evaluator(pts):
        raw = field(pts)
        return raw / np.linalg.norm(raw, axis=1, keepdims=True)

    return deg.SphereMap(m, evaluator)


def random_smooth_map(m, rng, amp=0.6):
    """Random smooth sphere map (no symmetry constraint) for cross-oracle tests."""
    dim = m + 1
    const = amp * rng.normal(size=dim)
    lin = np.eye(dim) + amp * rng.normal(size=(dim, dim)) * 0.5
    return normalized_map(m, lambda pts: pts @ lin.T + const)


class TestWinding:
    def test_identity(self):
        assert deg.winding_number(deg.identity_map(1)).degree == 1

    def test_negation_degree_one(self):
        # antipodal on S^1 has degree (-1)^{m+1} = 1 for odd m
        assert deg.winding_number(deg.antipodal_map(1)).degree == 1

    def test_reflection_of_basis_vector(self):
        # p -> R_p(e1) equals -p^2 conj(e1) in complex notation: winding 2
        def field(p):
            return np.stack([1 - 2 * p[:, 0] ** 2, -2 * p[:, 0] * p[:, 1]], axis=1)

        result = deg.winding_number(deg.SphereMap(1, field))
        assert result.degree == 2
        # brute-force angle accumulation oracle on a dense grid
        thetas = np.linspace(0, 2 * np.pi, 20001)
        img = field(deg.circle_points(thetas))
        ang = np.unwrap(np.arctan2(img[:, 1], img[:, 0]))
        assert abs((ang[-1] - ang[0]) / (2 * np.pi) - 2.0) < 1e-6

    def test_higher_winding(self):
        def field(p):
            z = p[:, 0] + 1j * p[:, 1]
            w = z**3
            return np.stack([w.real, w.imag], axis=1)

        assert deg.winding_number(deg.SphereMap(1, field)).degree == 3

    def test_residual_reported(self):
        res = deg.winding_number(deg.identity_map(1))
        assert res.residual < 1e-10
        assert res.reliable


class TestJacobianDegree:
    def test_identity(self):
        assert deg.degree_jacobian(deg.identity_map(2)).degree == 1

    def test_constant_map_zero(self):
        assert deg.degree_jacobian(deg.constant_map(2)).degree == 0

    def test_antipodal_minus_one(self):
        # J[N] = (-1)^{m+1} = -1 for even m
        res = deg.degree_jacobian(deg.antipodal_map(2))
        assert res.degree == -1
        assert res.residual < 1e-10

    def test_rotation_degree_one(self):
        rot = deg.SphereMap(2, lambda p: p[:, [1, 2, 0]], name="cyclic rotation")
        assert deg.degree_jacobian(rot).degree == 1


class TestPreimageDegree:
    def test_identity_single_preimage(self):
        res = deg.degree_preimage(deg.identity_map(2))
        assert res.degree == 1

    def test_antipodal(self):
        assert deg.degree_preimage(deg.antipodal_map(2)).degree == -1

    def test_identity_circle(self):
        assert deg.degree_preimage(deg.identity_map(1)).degree == 1

    def test_cross_oracle_agreement(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            sphere_map = random_smooth_map(2, rng)
            d_jac = deg.degree_jacobian(sphere_map).degree
            d_pre = deg.degree_preimage(sphere_map, rng=rng).degree
            assert d_jac == d_pre

    def test_cross_oracle_circle(self):
        rng = np.random.default_rng(12)
        for _ in range(10):
            sphere_map = random_smooth_map(1, rng)
            d_wind = deg.winding_number(sphere_map).degree
            d_pre = deg.degree_preimage(sphere_map, rng=rng).degree
            assert d_wind == d_pre


class TestReflectionSymmetry:
    def test_identity_zero_defect(self):
        assert deg.check_reflection_symmetry(deg.identity_map(1)) < 1e-12
        assert deg.check_reflection_symmetry(deg.identity_map(2)) < 1e-12

    def test_negation_zero_defect(self):
        assert deg.check_reflection_symmetry(deg.antipodal_map(1)) < 1e-12

    def test_constant_positive_defect(self):
        assert deg.check_reflection_symmetry(deg.constant_map(1)) > 0.5

    def test_normal_component_even(self):
        # phi(p) . p must equal phi(-p) . (-p) for symmetric maps
        rng = np.random.default_rng(13)
        sphere_map = deg.random_symmetric_map(2, rng)
        pts = deg.icosphere(3)[0]
        normal = np.sum(sphere_map(pts) * pts, axis=1)
        normal_anti = np.sum(sphere_map(-pts) * (-pts), axis=1)
        assert np.abs(normal - normal_anti).max() < 1e-8


class TestSymmetricDegreeTheorem:
    def test_identity_s1(self):
        rep = deg.verify_symmetric_degree(deg.identity_map(1))
        assert rep["degree"] == 1

    def test_negation_s1(self):
        rep = deg.verify_symmetric_degree(deg.antipodal_map(1))
        assert rep["degree"] == 1

    def test_constant_rejected(self):
        with pytest.raises(PreconditionError):
            deg.verify_symmetric_degree(deg.constant_map(1))

    def test_generator_defect_tiny(self):
        rng = np.random.default_rng(21)
        for m in (1, 2):
            for _ in range(10):
                sphere_map = deg.random_symmetric_map(m, rng)
                assert deg.check_reflection_symmetry(sphere_map) < 1e-10

    def test_fifty_random_circle_maps(self):
        rng = np.random.default_rng(1234)
        for _ in range(50):
            rep = deg.verify_symmetric_degree(deg.random_symmetric_map(1, rng))
            assert rep["degree"] == 1

    def test_fifty_random_sphere_maps(self):
        rng = np.random.default_rng(4321)
        for _ in range(50):
            rep = deg.verify_symmetric_degree(deg.random_symmetric_map(2, rng))
            assert rep["degree"] % 2 == 1 or rep["degree"] % 2 == -1


class TestHomotopyLemma:
    def test_identity(self):
        assert deg.homotopy_degree(deg.identity_map(1)).degree == 1
        assert deg.homotopy_degree(deg.identity_map(2)).degree == 1

    def test_negation_even_sphere(self):
        assert deg.homotopy_degree(deg.antipodal_map(2)).degree == -1

    def test_tangent_perturbation_circle(self):
        def field(p):
            return p + 0.3 * np.stack([-p[:, 1], p[:, 0]], axis=1)

        result = deg.homotopy_degree(normalized_map(1, field))
        assert result.degree == 1

    def test_mixed_signs_rejected(self):
        def field(p):
            # pushes toward +e1 strongly: normal component changes sign
            out = np.tile(np.array([1.0, 0.0]), (len(p), 1)) + 0.2 * p
            return out

        with pytest.raises(PreconditionError):
            deg.homotopy_degree(normalized_map(1, field))

    def test_homotopy_invariance_along_normalization(self):
        # degree is constant along Phi(p, t) = (phi(p) - t p)/|phi(p) - t p|
        rng = np.random.default_rng(31)
        sphere_map = random_smooth_map(2, rng)
        base = deg.degree_jacobian(sphere_map).degree
        for t in np.linspace(0.0, 0.8, 5):
            def homotoped(pts, t=t):
                raw = sphere_map(pts) - t * pts
                return raw / np.linalg.norm(raw, axis=1, keepdims=True)

            assert deg.degree_jacobian(deg.SphereMap(2, homotoped)).degree == base


class TestSphereMapValidation:
    def test_off_sphere_output_flagged(self):
        bad = deg.SphereMap(1, lambda p: 1.5 * p)
        with pytest.raises(PropertyViolation):
            bad(np.array([[1.0, 0.0]]))

    def test_bad_dimension_rejected(self):
        with pytest.raises(ValueError):
            deg.SphereMap(3, lambda p: p)
