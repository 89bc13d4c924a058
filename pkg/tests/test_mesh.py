import numpy as np
import pytest
from numpy.testing import assert_allclose

from specshape.errors import InvalidDomainError
from specshape.geom import EUCLIDEAN, HYPERBOLIC, hyp_ball_volume
from specshape.mesh import (
    TRI_QP,
    TRI_QW,
    DiskPrimitive,
    DomainSpec,
    GeodesicDiskPrimitive,
    PolygonPrimitive,
    build_mesh,
)


def unit_disk_spec(h=0.05):
    return DomainSpec(EUCLIDEAN, [DiskPrimitive((0.0, 0.0), 1.0)], h)


def square_spec(h=0.1):
    L = np.sqrt(2.0 * np.pi)
    poly = PolygonPrimitive(((0, 0), (L, 0), (L, L), (0, L)))
    return DomainSpec(EUCLIDEAN, [poly], h)


class TestQuadratureRule:
    def test_exact_on_reference_monomials(self):
        # oracle: int over reference triangle of x^a y^b = a! b! / (a+b+2)!
        from math import factorial

        ref = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        pts = TRI_QP @ ref
        for a in range(5):
            for b in range(5 - a):
                exact = factorial(a) * factorial(b) / factorial(a + b + 2)
                approx = 0.5 * np.sum(TRI_QW * pts[:, 0] ** a * pts[:, 1] ** b)
                assert abs(approx - exact) < 1e-15

    def test_weights_sum_to_one(self):
        assert abs(TRI_QW.sum() - 1.0) < 1e-14


class TestBuildMesh:
    def test_unit_disk_area(self):
        m = build_mesh(unit_disk_spec(0.05))
        assert abs(m.area() - np.pi) / np.pi < 0.002
        assert m.max_diameter() <= 0.05

    def test_two_disjoint_disks_components(self):
        spec = DomainSpec(
            EUCLIDEAN,
            [DiskPrimitive((-1.3, 0.0), 1.0), DiskPrimitive((1.3, 0.0), 1.0)],
            0.1,
        )
        m = build_mesh(spec)
        assert sorted(set(m.component_labels.tolist())) == [0, 1]

    def test_square_area_exact(self):
        m = build_mesh(square_spec())
        assert abs(m.area() - 2.0 * np.pi) < 1e-10

    def test_l_shape_nonconvex(self):
        poly = PolygonPrimitive(((0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)))
        m = build_mesh(DomainSpec(EUCLIDEAN, [poly], 0.1))
        assert abs(m.area() - 3.0) < 1e-10
        m.validate()

    def test_mesh_quality(self):
        m = build_mesh(unit_disk_spec(0.1))
        assert m.min_angle() >= 25.0

    def test_self_intersecting_polygon_rejected(self):
        with pytest.raises(InvalidDomainError):
            PolygonPrimitive(((0, 0), (1, 1), (1, 0), (0, 1)))

    def test_empty_spec_rejected(self):
        with pytest.raises(InvalidDomainError):
            DomainSpec(EUCLIDEAN, [], 0.1)

    def test_overlapping_union_rejected(self):
        spec = DomainSpec(
            EUCLIDEAN,
            [DiskPrimitive((0.0, 0.0), 1.0), DiskPrimitive((1.0, 0.0), 1.0)],
            0.1,
        )
        with pytest.raises(InvalidDomainError):
            build_mesh(spec)

    def test_tangent_union_rejected(self):
        spec = DomainSpec(
            EUCLIDEAN,
            [DiskPrimitive((0.0, 0.0), 1.0), DiskPrimitive((2.001, 0.0), 1.0)],
            0.1,
        )
        with pytest.raises(InvalidDomainError):
            build_mesh(spec)

    def test_hyperbolic_domain_must_stay_interior(self):
        spec = DomainSpec(HYPERBOLIC, [DiskPrimitive((0.5, 0.0), 0.52)], 0.05)
        with pytest.raises(InvalidDomainError):
            build_mesh(spec)

    def test_boundary_vertices_on_circle(self):
        m = build_mesh(unit_disk_spec(0.1))
        on_boundary = m.vertex_primitive >= 0
        radii = np.linalg.norm(m.vertices[on_boundary], axis=1)
        assert_allclose(radii, 1.0, atol=1e-10)


class TestIntegrate:
    def test_constant_over_disk(self):
        m = build_mesh(unit_disk_spec(0.05))
        assert abs(m.integrate(None) - np.pi) / np.pi < 0.002

    def test_hyperbolic_volume_weight(self):
        spec = DomainSpec(HYPERBOLIC, [DiskPrimitive((0.0, 0.0), 0.5)], 0.03)
        m = build_mesh(spec)
        exact = np.pi / 3.0  # pi a^2 / (1 - a^2) at a = 1/2
        assert abs(m.volume("hyp_volume") - exact) / exact < 0.002

    def test_odd_function_vanishes(self):
        m = build_mesh(unit_disk_spec(0.08))
        val = m.integrate(lambda p: p[:, 0] ** 3)
        assert abs(val) < 1e-10

    def test_geodesic_disk_volume_invariance(self):
        # Mobius-placed geodesic ball has the closed-form centered volume
        a = 0.4
        spec = DomainSpec(HYPERBOLIC, [GeodesicDiskPrimitive((0.3, 0.1), a)], 0.03)
        m = build_mesh(spec)
        exact = hyp_ball_volume(a)
        assert abs(m.volume("hyp_volume") - exact) / exact < 0.005

    def test_weight_requires_interior(self):
        m = build_mesh(unit_disk_spec(0.1))  # reaches |x| = 1
        with pytest.raises(InvalidDomainError):
            m.integrate(None, weight="hyp_volume")


class TestRefine:
    def test_triangle_count_quadruples(self):
        m = build_mesh(unit_disk_spec(0.15))
        assert m.refine().num_triangles == 4 * m.num_triangles

    def test_disk_area_error_drops(self):
        m = build_mesh(unit_disk_spec(0.15))
        e0 = abs(m.area() - np.pi)
        e1 = abs(m.refine().area() - np.pi)
        assert e0 / e1 >= 3.0

    def test_conformity_preserved(self):
        m = build_mesh(square_spec(0.3)).refine().refine()
        m.validate()

    def test_convergence_slope(self):
        m = build_mesh(unit_disk_spec(0.2))
        errs, hs = [], []
        for i in range(4):
            errs.append(abs(m.area() - np.pi))
            hs.append(m.max_diameter())
            if i < 3:
                m = m.refine()
        slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
        assert slope >= 1.8

    def test_component_labels_inherited(self):
        spec = DomainSpec(
            EUCLIDEAN,
            [DiskPrimitive((-1.3, 0.0), 1.0), DiskPrimitive((1.3, 0.0), 1.0)],
            0.15,
        )
        m = build_mesh(spec).refine()
        assert len(set(m.component_labels.tolist())) == 2


class TestTransforms:
    def test_translation_preserves_area(self):
        m = build_mesh(unit_disk_spec(0.1))
        m2 = m.translated([0.5, -0.25])
        assert_allclose(m2.area(), m.area(), rtol=1e-14)

    def test_scaling_area(self):
        m = build_mesh(unit_disk_spec(0.1))
        assert_allclose(m.scaled(2.0).area(), 4.0 * m.area(), rtol=1e-12)

    def test_mobius_preserves_hyperbolic_volume(self):
        spec = DomainSpec(HYPERBOLIC, [DiskPrimitive((0.0, 0.0), 0.4)], 0.02)
        m = build_mesh(spec)
        m2 = m.mobius_transformed(np.array([0.25, -0.1]))
        v1 = m.volume("hyp_volume")
        v2 = m2.volume("hyp_volume")
        assert abs(v1 - v2) / v1 < 0.005
        # primitive tracked exactly: boundary vertices still on the image circle
        prim = m2.primitives[0]
        on_b = m2.vertex_primitive >= 0
        d = np.linalg.norm(m2.vertices[on_b] - np.asarray(prim.center), axis=1)
        assert_allclose(d, prim.radius, atol=1e-10)


class TestSpecSerialization:
    def test_json_roundtrip(self, tmp_path):
        spec = DomainSpec(
            HYPERBOLIC,
            [
                GeodesicDiskPrimitive((0.2, 0.0), 0.35),
                DiskPrimitive((-0.4, 0.1), 0.2),
            ],
            0.04,
            name="pair",
        )
        path = tmp_path / "spec.json"
        spec.to_json(path)
        back = DomainSpec.from_json(path)
        assert back.to_dict() == spec.to_dict()

    def test_export_text(self, tmp_path):
        m = build_mesh(unit_disk_spec(0.2))
        path = tmp_path / "mesh.txt"
        m.export_text(path)
        lines = path.read_text().splitlines()
        assert lines[0] == f"vertices {m.num_vertices}"
