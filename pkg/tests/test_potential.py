import math

import numpy as np
import pytest

from uavtraj.core import Vec2, dot, norm
from uavtraj.errors import (
    DegenerateGradient,
    NoRealInterface,
    SumZero,
    ValidationError,
)
from uavtraj.potential import (
    BiPhaseMap,
    QuadraticPhase,
    circle_interface,
    interface_gradient,
    interface_points,
    interface_value,
    intensity_at,
    line_interface,
    make_biphase,
    make_equal_potential_interface,
    project_onto_interface,
    reduce_hotspots,
    traffic_intensity,
)


class TestQuadraticPhase:
    def test_omega_derivation(self):
        ph = QuadraticPhase(u0=-2.0, u1=0.0, center=Vec2(0, 0), k=0.5)
        assert ph.omega == pytest.approx(2.0)
        assert abs(ph.omega**2 * ph.k - abs(ph.u0)) <= 1e-12 * abs(ph.u0)

    def test_k_must_be_positive(self):
        with pytest.raises(ValidationError):
            QuadraticPhase(u0=-1.0, u1=0.0, center=Vec2(0, 0), k=0.0)

    def test_zero_curvature_needs_flag(self):
        with pytest.raises(ValidationError):
            QuadraticPhase(u0=0.0, u1=1.0, center=Vec2(0, 0), k=1.0)
        ph = QuadraticPhase(u0=0.0, u1=1.0, center=Vec2(0, 0), k=1.0, degenerate=True)
        assert ph.omega == 0.0
        with pytest.raises(ValidationError):
            QuadraticPhase(u0=1.0, u1=0.0, center=Vec2(0, 0), k=1.0, degenerate=True)


class TestTrafficIntensity:
    def test_at_center_only_offset_remains(self):
        ph = QuadraticPhase(u0=-2.0, u1=5.0, center=Vec2(0, 0), k=1.0)
        assert traffic_intensity(ph, Vec2(0, 0)) == 5.0

    def test_unit_offset(self):
        ph = QuadraticPhase(u0=2.0, u1=0.0, center=Vec2(1, 0), k=1.0)
        assert traffic_intensity(ph, Vec2(1, 1)) == 1.0

    def test_hot_spot_at_distance_five(self):
        # 1/2 * (-2) * 25, cross-checked by scalar arithmetic
        ph = QuadraticPhase(u0=-2.0, u1=0.0, center=Vec2(0, 0), k=1.0)
        d = math.hypot(3.0, 4.0)
        assert traffic_intensity(ph, Vec2(3, 4)) == pytest.approx(0.5 * -2.0 * d * d)
        assert traffic_intensity(ph, Vec2(3, 4)) == -25.0

    def test_vectorized_matches_scalar(self, rng):
        ph = QuadraticPhase(u0=1.3, u1=-0.4, center=Vec2(0.2, -0.7), k=2.0)
        pts = rng.normal(size=(40, 2))
        vec = intensity_at(ph, pts)
        for p, v in zip(pts, vec):
            assert v == pytest.approx(traffic_intensity(ph, Vec2(*p)), rel=1e-14)


class TestReduceHotspots:
    def test_symmetric_barycentre(self):
        red = reduce_hotspots([(1.0, Vec2(0, 0)), (1.0, Vec2(2, 0))], k=1.0)
        assert red.center == Vec2(1.0, 0.0)
        assert red.u0 == 2.0

    def test_single_term_identity(self):
        red = reduce_hotspots([(-3.0, Vec2(1, 1))], k=1.0)
        assert red.center == Vec2(1.0, 1.0)
        assert red.u0 == -3.0
        assert red.u1 == pytest.approx(0.0)

    def test_mixed_sign_barycentre(self):
        # zb = (1*0 + (-2)*3)/(-1) = 6
        red = reduce_hotspots([(1.0, Vec2(0, 0)), (-2.0, Vec2(3, 0))], k=1.0)
        assert red.center.x == pytest.approx(6.0)
        assert red.u0 == -1.0

    def test_zero_sum_rejected(self):
        with pytest.raises(SumZero):
            reduce_hotspots([(1.0, Vec2(0, 0)), (-1.0, Vec2(2, 0))], k=1.0)

    def test_reduction_preserves_intensity_everywhere(self, rng):
        for _ in range(5):
            terms = [
                (float(rng.uniform(-2, 2)), Vec2(*rng.uniform(-3, 3, 2)))
                for _ in range(rng.integers(1, 5))
            ]
            if abs(sum(u for u, _ in terms)) < 1e-3:
                continue
            red = reduce_hotspots(terms, k=1.0)
            for _ in range(100):
                z = Vec2(*rng.uniform(-5, 5, 2))
                direct = sum(0.5 * u * norm(z - zi) ** 2 for u, zi in terms)
                assert traffic_intensity(red, z) == pytest.approx(
                    direct, rel=1e-9, abs=1e-9
                )


class TestInterfaceGeometry:
    def test_point_on_line(self):
        iface = line_interface(Vec2(1, 0), 2.0)
        assert interface_value(iface, Vec2(2, 5)) == 2.0

    def test_circle_value_and_gradient(self):
        iface = circle_interface(Vec2(0, 0), 1.0)
        assert interface_value(iface, Vec2(0, 3)) == 3.0
        assert interface_gradient(iface, Vec2(0, 3)) == Vec2(0.0, 1.0)

    def test_oblique_line_value(self):
        iface = line_interface(Vec2(0.6, 0.8), 0.0)
        value = interface_value(iface, Vec2(1, 1))
        assert value == pytest.approx(1.4)
        # projection round-trip: removing the excess lands on the locus
        proj = project_onto_interface(iface, Vec2(1, 1))
        assert interface_value(iface, proj) == pytest.approx(0.0, abs=1e-12)
        assert norm(Vec2(1, 1) - proj) == pytest.approx(abs(value))

    def test_gradient_degenerate_at_circle_center(self):
        iface = circle_interface(Vec2(1, 1), 2.0)
        with pytest.raises(DegenerateGradient):
            interface_gradient(iface, Vec2(1, 1))
        with pytest.raises(DegenerateGradient):
            project_onto_interface(iface, Vec2(1, 1))

    def test_line_normal_is_normalized(self):
        iface = line_interface(Vec2(3, 4), 10.0)
        assert norm(iface.normal) == pytest.approx(1.0, abs=1e-12)
        assert iface.offset == pytest.approx(2.0)


class TestProjection:
    def test_axis_aligned_projection(self):
        iface = line_interface(Vec2(1, 0), 2.0)
        assert project_onto_interface(iface, Vec2(5, 7)) == Vec2(2.0, 7.0)

    def test_radial_scaling(self):
        iface = circle_interface(Vec2(0, 0), 2.0)
        proj = project_onto_interface(iface, Vec2(6, 8))
        assert proj.x == pytest.approx(1.2)
        assert proj.y == pytest.approx(1.6)

    def test_fixed_point_on_interface(self):
        iface = circle_interface(Vec2(1, 0), 2.0)
        on = Vec2(3.0, 0.0)
        assert project_onto_interface(iface, on) == on

    @pytest.mark.parametrize("kind", ["line", "circle"])
    def test_projection_is_nearest_point(self, kind, rng):
        if kind == "line":
            iface = line_interface(Vec2(*rng.normal(size=2)), float(rng.normal()))
        else:
            iface = circle_interface(Vec2(*rng.normal(size=2)), float(rng.uniform(0.5, 3)))
        for _ in range(10):
            b = Vec2(*rng.uniform(-5, 5, 2))
            proj = project_onto_interface(iface, b)
            d_best = norm(b - proj)
            for pt in interface_points(iface, 64, span=20.0):
                assert d_best <= norm(b - Vec2(*pt)) + 1e-12
            # surplus is parallel to the gradient
            g = interface_gradient(iface, proj)
            surplus = b - proj
            cross = surplus.x * g.y - surplus.y * g.x
            assert abs(cross) <= 1e-9 * (1.0 + norm(surplus))


class TestEqualPotentialInterface:
    def test_symmetric_hot_spots_give_bisector(self):
        p1 = QuadraticPhase(-1.0, 0.0, Vec2(0, 0), 1.0)
        p2 = QuadraticPhase(-1.0, 0.0, Vec2(4, 0), 1.0)
        iface = make_equal_potential_interface(p1, p2)
        assert iface.kind == "line"
        assert iface.normal == Vec2(1.0, 0.0)
        assert iface.offset == pytest.approx(2.0)

    def test_offset_shifts_the_line(self):
        # solving 1/2*(-1)*x^2 = 1/2*(-1)*(x-4)^2 - 8 by hand gives x = 4
        p1 = QuadraticPhase(-1.0, 0.0, Vec2(0, 0), 1.0)
        p2 = QuadraticPhase(-1.0, -8.0, Vec2(4, 0), 1.0)
        iface = make_equal_potential_interface(p1, p2)
        assert iface.kind == "line"
        assert iface.offset == pytest.approx(4.0)

    def test_identical_phases_rejected(self):
        p = QuadraticPhase(-1.0, 0.0, Vec2(0, 0), 1.0)
        with pytest.raises(NoRealInterface):
            make_equal_potential_interface(p, p)

    def test_distinct_curvatures_give_circle(self):
        p1 = QuadraticPhase(-2.0, 0.0, Vec2(0, 0), 1.0)
        p2 = QuadraticPhase(-1.0, 0.0, Vec2(4, 0), 1.0)
        iface = make_equal_potential_interface(p1, p2)
        assert iface.kind == "circle"
        for pt in interface_points(iface, 32):
            z = Vec2(*pt)
            v1, v2 = traffic_intensity(p1, z), traffic_intensity(p2, z)
            assert abs(v1 - v2) <= 1e-9 * (1.0 + abs(v1))

    def test_empty_locus_rejected(self):
        # concentric with different curvature and incompatible offsets
        p1 = QuadraticPhase(-2.0, 0.0, Vec2(0, 0), 1.0)
        p2 = QuadraticPhase(-1.0, 1.0, Vec2(0, 0), 1.0)
        with pytest.raises(NoRealInterface):
            make_equal_potential_interface(p1, p2)


class TestBiPhaseMap:
    def test_k_mismatch_rejected(self):
        p1 = QuadraticPhase(-1.0, 0.0, Vec2(0, 0), 1.0)
        p2 = QuadraticPhase(-1.0, 0.0, Vec2(4, 0), 2.0)
        with pytest.raises(ValidationError):
            BiPhaseMap(p1, p2, line_interface(Vec2(1, 0), 2.0))

    def test_region_rule_and_tie_break(self):
        p1 = QuadraticPhase(-1.0, 0.0, Vec2(0, 0), 1.0)
        p2 = QuadraticPhase(-1.0, 0.0, Vec2(4, 0), 1.0)
        m = make_biphase(p1, p2)
        assert m.region_of(Vec2(-1, 0)) == 1
        assert m.region_of(Vec2(5, 0)) == 2
        assert m.region_of(Vec2(2, 3)) == 1  # on the interface: region 1
        assert m.region_of(Vec2(2, 3), previous=2) == 2  # hysteresis keeps it

    def test_auto_orientation_swaps_phases(self):
        p1 = QuadraticPhase(-1.0, 0.0, Vec2(4, 0), 1.0)
        p2 = QuadraticPhase(-1.0, 0.0, Vec2(0, 0), 1.0)
        m = make_biphase(p1, p2)
        assert m.region_of(m.phase1.center) == 1
        assert m.region_of(m.phase2.center) == 2

    def test_equal_potential_along_derived_interface(self, rng):
        p1 = QuadraticPhase(-1.5, 0.3, Vec2(-1, 0.5), 1.0)
        p2 = QuadraticPhase(-0.7, -0.2, Vec2(3, -0.5), 1.0)
        m = make_biphase(p1, p2)
        for pt in interface_points(m.interface, 32):
            z = Vec2(*pt)
            v1 = traffic_intensity(m.phase1, z)
            v2 = traffic_intensity(m.phase2, z)
            assert abs(v1 - v2) <= 1e-9 * (1.0 + abs(v1))
