import math

import numpy as np
import pytest

from uavtraj.closed_form import action_closed_form, plan_single_phase
from uavtraj.core import BoundaryConditions, TimeWindow, Vec2
from uavtraj.errors import ValidationError
from uavtraj.oracle import (
    DiscreteTrajectory,
    direct_optimize,
    discrete_action,
    discretize,
    euler_lagrange_residual,
)
from uavtraj.potential import QuadraticPhase

from conftest import random_scenario

UNIT_BC = BoundaryConditions(TimeWindow(0.0, 1.0), Vec2(0, 0), Vec2(1, 0))
HOT_SPOT = QuadraticPhase(u0=-1.0, u1=0.0, center=Vec2(0, 0), k=1.0)


def straight_line_grid(bc, n):
    times = np.linspace(bc.t0, bc.T, n + 1)
    fracs = np.linspace(0.0, 1.0, n + 1)[:, None]
    pos = bc.z0.as_array() + fracs * (bc.zT.as_array() - bc.z0.as_array())
    return DiscreteTrajectory(times=times, positions=pos)


class TestDiscreteAction:
    def test_constant_trajectory_in_flat_zero_potential(self):
        times = np.linspace(0.0, 1.0, 17)
        pos = np.tile([2.0, -1.0], (17, 1))
        traj = DiscreteTrajectory(times=times, positions=pos)
        assert discrete_action(traj, lambda z: 0.0, k=1.0) == 0.0

    @pytest.mark.parametrize("n", [8, 100, 999])
    def test_straight_line_free_particle_is_exact(self, n):
        traj = straight_line_grid(UNIT_BC, n)
        assert discrete_action(traj, lambda z: 0.0, k=1.0) == pytest.approx(0.5, abs=1e-12)

    def test_matches_closed_form_on_fine_grid(self):
        cb = action_closed_form(HOT_SPOT, UNIT_BC)
        sampled = discretize(plan_single_phase(HOT_SPOT, UNIT_BC), 10_000)
        gap = abs(discrete_action(sampled, HOT_SPOT, 1.0) - cb.action)
        assert gap <= 1e-4 * (1.0 + abs(cb.action))

    def test_callable_and_phase_agree(self, rng):
        phase = QuadraticPhase(u0=-1.3, u1=0.4, center=Vec2(0.3, -0.2), k=1.0)
        sampled = discretize(plan_single_phase(phase, UNIT_BC), 64)
        via_phase = discrete_action(sampled, phase, 1.0)
        via_callable = discrete_action(
            sampled, lambda z: 0.5 * -1.3 * ((z.x - 0.3) ** 2 + (z.y + 0.2) ** 2) + 0.4, 1.0
        )
        assert via_phase == pytest.approx(via_callable, rel=1e-12)

    def test_quadrature_error_is_second_order(self, rng):
        errs_n, errs_2n = [], []
        for _ in range(10):
            phase, bc = random_scenario(rng, "hyperbolic")
            cb = action_closed_form(phase, bc)
            traj = plan_single_phase(phase, bc)
            errs_n.append(abs(discrete_action(discretize(traj, 256), phase, phase.k) - cb.action))
            errs_2n.append(abs(discrete_action(discretize(traj, 512), phase, phase.k) - cb.action))
        ratio = np.mean(errs_n) / np.mean(errs_2n)
        assert 3.0 <= ratio <= 5.0

    def test_grid_validation(self):
        with pytest.raises(ValidationError):
            DiscreteTrajectory(times=np.linspace(0, 1, 5), positions=np.zeros((5, 2)))
        with pytest.raises(ValidationError):
            DiscreteTrajectory(
                times=np.array([0.0, 0.1, 0.3, 0.35, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0]),
                positions=np.zeros((10, 2)),
            )


class TestDirectOptimize:
    def test_free_particle_keeps_straight_line(self):
        result = direct_optimize(lambda z: 0.0, 1.0, UNIT_BC, n=32)
        line = straight_line_grid(UNIT_BC, 32)
        assert np.max(np.abs(result.positions - line.positions)) == 0.0
        assert result.converged

    def test_matches_closed_form_hot_spot(self):
        result = direct_optimize(HOT_SPOT, 1.0, UNIT_BC, n=2000)
        assert result.converged
        reference = plan_single_phase(HOT_SPOT, UNIT_BC).positions(result.times)
        deviation = np.max(np.hypot(*(result.positions - reference).T))
        assert deviation <= 1e-3

    def test_bends_toward_high_traffic(self):
        # intensity is the reward: paths bend toward a hot spot and away from
        # a hole (elliptic arcs are convex around an attractive center)
        toward_center = np.array([0.0, 1.0])  # perpendicular to the chord
        straight_mid = np.array([0.5, 0.0])
        hot = QuadraticPhase(u0=-1.0, u1=0.0, center=Vec2(0.5, 0.4), k=1.0)
        mid_hot = direct_optimize(hot, 1.0, UNIT_BC, n=200).positions[100]
        assert float((mid_hot - straight_mid) @ toward_center) > 1e-3
        hole = QuadraticPhase(u0=1.0, u1=0.0, center=Vec2(0.5, 0.4), k=1.0)
        mid_hole = direct_optimize(hole, 1.0, UNIT_BC, n=200).positions[100]
        assert float((mid_hole - straight_mid) @ toward_center) < -1e-3

    def test_endpoints_stay_pinned(self, rng):
        phase, bc = random_scenario(rng, "hyperbolic")
        result = direct_optimize(phase, phase.k, bc, n=64)
        assert np.allclose(result.positions[0], bc.z0.as_array(), atol=0)
        assert np.allclose(result.positions[-1], bc.zT.as_array(), atol=0)

    def test_max_iters_reported_on_partial_result(self):
        result = direct_optimize(HOT_SPOT, 1.0, UNIT_BC, n=256, max_iters=1)
        assert not result.converged
        assert result.iterations == 1

    def test_deterministic(self):
        a = direct_optimize(HOT_SPOT, 1.0, UNIT_BC, n=128)
        b = direct_optimize(HOT_SPOT, 1.0, UNIT_BC, n=128)
        assert np.array_equal(a.positions, b.positions)

    def test_plain_descent_agrees_with_preconditioned(self):
        plain = direct_optimize(HOT_SPOT, 1.0, UNIT_BC, n=48, precondition=False, max_iters=50_000)
        fast = direct_optimize(HOT_SPOT, 1.0, UNIT_BC, n=48)
        assert plain.converged and fast.converged
        assert np.max(np.abs(plain.positions - fast.positions)) <= 1e-4

    def test_small_grid_rejected(self):
        with pytest.raises(ValidationError):
            direct_optimize(HOT_SPOT, 1.0, UNIT_BC, n=4)


class TestEulerLagrangeResidual:
    def test_sampled_closed_form_is_second_order_small(self):
        sampled = discretize(plan_single_phase(HOT_SPOT, UNIT_BC), 1000)
        assert euler_lagrange_residual(sampled, HOT_SPOT) <= 1e-3

    def test_straight_line_is_detected_as_non_solution(self):
        phase = QuadraticPhase(u0=-2.0, u1=0.0, center=Vec2(0.5, 1.0), k=1.0)
        line = straight_line_grid(UNIT_BC, 200)
        # the center sits 1.0 off the chord; residual must stay macroscopic
        min_distance = np.min(np.hypot(*(line.positions - phase.center.as_array()).T))
        assert euler_lagrange_residual(line, phase) >= 0.1 * abs(phase.u0) * min_distance

    def test_oracle_output_close_to_sampled_truth(self):
        # N kept where the O(dt^2) sampling residual dominates the stopping
        # tolerance of the descent, so the ratio is meaningful
        n = 100
        optimized = direct_optimize(HOT_SPOT, 1.0, UNIT_BC, n=n)
        sampled = discretize(plan_single_phase(HOT_SPOT, UNIT_BC), n)
        r_opt = euler_lagrange_residual(optimized, HOT_SPOT)
        r_ref = euler_lagrange_residual(sampled, HOT_SPOT)
        assert r_opt <= 10.0 * max(r_ref, 1e-12)
