"""Alternating optimization of the interface crossing for a two-hot-spot map.

For a time-independent bi-phase map whose optimal trajectory crosses the
interface once, the crossing time tau and location xi fully determine the
trajectory: each leg is the closed-form optimum of its own region. At a
stationary crossing three conditions hold: the Hamiltonians of the two legs
agree at the crossing (energy is conserved across the interface, the tau
condition), the jump in impulsion is normal to the interface (tangential
impulsion conservation, the xi condition), and xi lies on the interface.

The optimizer alternates two phases. The tau phase walks tau by fixed steps
of delta_tau in the descent direction sign(H1 - H2); it ends when the
Hamiltonian gap flips sign (the optimum is bracketed by the last step), when
a step stops reducing the cost, when the step hits the window clamp, or when
the gap is exactly zero. With `refine_tau` a sign-bisection then polishes tau
inside the bracketing step, which is what lets the stationarity residuals
reach desk-scale tolerances; without it tau stays quantized to delta_tau.
The xi phase jumps straight to the projection of the point B onto the
interface: at fixed tau the cost is exactly k*h/2*||xi - B||^2 plus terms
independent of xi, so the projection is the exact constrained minimizer.
The loop stops at an alternation boundary once a full tau+xi cycle changes
the cost by at most eps_S (or nothing moved at all), or at max_iters.

Every accepted update keeps the cost non-increasing up to eps_S, so the cost
history decreases monotonically from the initial trajectory's estimate to
the final crossing cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .closed_form import (
    ClosedFormTrajectory,
    action_closed_form,
    hamiltonian,
    plan_single_phase,
)
from .core import BoundaryConditions, TimeWindow, Vec2, dot, norm
from .errors import (
    HorizonOverflow,
    NonDecreasingCost,
    NotHyperbolic,
    SingleCrossingViolated,
    ValidationError,
)
from .mpc import SampledTrajectory
from .potential import (
    BiPhaseMap,
    QuadraticPhase,
    interface_gradient,
    interface_value,
    interface_values,
    project_onto_interface,
)

#: samples used to count interface crossings of a candidate trajectory
CROSSING_SAMPLES = 1000
#: stationarity tolerances (scale-relative) for the converged flag
DEFAULT_TOL_H = 1e-4
DEFAULT_TOL_P = 1e-4


@dataclass(frozen=True)
class AoaParams:
    """Loop controls. Fields left as None are resolved against the scenario:
    delta_tau = (T-t0)/200, eps_tau = delta_tau/2, eps_xi = 1e-6 * scene
    scale, eps_S = 1e-8 * |initial cost|."""

    delta_tau: Optional[float] = None
    eps_tau: Optional[float] = None
    eps_xi: Optional[float] = None
    eps_S: Optional[float] = None
    max_iters: int = 10_000
    refine_tau: bool = True
    tol_h: float = DEFAULT_TOL_H
    tol_p: float = DEFAULT_TOL_P

    def __post_init__(self) -> None:
        for name in ("delta_tau", "eps_tau", "eps_xi", "eps_S"):
            value = getattr(self, name)
            if value is not None and not value > 0:
                raise ValidationError(f"{name} must be > 0, got {value}")
        if self.max_iters < 1:
            raise ValidationError("max_iters must be >= 1")


@dataclass(frozen=True)
class _Resolved:
    delta_tau: float
    eps_tau: float
    eps_xi: float
    eps_S: float
    max_iters: int
    refine_tau: bool
    tol_h: float
    tol_p: float


def _resolve_params(
    params: AoaParams, traffic_map: BiPhaseMap, bc: BoundaryConditions, s_init: float
) -> _Resolved:
    scene = max(
        1.0,
        norm(bc.z0),
        norm(bc.zT),
        norm(traffic_map.phase1.center),
        norm(traffic_map.phase2.center),
    )
    delta_tau = params.delta_tau if params.delta_tau is not None else bc.duration / 200.0
    return _Resolved(
        delta_tau=delta_tau,
        eps_tau=params.eps_tau if params.eps_tau is not None else delta_tau / 2.0,
        eps_xi=params.eps_xi if params.eps_xi is not None else 1e-6 * scene,
        eps_S=params.eps_S if params.eps_S is not None else 1e-8 * max(abs(s_init), 1.0),
        max_iters=params.max_iters,
        refine_tau=params.refine_tau,
        tol_h=params.tol_h,
        tol_p=params.tol_p,
    )


@dataclass(frozen=True)
class CrossingState:
    """Crossing diagnostics: time tau, location xi on the interface, the
    least-squares multiplier mu of the interface constraint, the Hamiltonian
    gap H1-H2 and the tangential impulsion residual ||p- - p+ - mu*grad f||."""

    tau: float
    xi: Vec2
    mu: float
    gap_H: float
    residual_p: float


@dataclass(frozen=True)
class AoaResult:
    crossing: CrossingState
    leg1: ClosedFormTrajectory
    leg2: ClosedFormTrajectory
    cost_leg1: float
    cost_leg2: float
    cost_history: list[float]
    iterations: int
    converged: bool

    @property
    def total_cost(self) -> float:
        return self.cost_leg1 + self.cost_leg2


def _leg_phases(
    traffic_map: BiPhaseMap, bc: BoundaryConditions
) -> tuple[QuadraticPhase, QuadraticPhase]:
    """Phases governing the first and second leg (by endpoint region)."""
    r0 = traffic_map.region_of(bc.z0)
    rT = traffic_map.region_of(bc.zT)
    if r0 == rT:
        raise SingleCrossingViolated(
            f"endpoints lie in the same region ({r0}); no crossing to optimize"
        )
    return traffic_map.phase_of_region(r0), traffic_map.phase_of_region(rT)


def plan_legs(
    traffic_map: BiPhaseMap, bc: BoundaryConditions, tau: float, xi: Vec2
) -> tuple[ClosedFormTrajectory, ClosedFormTrajectory]:
    """Closed-form legs (t0,z0)->(tau,xi) and (tau,xi)->(T,zT)."""
    if not bc.t0 < tau < bc.T:
        raise ValidationError(f"tau must lie strictly inside ({bc.t0}, {bc.T}), got {tau}")
    p_start, p_end = _leg_phases(traffic_map, bc)
    leg1 = plan_single_phase(p_start, BoundaryConditions(TimeWindow(bc.t0, tau), bc.z0, xi))
    leg2 = plan_single_phase(p_end, BoundaryConditions(TimeWindow(tau, bc.T), xi, bc.zT))
    return leg1, leg2


def crossing_impulsions(
    traffic_map: BiPhaseMap, bc: BoundaryConditions, tau: float, xi: Vec2
) -> tuple[Vec2, Vec2]:
    """Impulsions just before (leg-1 arrival) and just after (leg-2 departure)
    the crossing: p = k * leg velocity at tau."""
    leg1, leg2 = plan_legs(traffic_map, bc, tau, xi)
    return _impulsions_from_legs(traffic_map.k, leg1, leg2, tau)


def _impulsions_from_legs(
    k: float, leg1: ClosedFormTrajectory, leg2: ClosedFormTrajectory, tau: float
) -> tuple[Vec2, Vec2]:
    p_minus = Vec2.from_array(k * leg1.velocities([tau])[0])
    p_plus = Vec2.from_array(k * leg2.velocities([tau])[0])
    return p_minus, p_plus


def hamiltonian_gap(
    traffic_map: BiPhaseMap, bc: BoundaryConditions, tau: float, xi: Vec2
) -> float:
    """H1 - H2 across the crossing; equals -dS/dtau at fixed xi."""
    leg1, leg2 = plan_legs(traffic_map, bc, tau, xi)
    return _gap_from_legs(traffic_map.k, leg1, leg2, tau, xi)


def _gap_from_legs(
    k: float,
    leg1: ClosedFormTrajectory,
    leg2: ClosedFormTrajectory,
    tau: float,
    xi: Vec2,
) -> float:
    p_minus, p_plus = _impulsions_from_legs(k, leg1, leg2, tau)
    return hamiltonian(leg1.phase, xi, p_minus) - hamiltonian(leg2.phase, xi, p_plus)


def compute_B_and_h(
    traffic_map: BiPhaseMap, bc: BoundaryConditions, tau: float
) -> tuple[Vec2, float]:
    """Scalar Hessian h and point B of the crossing cost as a function of xi:
    grad_xi(S1+S2) = k*h*(xi - B). Both legs must be hot spots (u0 < 0)."""
    p_start, p_end = _leg_phases(traffic_map, bc)
    if not (p_start.u0 < 0 and p_end.u0 < 0):
        raise NotHyperbolic("crossing-location update requires u0 < 0 in both regions")
    if not bc.t0 < tau < bc.T:
        raise ValidationError(f"tau must lie strictly inside ({bc.t0}, {bc.T}), got {tau}")
    w1, w2 = p_start.omega, p_end.omega
    d1, d2 = tau - bc.t0, bc.T - tau
    if w1 * d1 > 700.0 or w2 * d2 > 700.0:
        raise HorizonOverflow("leg horizon exceeds the sinh overflow guard")
    coth1, coth2 = 1.0 / math.tanh(w1 * d1), 1.0 / math.tanh(w2 * d2)
    h = w1 * coth1 + w2 * coth2
    c1, c2 = p_start.center.as_array(), p_end.center.as_array()
    b = (
        w1 * coth1 * c1
        + w2 * coth2 * c2
        + w1 * (bc.z0.as_array() - c1) / math.sinh(w1 * d1)
        + w2 * (bc.zT.as_array() - c2) / math.sinh(w2 * d2)
    ) / h
    return Vec2.from_array(b), h


def total_crossing_cost(
    traffic_map: BiPhaseMap, bc: BoundaryConditions, tau: float, xi: Vec2
) -> float:
    """S1 + S2 of the two closed-form legs through (tau, xi)."""
    leg1, leg2 = plan_legs(traffic_map, bc, tau, xi)
    return (
        action_closed_form(leg1.phase, leg1.bc).action
        + action_closed_form(leg2.phase, leg2.bc).action
    )


def count_crossings(values: np.ndarray, level: float) -> int:
    """Number of sign changes of (values - level), ignoring exact zeros."""
    signs = np.sign(np.asarray(values) - level)
    signs = signs[signs != 0]
    if len(signs) < 2:
        return 0
    return int(np.count_nonzero(signs[:-1] * signs[1:] < 0))


def extract_crossing(init: SampledTrajectory, traffic_map: BiPhaseMap) -> tuple[float, Vec2]:
    """First interface crossing of a sampled trajectory, linearly
    interpolated, the location snapped onto the interface."""
    iface = traffic_map.interface
    values = interface_values(iface, init.positions)
    n_cross = count_crossings(values, iface.level)
    if n_cross != 1:
        raise SingleCrossingViolated(
            f"initial trajectory crosses the interface {n_cross} times, need exactly 1"
        )
    g = values - iface.level
    signs = np.sign(g)
    nz = np.nonzero(signs)[0]
    flip = np.nonzero(signs[nz][:-1] * signs[nz][1:] < 0)[0][0]
    i0, i1 = nz[flip], nz[flip + 1]
    theta = g[i0] / (g[i0] - g[i1])
    tau = float(init.times[i0] + theta * (init.times[i1] - init.times[i0]))
    raw = init.positions[i0] + theta * (init.positions[i1] - init.positions[i0])
    return tau, project_onto_interface(iface, Vec2.from_array(raw))


def _check_single_crossing(
    traffic_map: BiPhaseMap,
    bc: BoundaryConditions,
    leg1: ClosedFormTrajectory,
    leg2: ClosedFormTrajectory,
    tau: float,
) -> None:
    ts = np.linspace(bc.t0, bc.T, CROSSING_SAMPLES)
    pos = np.empty((len(ts), 2))
    before = ts <= tau
    if np.any(before):
        pos[before] = leg1.positions(ts[before])
    if np.any(~before):
        pos[~before] = leg2.positions(ts[~before])
    iface = traffic_map.interface
    n = count_crossings(interface_values(iface, pos), iface.level)
    if n != 1:
        raise SingleCrossingViolated(
            f"candidate trajectory crosses the interface {n} times at tau={tau}"
        )


def _crossing_state(
    traffic_map: BiPhaseMap,
    tau: float,
    xi: Vec2,
    leg1: ClosedFormTrajectory,
    leg2: ClosedFormTrajectory,
) -> tuple[CrossingState, float, float]:
    """Diagnostics plus the scales (|H|, |p|) used by the converged flag."""
    p_minus, p_plus = _impulsions_from_legs(traffic_map.k, leg1, leg2, tau)
    h1 = hamiltonian(leg1.phase, xi, p_minus)
    h2 = hamiltonian(leg2.phase, xi, p_plus)
    grad_f = interface_gradient(traffic_map.interface, xi)
    dp = p_minus - p_plus
    mu = dot(dp, grad_f) / dot(grad_f, grad_f)
    residual = dp - grad_f * mu
    state = CrossingState(tau=tau, xi=xi, mu=mu, gap_H=h1 - h2, residual_p=norm(residual))
    return state, max(abs(h1), abs(h2)), max(norm(p_minus), norm(p_plus))


def aoa_optimize(
    traffic_map: BiPhaseMap,
    bc: BoundaryConditions,
    init: SampledTrajectory,
    params: AoaParams = AoaParams(),
) -> AoaResult:
    """Alternating optimization of (tau, xi) starting from a sampled initial
    trajectory (normally an MPC run) that crosses the interface exactly once."""
    p_start, p_end = _leg_phases(traffic_map, bc)
    if not (p_start.u0 < 0 and p_end.u0 < 0):
        raise NotHyperbolic("alternating optimization requires hot spots (u0 < 0) on both sides")

    rp = _resolve_params(params, traffic_map, bc, init.action_estimate)
    tau_lo, tau_hi = bc.t0 + rp.delta_tau, bc.T - rp.delta_tau
    tau, xi = extract_crossing(init, traffic_map)
    tau = min(max(tau, tau_lo), tau_hi)

    def replan(t: float, x: Vec2, check: bool = True):
        leg1, leg2 = plan_legs(traffic_map, bc, t, x)
        if check:
            _check_single_crossing(traffic_map, bc, leg1, leg2, t)
        s1 = action_closed_form(leg1.phase, leg1.bc).action
        s2 = action_closed_form(leg2.phase, leg2.bc).action
        return leg1, leg2, s1, s2

    history = [float(init.action_estimate)]
    leg1, leg2, s1, s2 = replan(tau, xi)
    s_cur = s1 + s2
    history.append(s_cur)
    iterations = 1

    in_tau_phase = True
    last_accept_sign = 0.0
    cycle_start_s = s_cur
    moved_this_cycle = False

    def bisect_gap(lo: float, hi: float) -> float:
        """Sign-bisection of the Hamiltonian gap on [lo, hi] at fixed xi."""
        gap_lo = hamiltonian_gap(traffic_map, bc, lo, xi)
        gap_hi = hamiltonian_gap(traffic_map, bc, hi, xi)
        if gap_lo == 0.0:
            return lo
        if gap_hi == 0.0 or gap_lo * gap_hi > 0:
            return hi if abs(gap_hi) < abs(gap_lo) else lo
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            gap_mid = hamiltonian_gap(traffic_map, bc, mid, xi)
            if gap_mid == 0.0:
                return mid
            if gap_mid * gap_lo > 0:
                lo, gap_lo = mid, gap_mid
            else:
                hi, gap_hi = mid, gap_mid
        return 0.5 * (lo + hi)

    def end_tau_phase(bracket: Optional[tuple[float, float]]) -> None:
        nonlocal tau, leg1, leg2, s1, s2, s_cur, in_tau_phase, moved_this_cycle
        if rp.refine_tau and bracket is not None:
            lo = max(min(bracket), tau_lo)
            hi = min(max(bracket), tau_hi)
            if hi > lo:
                tau_ref = bisect_gap(lo, hi)
                l1, l2, r1, r2 = replan(tau_ref, xi)
                if r1 + r2 <= s_cur + rp.eps_S:
                    if tau_ref != tau:
                        moved_this_cycle = True
                    tau, leg1, leg2, s1, s2 = tau_ref, l1, l2, r1, r2
                    s_cur = s1 + s2
        in_tau_phase = False

    while iterations < rp.max_iters:
        if in_tau_phase:
            gap = _gap_from_legs(traffic_map.k, leg1, leg2, tau, xi)
            sign = math.copysign(1.0, gap) if gap != 0 else 0.0
            if sign == 0.0:
                history.append(s_cur)
                iterations += 1
                end_tau_phase((tau - rp.delta_tau, tau + rp.delta_tau))
                continue
            if last_accept_sign and sign == -last_accept_sign:
                # gap flipped after an accepted step: optimum is bracketed
                history.append(s_cur)
                iterations += 1
                end_tau_phase((tau - last_accept_sign * rp.delta_tau, tau))
                continue
            tau_cand = min(max(tau + sign * rp.delta_tau, tau_lo), tau_hi)
            if tau_cand == tau:
                history.append(s_cur)
                iterations += 1
                end_tau_phase(None)
                continue
            l1, l2, c1, c2 = replan(tau_cand, xi)
            s_cand = c1 + c2
            iterations += 1
            if s_cand <= s_cur + rp.eps_S:
                tau, leg1, leg2, s1, s2, s_cur = tau_cand, l1, l2, c1, c2, s_cand
                history.append(s_cur)
                moved_this_cycle = True
                last_accept_sign = sign
                if tau in (tau_lo, tau_hi):
                    end_tau_phase(None)
            else:
                history.append(s_cur)
                end_tau_phase((tau, tau + sign * rp.delta_tau))
        else:
            b, _h = compute_B_and_h(traffic_map, bc, tau)
            xi_new = project_onto_interface(traffic_map.interface, b)
            move = norm(xi_new - xi)
            l1, l2, c1, c2 = replan(tau, xi_new)
            s_new = c1 + c2
            iterations += 1
            if s_new > s_cur + rp.eps_S:
                raise NonDecreasingCost(
                    f"crossing-location jump increased the cost from {s_cur} to {s_new}"
                )
            xi, leg1, leg2, s1, s2, s_cur = xi_new, l1, l2, c1, c2, s_new
            history.append(s_cur)
            if move >= rp.eps_xi:
                moved_this_cycle = True
            else:
                # alternation boundary: a full tau+xi cycle has completed
                in_tau_phase = True
                last_accept_sign = 0.0
                if abs(cycle_start_s - s_cur) <= rp.eps_S or not moved_this_cycle:
                    break
                cycle_start_s = s_cur
                moved_this_cycle = False

    state, h_scale, p_scale = _crossing_state(traffic_map, tau, xi, leg1, leg2)
    iface = traffic_map.interface
    on_interface = abs(interface_value(iface, xi) - iface.level) <= 1e-9 * (1.0 + abs(iface.level))
    converged = (
        abs(state.gap_H) <= rp.tol_h * (1.0 + h_scale)
        and state.residual_p <= rp.tol_p * (1.0 + p_scale)
        and on_interface
    )
    return AoaResult(
        crossing=state,
        leg1=leg1,
        leg2=leg2,
        cost_leg1=s1,
        cost_leg2=s2,
        cost_history=history,
        iterations=iterations,
        converged=converged,
    )
