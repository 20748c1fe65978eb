"""Closed-form optimal trajectories for one quadratic region.

Minimizing the running cost k/2*||v||^2 - u(z) between fixed endpoints gives
the boundary-value problem  k*z'' = -u0*(z - center). In coordinates centered
on the region's center the solution is a sinh/cosh combination when u0 < 0
(hot spot, repulsive), a sin/cos combination when u0 > 0 (traffic hole,
attractive, valid only away from conjugate points where sin(omega*(T-t0))
vanishes), and a straight line when u0 = 0. The accumulated cost has a
matching closed form; the constant offset u1 only contributes -u1*(T-t0).

Everything here is pure and deterministic; trajectories are immutable
descriptors evaluable at any time in their window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import BoundaryConditions, Vec2
from .errors import ConjugatePoint, HorizonOverflow, OutOfWindow, PlannerError
from .potential import QuadraticPhase, traffic_intensity

HYPERBOLIC = "hyperbolic"
TRIGONOMETRIC = "trigonometric"
LINEAR = "linear"

#: sinh/cosh arguments beyond this overflow double precision.
MAX_HYPERBOLIC_ARG = 700.0
#: |sin(omega*(T-t0))| at or below this counts as a conjugate point.
CONJUGATE_SIN_TOL = 1e-9


@dataclass(frozen=True)
class ClosedFormTrajectory:
    """Analytic optimal trajectory for one phase and one set of endpoints."""

    regime: str
    phase: QuadraticPhase
    bc: BoundaryConditions

    @property
    def t0(self) -> float:
        return self.bc.t0

    @property
    def T(self) -> float:
        return self.bc.T

    def _centered(self) -> tuple[np.ndarray, np.ndarray]:
        c = self.phase.center.as_array()
        return self.bc.z0.as_array() - c, self.bc.zT.as_array() - c

    def _check_window(self, t: np.ndarray) -> None:
        slack = 1e-9 * (1.0 + self.bc.duration)
        if np.min(t) < self.t0 - slack or np.max(t) > self.T + slack:
            raise OutOfWindow(
                f"t outside [{self.t0}, {self.T}]: [{np.min(t)}, {np.max(t)}]"
            )

    def positions(self, times) -> np.ndarray:
        """Positions at an array of times, shape (n, 2)."""
        t = np.atleast_1d(np.asarray(times, dtype=float))
        self._check_window(t)
        t = np.clip(t, self.t0, self.T)
        a0, aT = self._centered()
        w = self.phase.omega
        if self.regime == LINEAR:
            frac = ((t - self.t0) / self.bc.duration)[:, None]
            cen = a0 + frac * (aT - a0)
        elif self.regime == HYPERBOLIC:
            denom = math.sinh(w * self.bc.duration)
            cen = (
                np.sinh(w * (t - self.t0))[:, None] * aT
                + np.sinh(w * (self.T - t))[:, None] * a0
            ) / denom
        else:
            denom = math.sin(w * self.bc.duration)
            cen = (
                np.sin(w * (t - self.t0))[:, None] * aT
                + np.sin(w * (self.T - t))[:, None] * a0
            ) / denom
        return cen + self.phase.center.as_array()

    def velocities(self, times) -> np.ndarray:
        """Velocities at an array of times, shape (n, 2)."""
        t = np.atleast_1d(np.asarray(times, dtype=float))
        self._check_window(t)
        t = np.clip(t, self.t0, self.T)
        a0, aT = self._centered()
        w = self.phase.omega
        if self.regime == LINEAR:
            v = (aT - a0) / self.bc.duration
            return np.broadcast_to(v, (len(t), 2)).copy()
        if self.regime == HYPERBOLIC:
            denom = math.sinh(w * self.bc.duration)
            return (
                w
                * (
                    np.cosh(w * (t - self.t0))[:, None] * aT
                    - np.cosh(w * (self.T - t))[:, None] * a0
                )
                / denom
            )
        denom = math.sin(w * self.bc.duration)
        return (
            w
            * (
                np.cos(w * (t - self.t0))[:, None] * aT
                - np.cos(w * (self.T - t))[:, None] * a0
            )
            / denom
        )


@dataclass(frozen=True)
class CostBreakdown:
    """action = kinetic_integral - potential_integral; the -u1*(T-t0) part of
    the potential integral is reported separately as terminal_constant."""

    action: float
    kinetic_integral: float
    potential_integral: float
    terminal_constant: float


def _regime_of(phase: QuadraticPhase) -> str:
    if phase.u0 < 0:
        return HYPERBOLIC
    if phase.u0 > 0:
        return TRIGONOMETRIC
    return LINEAR


def _check_regime(phase: QuadraticPhase, bc: BoundaryConditions) -> str:
    regime = _regime_of(phase)
    arg = phase.omega * bc.duration
    if regime == HYPERBOLIC and arg > MAX_HYPERBOLIC_ARG:
        raise HorizonOverflow(
            f"omega*(T-t0) = {arg:.3g} exceeds the overflow guard {MAX_HYPERBOLIC_ARG}"
        )
    if regime == TRIGONOMETRIC and abs(math.sin(arg)) <= CONJUGATE_SIN_TOL:
        raise ConjugatePoint(
            f"sin(omega*(T-t0)) = {math.sin(arg):.3g} vanishes; horizon hits a conjugate point"
        )
    return regime


def plan_single_phase(phase: QuadraticPhase, bc: BoundaryConditions) -> ClosedFormTrajectory:
    """Optimal trajectory of one quadratic region between fixed endpoints."""
    regime = _check_regime(phase, bc)
    return ClosedFormTrajectory(regime=regime, phase=phase, bc=bc)


def eval_position(traj: ClosedFormTrajectory, t: float) -> Vec2:
    return Vec2.from_array(traj.positions([t])[0])


def eval_velocity(traj: ClosedFormTrajectory, t: float) -> Vec2:
    return Vec2.from_array(traj.velocities([t])[0])


def impulsion(phase: QuadraticPhase, a: Vec2) -> Vec2:
    """Momentum analogue p = k*a (gradient of the running cost in velocity)."""
    return a * phase.k


def hamiltonian(phase: QuadraticPhase, z: Vec2, p: Vec2) -> float:
    """||p||^2/(2k) + u(z); conserved along optimal trajectories."""
    return (p.x * p.x + p.y * p.y) / (2.0 * phase.k) + traffic_intensity(phase, z)


def action_closed_form(phase: QuadraticPhase, bc: BoundaryConditions) -> CostBreakdown:
    """Minimal accumulated cost between the endpoints, split into its kinetic
    and potential integrals.

    The pure centered action has the boundary closed form
    1/2*(p(T).zt - p(t0).z0) (the running cost is 2-homogeneous in centered
    position and velocity); the split uses that the energy
    k/2*||v||^2 + u0/2*||z-c||^2 is constant along the trajectory. Both the
    direct formula and the boundary form are computed and cross-checked.
    """
    regime = _check_regime(phase, bc)
    traj = ClosedFormTrajectory(regime=regime, phase=phase, bc=bc)
    c = phase.center.as_array()
    a0 = bc.z0.as_array() - c
    aT = bc.zT.as_array() - c
    n0 = float(a0 @ a0)
    nT = float(aT @ aT)
    d0T = float(a0 @ aT)
    k = phase.k
    w = phase.omega
    dt = bc.duration
    arg = w * dt

    if regime == LINEAR:
        diff = aT - a0
        s_pure = k * float(diff @ diff) / (2.0 * dt)
    elif regime == HYPERBOLIC:
        # coth/cosech form avoids denormal products at large arguments
        s_pure = 0.5 * k * w * ((n0 + nT) / math.tanh(arg) - 2.0 * d0T / math.sinh(arg))
    else:
        s_pure = 0.5 * k * w * ((n0 + nT) * math.cos(arg) - 2.0 * d0T) / math.sin(arg)

    v0 = traj.velocities([bc.t0])[0]
    vT = traj.velocities([bc.T])[0]
    boundary_form = 0.5 * k * (float(vT @ aT) - float(v0 @ a0))
    if abs(boundary_form - s_pure) > 1e-6 * (1.0 + abs(s_pure)):
        raise PlannerError(
            f"action closed form {s_pure} disagrees with boundary form {boundary_form}"
        )

    energy = 0.5 * k * float(v0 @ v0) + 0.5 * phase.u0 * n0
    kinetic = 0.5 * (s_pure + energy * dt)
    potential_pure = 0.5 * (energy * dt - s_pure)
    terminal_constant = -phase.u1 * dt
    return CostBreakdown(
        action=s_pure + terminal_constant,
        kinetic_integral=kinetic,
        potential_integral=potential_pure + phase.u1 * dt,
        terminal_constant=terminal_constant,
    )
