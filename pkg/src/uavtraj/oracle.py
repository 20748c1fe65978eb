"""Direct-method oracle: discretize-then-optimize verification of the
closed-form planners.

The oracle lives entirely outside the planning path. It evaluates the
discrete action of a sampled trajectory (forward-difference velocities,
midpoint potential) and minimizes it over the interior nodes with the
endpoints pinned, starting from the straight line. The minimization is a
deterministic descent with Armijo backtracking; by default the gradient is
preconditioned with the kinetic block of the Hessian (a tridiagonal solve),
which keeps the iteration count flat in the grid size. `precondition=False`
gives textbook gradient descent for cross-checks on small grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from . import kernels
from .core import BoundaryConditions, Vec2
from .errors import ValidationError
from .potential import QuadraticPhase, intensity_at

PotentialLike = Union[QuadraticPhase, Callable[[Vec2], float]]

#: relative gradient-norm stopping threshold for direct_optimize
GRAD_TOL = 1e-6


@dataclass
class DiscreteTrajectory:
    """Uniform time grid t0..T with N intervals and the node positions.

    `converged`/`iterations` report how the trajectory was produced (a freshly
    sampled trajectory is trivially "converged").
    """

    times: np.ndarray
    positions: np.ndarray
    converged: bool = True
    iterations: int = 0
    grad_norm: float = field(default=0.0, repr=False)

    def __post_init__(self) -> None:
        n = len(self.times) - 1
        if n < 8:
            raise ValidationError(f"discrete grid needs N >= 8 intervals, got {n}")
        steps = np.diff(self.times)
        if np.any(steps <= 0) or np.ptp(steps) > 1e-9 * steps[0]:
            raise ValidationError("discrete grid must be uniform and increasing")

    @property
    def n_intervals(self) -> int:
        return len(self.times) - 1

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])


def discretize(traj, n: int) -> DiscreteTrajectory:
    """Sample any trajectory object exposing positions(times) on an N-interval
    uniform grid over its own window."""
    times = np.linspace(traj.t0, traj.T, n + 1)
    return DiscreteTrajectory(times=times, positions=traj.positions(times))


def _potential_values(potential_at: PotentialLike, points: np.ndarray) -> np.ndarray:
    if isinstance(potential_at, QuadraticPhase):
        return intensity_at(potential_at, points)
    try:
        vals = potential_at(points)
        arr = np.asarray(vals, dtype=float)
        if arr.shape == (len(points),):
            return arr
    except Exception:
        pass
    return np.array([float(potential_at(Vec2(float(p[0]), float(p[1])))) for p in points])


def _potential_gradients(
    potential_at: PotentialLike,
    points: np.ndarray,
    potential_grad: Optional[Callable[[Vec2], Vec2]],
) -> np.ndarray:
    if isinstance(potential_at, QuadraticPhase):
        return potential_at.u0 * (points - potential_at.center.as_array())
    if potential_grad is not None:
        return np.array(
            [potential_grad(Vec2(float(p[0]), float(p[1]))).as_array() for p in points]
        )
    # black-box potential: central finite differences
    h = 1e-6 * (1.0 + float(np.max(np.abs(points))))
    grads = np.empty_like(points)
    for axis in range(2):
        shift = np.zeros(2)
        shift[axis] = h
        grads[:, axis] = (
            _potential_values(potential_at, points + shift)
            - _potential_values(potential_at, points - shift)
        ) / (2.0 * h)
    return grads


def discrete_action(traj: DiscreteTrajectory, potential_at: PotentialLike, k: float) -> float:
    """sum_i dt*[k/2*||(z_{i+1}-z_i)/dt||^2 - u(midpoint_i)]."""
    pos = traj.positions
    dt = traj.dt
    if isinstance(potential_at, QuadraticPhase):
        ph = potential_at
        return kernels.quad_action(
            np.ascontiguousarray(pos), dt, k, ph.u0, ph.u1, ph.center.x, ph.center.y
        )
    dz = np.diff(pos, axis=0)
    kinetic = 0.5 * k / dt * float(np.einsum("ij,ij->", dz, dz))
    mid = 0.5 * (pos[1:] + pos[:-1])
    return kinetic - dt * float(np.sum(_potential_values(potential_at, mid)))


def _generic_action_grad(
    pos: np.ndarray,
    dt: float,
    k: float,
    potential_at: PotentialLike,
    potential_grad,
) -> tuple[float, np.ndarray]:
    dz = np.diff(pos, axis=0)
    kinetic = 0.5 * k / dt * float(np.einsum("ij,ij->", dz, dz))
    mid = 0.5 * (pos[1:] + pos[:-1])
    action = kinetic - dt * float(np.sum(_potential_values(potential_at, mid)))
    gu = _potential_gradients(potential_at, mid, potential_grad)
    grad = np.zeros_like(pos)
    grad[1:-1] = (k / dt) * (2.0 * pos[1:-1] - pos[:-2] - pos[2:])
    grad[1:-1] -= 0.5 * dt * (gu[:-1] + gu[1:])
    return action, grad


def direct_optimize(
    potential_at: PotentialLike,
    k: float,
    bc: BoundaryConditions,
    n: int,
    max_iters: int = 1000,
    potential_grad: Optional[Callable[[Vec2], Vec2]] = None,
    precondition: bool = True,
    gtol: float = GRAD_TOL,
) -> DiscreteTrajectory:
    """Minimize the discrete action over interior nodes; endpoints stay pinned.

    Deterministic: straight-line initialization, no randomness. Stops when the
    gradient norm falls below gtol*(1+|action|); if max_iters is hit first the
    partial result is returned with converged=False.
    """
    if n < 8:
        raise ValidationError(f"direct_optimize needs N >= 8, got {n}")
    times = np.linspace(bc.t0, bc.T, n + 1)
    dt = bc.duration / n
    fracs = np.linspace(0.0, 1.0, n + 1)[:, None]
    pos = np.ascontiguousarray(
        bc.z0.as_array() + fracs * (bc.zT.as_array() - bc.z0.as_array())
    )

    if isinstance(potential_at, QuadraticPhase):
        ph = potential_at
        if ph.k != k:
            raise ValidationError("phase.k disagrees with the k argument")

        def action_grad(p):
            return kernels.quad_action_grad(p, dt, k, ph.u0, ph.u1, ph.center.x, ph.center.y)

        def action_only(p):
            return kernels.quad_action(p, dt, k, ph.u0, ph.u1, ph.center.x, ph.center.y)

        lip_bound = 4.0 * k / dt + abs(ph.u0) * dt
    else:

        def action_grad(p):
            return _generic_action_grad(p, dt, k, potential_at, potential_grad)

        def action_only(p):
            tmp = DiscreteTrajectory(times=times, positions=p)
            return discrete_action(tmp, potential_at, k)

        lip_bound = 8.0 * k / dt

    factor = kernels.precond_factor(n - 1, k, dt) if precondition else None
    converged = False
    iterations = 0
    grad_norm = math.inf
    for iterations in range(1, max_iters + 1):
        action, grad = action_grad(pos)
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm <= gtol * (1.0 + abs(action)):
            converged = True
            break
        g_int = grad[1:-1]
        if precondition:
            direction = -kernels.precond_solve(factor, np.ascontiguousarray(g_int))
            alpha = 1.0
        else:
            direction = -g_int
            alpha = 1.0 / lip_bound
        slope = float(np.einsum("ij,ij->", g_int, direction))
        if slope >= 0:
            break  # not a descent direction (indefinite action); give up
        trial = pos.copy()
        accepted = False
        while alpha > 1e-16:
            trial[1:-1] = pos[1:-1] + alpha * direction
            if action_only(trial) <= action + 1e-4 * alpha * slope:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            break
        pos[1:-1] = trial[1:-1]
    return DiscreteTrajectory(
        times=times,
        positions=pos,
        converged=converged,
        iterations=iterations,
        grad_norm=grad_norm,
    )


def euler_lagrange_residual(samples: DiscreteTrajectory, phase: QuadraticPhase) -> float:
    """Max interior residual of k*z'' + u0*(z - center) = 0 on the grid,
    using second differences. Small for sampled optimal trajectories of the
    phase, bounded away from zero for anything else."""
    pos = samples.positions
    dt = samples.dt
    second = (pos[:-2] - 2.0 * pos[1:-1] + pos[2:]) / (dt * dt)
    residual = phase.k * second + phase.u0 * (pos[1:-1] - phase.center.as_array())
    return float(np.max(np.hypot(residual[:, 0], residual[:, 1])))
