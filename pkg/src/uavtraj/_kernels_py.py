"""NumPy implementations of the discrete-action kernels.

These are the fallback used when the compiled extension is unavailable (or
disabled via UAVTRAJ_PURE_PYTHON=1). Semantics must match `_kernels_cy`
bit-for-bit up to floating-point reassociation; `tests/test_kernels.py`
cross-checks the two backends.

The discrete action of a polyline z_0..z_N on the uniform grid with step dt is

    sum_i dt * [ k/2 * ||(z_{i+1}-z_i)/dt||^2 - u((z_i+z_{i+1})/2) ]

with the quadratic intensity u(z) = u0/2*||z-c||^2 + u1. The preconditioner
is the kinetic block (k/dt)*tridiag(-1, 2, -1) over interior nodes, applied
per coordinate.
"""

from __future__ import annotations

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

BACKEND_NAME = "python"


def quad_action(pos: np.ndarray, dt: float, k: float, u0: float, u1: float,
                cx: float, cy: float) -> float:
    dz = np.diff(pos, axis=0)
    kinetic = 0.5 * k / dt * float(np.einsum("ij,ij->", dz, dz))
    mid = 0.5 * (pos[1:] + pos[:-1]) - np.array([cx, cy])
    potential = dt * (0.5 * u0 * float(np.einsum("ij,ij->", mid, mid)) + u1 * len(mid))
    return kinetic - potential


def quad_action_grad(pos: np.ndarray, dt: float, k: float, u0: float, u1: float,
                     cx: float, cy: float) -> tuple[float, np.ndarray]:
    """Action and its gradient w.r.t. interior nodes (endpoint rows are 0)."""
    dz = np.diff(pos, axis=0)
    kinetic = 0.5 * k / dt * float(np.einsum("ij,ij->", dz, dz))
    mid = 0.5 * (pos[1:] + pos[:-1]) - np.array([cx, cy])
    potential = dt * (0.5 * u0 * float(np.einsum("ij,ij->", mid, mid)) + u1 * len(mid))
    grad = np.zeros_like(pos)
    # kinetic part: (k/dt) * (2*z_i - z_{i-1} - z_{i+1})
    grad[1:-1] = (k / dt) * (2.0 * pos[1:-1] - pos[:-2] - pos[2:])
    # potential part: -dt/2 * (grad_u(mid_{i-1}) + grad_u(mid_i)), grad_u(m) = u0*m
    grad[1:-1] -= 0.5 * dt * u0 * (mid[:-1] + mid[1:])
    return kinetic - potential, grad


def precond_factor(n_interior: int, k: float, dt: float):
    """Cholesky factor of the kinetic-block preconditioner."""
    ab = np.zeros((2, n_interior))
    ab[0, 1:] = -k / dt
    ab[1, :] = 2.0 * k / dt
    return cholesky_banded(ab, lower=False)


def precond_solve(factor, rhs: np.ndarray) -> np.ndarray:
    """Solve P x = rhs for an (n, 2) right-hand side."""
    return cho_solve_banded((factor, False), rhs)
