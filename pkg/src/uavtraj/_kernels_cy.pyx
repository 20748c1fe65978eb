# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled discrete-action kernels.

Same contracts as `_kernels_py`; see that module for the formulas. The
preconditioner solve is a Thomas sweep for tridiag(-1, 2, -1) scaled by k/dt,
with the forward-elimination coefficients computed once per factorization.
"""

import numpy as np

BACKEND_NAME = "cython"


def quad_action(double[:, ::1] pos, double dt, double k, double u0, double u1,
                double cx, double cy):
    cdef Py_ssize_t n = pos.shape[0] - 1
    cdef Py_ssize_t i
    cdef double kin = 0.0, pot = 0.0
    cdef double dx, dy, mx, my
    for i in range(n):
        dx = pos[i + 1, 0] - pos[i, 0]
        dy = pos[i + 1, 1] - pos[i, 1]
        kin += dx * dx + dy * dy
        mx = 0.5 * (pos[i + 1, 0] + pos[i, 0]) - cx
        my = 0.5 * (pos[i + 1, 1] + pos[i, 1]) - cy
        pot += mx * mx + my * my
    return 0.5 * k / dt * kin - dt * (0.5 * u0 * pot + u1 * n)


def quad_action_grad(double[:, ::1] pos, double dt, double k, double u0,
                     double u1, double cx, double cy):
    cdef Py_ssize_t n = pos.shape[0] - 1
    cdef Py_ssize_t i
    grad_arr = np.zeros((n + 1, 2), dtype=np.float64)
    cdef double[:, ::1] grad = grad_arr
    cdef double kin = 0.0, pot = 0.0
    cdef double dx, dy, mx, my, mx_prev = 0.0, my_prev = 0.0
    cdef double kdt = k / dt, half_dt_u0 = 0.5 * dt * u0
    for i in range(n):
        dx = pos[i + 1, 0] - pos[i, 0]
        dy = pos[i + 1, 1] - pos[i, 1]
        kin += dx * dx + dy * dy
        mx = 0.5 * (pos[i + 1, 0] + pos[i, 0]) - cx
        my = 0.5 * (pos[i + 1, 1] + pos[i, 1]) - cy
        pot += mx * mx + my * my
        if i > 0:
            grad[i, 0] = kdt * (2.0 * pos[i, 0] - pos[i - 1, 0] - pos[i + 1, 0]) \
                - half_dt_u0 * (mx_prev + mx)
            grad[i, 1] = kdt * (2.0 * pos[i, 1] - pos[i - 1, 1] - pos[i + 1, 1]) \
                - half_dt_u0 * (my_prev + my)
        mx_prev = mx
        my_prev = my
    return 0.5 * kdt * kin - dt * (0.5 * u0 * pot + u1 * n), grad_arr


def precond_factor(Py_ssize_t n_interior, double k, double dt):
    """Forward-elimination coefficients for tridiag(-1, 2, -1), plus k/dt."""
    cdef Py_ssize_t i
    cprime_arr = np.empty(n_interior, dtype=np.float64)
    cdef double[::1] cprime = cprime_arr
    cprime[0] = -0.5
    for i in range(1, n_interior):
        cprime[i] = -1.0 / (2.0 + cprime[i - 1])
    return (cprime_arr, k / dt)


def precond_solve(factor, rhs):
    cdef double[::1] cprime = factor[0]
    cdef double scale = factor[1]
    cdef double[:, ::1] b = np.ascontiguousarray(rhs, dtype=np.float64)
    cdef Py_ssize_t n = b.shape[0]
    cdef Py_ssize_t i, j
    out_arr = np.empty((n, 2), dtype=np.float64)
    cdef double[:, ::1] x = out_arr
    cdef double denom
    for j in range(2):
        x[0, j] = b[0, j] / (2.0 * scale)
        for i in range(1, n):
            denom = (2.0 + cprime[i - 1]) * scale
            x[i, j] = (b[i, j] + scale * x[i - 1, j]) / denom
        for i in range(n - 2, -1, -1):
            x[i, j] = x[i, j] - cprime[i] * x[i + 1, j]
    return out_arr
