import math

import numpy as np
import pytest

from uavtraj.core import BoundaryConditions, TimeWindow, Vec2
from uavtraj.potential import QuadraticPhase, interface_points, make_biphase


def random_vec(rng, scale=1.5):
    return Vec2(float(rng.uniform(-scale, scale)), float(rng.uniform(-scale, scale)))


def random_scenario(rng, regime, max_omega_dt=2.5):
    """Random (phase, bc) pair with the horizon kept away from conjugate
    points and overflow: omega*(T-t0) <= max_omega_dt and not within 0.05 of
    a multiple of pi in the oscillatory regime."""
    k = float(rng.uniform(0.5, 2.0))
    duration = float(rng.uniform(0.5, 2.0))
    while True:
        mag = float(rng.uniform(0.2, (max_omega_dt / duration) ** 2 * k))
        if regime == "hyperbolic":
            u0 = -mag
        elif regime == "trigonometric":
            u0 = mag
        else:
            u0 = 0.0
        phase = QuadraticPhase(
            u0=u0,
            u1=float(rng.uniform(-1.0, 1.0)),
            center=random_vec(rng),
            k=k,
            degenerate=(regime == "linear"),
        )
        arg = phase.omega * duration
        if regime != "trigonometric" or abs(math.sin(arg)) > 0.05:
            break
    t0 = float(rng.uniform(-1.0, 1.0))
    bc = BoundaryConditions(
        window=TimeWindow(t0, t0 + duration),
        z0=random_vec(rng),
        zT=random_vec(rng),
    )
    return phase, bc


def random_crossing_setup(rng):
    """Random two-hot-spot map with endpoints straddling the interface plus a
    feasible crossing state (tau strictly inside, xi on the interface)."""
    while True:
        k = float(rng.uniform(0.5, 2.0))
        c1 = Vec2(float(rng.uniform(-1.5, -0.5)), float(rng.uniform(-0.5, 0.5)))
        c2 = Vec2(float(rng.uniform(1.5, 3.0)), float(rng.uniform(-0.5, 0.5)))
        u01 = float(rng.uniform(-2.0, -0.3))
        # half the draws share the curvature (line interface), half do not
        u02 = u01 if rng.random() < 0.5 else float(rng.uniform(-2.0, -0.3))
        p1 = QuadraticPhase(u01, float(rng.uniform(-0.5, 0.5)), c1, k)
        p2 = QuadraticPhase(u02, float(rng.uniform(-0.5, 0.5)), c2, k)
        try:
            traffic_map = make_biphase(p1, p2)
        except Exception:
            continue
        z0 = c1 + Vec2(float(rng.uniform(-0.8, 0.2)), float(rng.uniform(-0.5, 0.5)))
        zT = c2 + Vec2(float(rng.uniform(-0.2, 0.8)), float(rng.uniform(-0.5, 0.5)))
        if traffic_map.region_of(z0) != 1 or traffic_map.region_of(zT) != 2:
            continue
        duration = float(rng.uniform(1.5, 4.0))
        bc = BoundaryConditions(TimeWindow(0.0, duration), z0, zT)
        if max(p1.omega, p2.omega) * duration > 20:
            continue
        tau = float(rng.uniform(0.2, 0.8)) * duration
        pts = interface_points(traffic_map.interface, 64, span=4.0)
        xi = Vec2(*pts[rng.integers(0, len(pts))])
        if math.hypot(xi.x, xi.y) > 6.0:
            continue
        return traffic_map, bc, tau, xi


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
