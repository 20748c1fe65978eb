"""Online receding-horizon planner for multi-phase maps.

At every step the region of the current position is frozen for the whole
remaining horizon, the single-region closed form to (T, zT) is planned, and
the position advances to that plan's value one step later. On a one-region
map this reproduces the closed form exactly; on multi-region maps it is a
cheap online heuristic with no optimality guarantee. The final step lands on
zT exactly (the remaining-horizon plan already ends there; snapping removes
the last O(dt) residue).

Maps may be given as a constant `BiPhaseMap` or as a callable t -> BiPhaseMap
for time-varying landscapes; this package only ships time-independent maps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .closed_form import plan_single_phase
from .core import BoundaryConditions, TimeWindow, Vec2
from .errors import StalledOnInterface, ValidationError
from .potential import BiPhaseMap, traffic_intensity

MapLike = Union[BiPhaseMap, Callable[[float], BiPhaseMap]]

#: consecutive near-zero steps with region flips tolerated before giving up
STALL_STEP_LIMIT = 10
STALL_DISPLACEMENT = 1e-9


@dataclass(frozen=True)
class MpcParams:
    dt: float
    region_hysteresis: bool = True

    def validate(self, bc: BoundaryConditions) -> None:
        if not 0 < self.dt < bc.duration / 2:
            raise ValidationError(
                f"mpc dt must satisfy 0 < dt < (T-t0)/2, got dt={self.dt}"
            )


@dataclass
class SampledTrajectory:
    """Discrete trace of an online run: strictly increasing times from t0 to
    T, positions/velocities/region ids per sample, and a trapezoid estimate
    of the accumulated cost using the region-local intensity."""

    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    region_ids: np.ndarray
    action_estimate: float


def _detect_stall(flipped: bool, displacement: float, counter: int) -> int:
    """Update the consecutive-stalled-step counter."""
    if flipped and displacement < STALL_DISPLACEMENT:
        return counter + 1
    return 0


def mpc_plan(traffic_map: MapLike, bc: BoundaryConditions, params: MpcParams) -> SampledTrajectory:
    params.validate(bc)
    provider = traffic_map if callable(traffic_map) else (lambda _t: traffic_map)

    tiny = 1e-12 * (1.0 + bc.duration)
    n_regular = int(np.floor((bc.duration - tiny) / params.dt)) + 1
    times = [bc.t0 + i * params.dt for i in range(n_regular)]
    times.append(bc.T)

    n = len(times)
    positions = np.empty((n, 2))
    velocities = np.empty((n, 2))
    regions = np.empty(n, dtype=int)
    lagrangian = np.empty(n)

    z = bc.z0
    current_map = provider(times[0])
    region = current_map.region_of(z)
    stall = 0
    plan = None
    for i in range(n - 1):
        t = times[i]
        current_map = provider(t)
        phase = current_map.phase_of_region(region)
        plan = plan_single_phase(phase, BoundaryConditions(TimeWindow(t, bc.T), z, bc.zT))
        v = plan.velocities([t])[0]
        positions[i] = z.as_array()
        velocities[i] = v
        regions[i] = region
        lagrangian[i] = 0.5 * current_map.k * float(v @ v) - traffic_intensity(phase, z)

        t_next = times[i + 1]
        z_next = bc.zT if i == n - 2 else Vec2.from_array(plan.positions([t_next])[0])
        prev_region = region
        region = provider(t_next).region_of(
            z_next, previous=region if params.region_hysteresis else None
        )
        stall = _detect_stall(
            region != prev_region, float(np.hypot(z_next.x - z.x, z_next.y - z.y)), stall
        )
        if stall > STALL_STEP_LIMIT:
            raise StalledOnInterface(
                f"position pinned to the interface for {stall} consecutive steps near t={t_next}"
            )
        z = z_next

    positions[-1] = bc.zT.as_array()
    velocities[-1] = plan.velocities([bc.T])[0]
    regions[-1] = region
    final_phase = provider(bc.T).phase_of_region(region)
    lagrangian[-1] = 0.5 * final_phase.k * float(
        velocities[-1] @ velocities[-1]
    ) - traffic_intensity(final_phase, bc.zT)

    action = float(np.trapezoid(lagrangian, np.asarray(times)))
    return SampledTrajectory(
        times=np.asarray(times),
        positions=positions,
        velocities=velocities,
        region_ids=regions,
        action_estimate=action,
    )
