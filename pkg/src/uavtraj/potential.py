"""Traffic-intensity models and interface geometry.

A region's traffic intensity is the quadratic

    u(z) = u0/2 * ||z - center||^2 + u1

u0 < 0 is a hot spot (intensity peaks at the center, worth visiting slowly),
u0 > 0 is a traffic hole (intensity dips at the center, worth crossing fast).
Two regions are separated by an interface {f(z) = C}; for two quadratics the
equal-intensity locus is always a line or a circle, so only those two kinds
exist here. The sign convention is fixed: f(z) < C is region 1, f(z) > C is
region 2, and points on the interface belong to region 1 unless a caller
supplies a previous region to stick with.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import Vec2, dot, norm
from .errors import DegenerateGradient, NoRealInterface, SumZero, ValidationError

#: |f(z) - C| below this counts as "exactly on the interface".
ON_INTERFACE_TOL = 1e-12


@dataclass(frozen=True)
class QuadraticPhase:
    """One region's traffic parameters plus the derived frequency
    omega = sqrt(|u0| / k).

    u0 = 0 is only allowed with ``degenerate=True`` (a flat region; the
    optimal trajectory there is the straight line).
    """

    u0: float
    u1: float
    center: Vec2
    k: float
    degenerate: bool = False
    omega: float = field(init=False)

    def __post_init__(self) -> None:
        if not self.k > 0:
            raise ValidationError(f"velocity cost constant k must be > 0, got {self.k}")
        if self.u0 == 0 and not self.degenerate:
            raise ValidationError("u0 = 0 requires the degenerate flag (flat region)")
        if self.degenerate and self.u0 != 0:
            raise ValidationError("degenerate phase must have u0 = 0")
        object.__setattr__(self, "omega", math.sqrt(abs(self.u0) / self.k))


def traffic_intensity(phase: QuadraticPhase, z: Vec2) -> float:
    """u(z) = u0/2 * ||z - center||^2 + u1."""
    d = z - phase.center
    return 0.5 * phase.u0 * dot(d, d) + phase.u1


def intensity_at(phase: QuadraticPhase, points: np.ndarray) -> np.ndarray:
    """Vectorized `traffic_intensity` over an (n, 2) array of positions."""
    d = points - phase.center.as_array()
    return 0.5 * phase.u0 * np.einsum("ij,ij->i", d, d) + phase.u1


def reduce_hotspots(terms: list[tuple[float, Vec2]], k: float) -> QuadraticPhase:
    """Collapse sum_i ui/2 * ||z - zi||^2 into a single quadratic phase.

    The reduced phase is centered at the curvature-weighted barycentre
    zb = sum(ui*zi)/sum(ui); the leftover constant sum_i ui/2*||zi - zb||^2
    becomes the phase offset u1. Requires sum(ui) != 0.
    """
    if not terms:
        raise ValidationError("reduce_hotspots needs at least one term")
    u_total = math.fsum(u for u, _ in terms)
    if u_total == 0:
        raise SumZero("curvatures sum to zero; no single-phase reduction exists")
    bx = math.fsum(u * z.x for u, z in terms) / u_total
    by = math.fsum(u * z.y for u, z in terms) / u_total
    zb = Vec2(bx, by)
    u1 = math.fsum(0.5 * u * (norm(z - zb) ** 2) for u, z in terms)
    return QuadraticPhase(u0=u_total, u1=u1, center=zb, k=k)


@dataclass(frozen=True)
class Interface:
    """Separating locus {f(z) = C}.

    kind="line":   f(z) = dot(normal, z), C = offset, normal is unit length.
    kind="circle": f(z) = ||z - center||,  C = radius > 0.
    """

    kind: str
    normal: Optional[Vec2] = None
    offset: float = 0.0
    center: Optional[Vec2] = None
    radius: float = 0.0

    def __post_init__(self) -> None:
        if self.kind == "line":
            if self.normal is None:
                raise ValidationError("line interface requires a normal")
            if abs(norm(self.normal) - 1.0) > 1e-12:
                raise ValidationError("line normal must have unit norm")
        elif self.kind == "circle":
            if self.center is None:
                raise ValidationError("circle interface requires a center")
            if not self.radius > 0:
                raise ValidationError(f"circle radius must be > 0, got {self.radius}")
        else:
            raise ValidationError(f"unknown interface kind {self.kind!r}")

    @property
    def level(self) -> float:
        """The constant C in f(z) = C."""
        return self.offset if self.kind == "line" else self.radius


def line_interface(normal: Vec2, offset: float) -> Interface:
    n = norm(normal)
    if n == 0:
        raise ValidationError("line normal must be nonzero")
    return Interface(kind="line", normal=Vec2(normal.x / n, normal.y / n), offset=offset / n)


def circle_interface(center: Vec2, radius: float) -> Interface:
    return Interface(kind="circle", center=center, radius=radius)


def interface_value(iface: Interface, z: Vec2) -> float:
    if iface.kind == "line":
        return dot(iface.normal, z)
    return norm(z - iface.center)


def interface_values(iface: Interface, points: np.ndarray) -> np.ndarray:
    """Vectorized `interface_value` over an (n, 2) array."""
    if iface.kind == "line":
        return points @ iface.normal.as_array()
    return np.hypot(*(points - iface.center.as_array()).T)


def interface_gradient(iface: Interface, z: Vec2) -> Vec2:
    if iface.kind == "line":
        return iface.normal
    d = z - iface.center
    r = norm(d)
    if r == 0:
        raise DegenerateGradient("interface gradient undefined at the circle center")
    return Vec2(d.x / r, d.y / r)


def project_onto_interface(iface: Interface, b: Vec2) -> Vec2:
    """Nearest point to b on {f = C}."""
    if iface.kind == "line":
        excess = dot(iface.normal, b) - iface.offset
        return b - iface.normal * excess
    d = b - iface.center
    r = norm(d)
    if r == 0:
        raise DegenerateGradient("projection undefined from the circle center")
    return iface.center + d * (iface.radius / r)


def interface_points(iface: Interface, n: int, span: float = 10.0) -> np.ndarray:
    """Sample n points on the interface (line: centered parameter range
    [-span, span]; circle: uniform angles). Used for invariant checks."""
    if iface.kind == "line":
        base = iface.normal.as_array() * iface.offset
        tangent = np.array([-iface.normal.y, iface.normal.x])
        ts = np.linspace(-span, span, n)
        return base + ts[:, None] * tangent
    angles = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    ring = np.stack([np.cos(angles), np.sin(angles)], axis=1) * iface.radius
    return iface.center.as_array() + ring


def make_equal_potential_interface(
    phase1: QuadraticPhase, phase2: QuadraticPhase
) -> Interface:
    """Locus where the two quadratics take equal values.

    Equal curvatures give a line (a shifted perpendicular bisector of the two
    centers); distinct curvatures give a circle. Raises NoRealInterface when
    the locus is empty, a single point, or the whole plane.
    """
    u01, u02 = phase1.u0, phase2.u0
    c1, c2 = phase1.center, phase2.center
    du1 = phase2.u1 - phase1.u1
    if u01 == u02:
        d = c2 - c1
        dn = norm(d)
        if dn == 0 or u01 == 0:
            raise NoRealInterface("identical or concentric equal-curvature phases")
        # u01*(z . (c2-c1)) = du1 - u01/2*(|c1|^2 - |c2|^2)
        rhs = du1 - 0.5 * u01 * (dot(c1, c1) - dot(c2, c2))
        return line_interface(d, rhs / u01)
    # 1/2*(u01-u02)*|z|^2 - (u01*c1 - u02*c2) . z + const = 0
    diff = u01 - u02
    m = Vec2(
        (u01 * c1.x - u02 * c2.x) / diff,
        (u01 * c1.y - u02 * c2.y) / diff,
    )
    q = (u01 * dot(c1, c1) - u02 * dot(c2, c2) + 2.0 * (phase1.u1 - phase2.u1)) / diff
    r_sq = dot(m, m) - q
    scale = max(dot(m, m), abs(q), 1e-30)
    if r_sq <= 1e-14 * scale:
        raise NoRealInterface("equal-potential locus is empty or a single point")
    return circle_interface(m, math.sqrt(r_sq))


@dataclass(frozen=True)
class BiPhaseMap:
    """Two quadratic regions separated by an interface.

    Region rule (fixed convention): f(z) < C  =>  region 1 / phase1,
    f(z) > C  =>  region 2 / phase2. Exact ties go to region 1, or to the
    caller-supplied previous region when hysteresis is wanted.
    """

    phase1: QuadraticPhase
    phase2: QuadraticPhase
    interface: Interface

    def __post_init__(self) -> None:
        if self.phase1.k != self.phase2.k:
            raise ValidationError("both phases must share the velocity cost constant k")

    @property
    def k(self) -> float:
        return self.phase1.k

    def region_of(self, z: Vec2, previous: Optional[int] = None) -> int:
        g = interface_value(self.interface, z) - self.interface.level
        scale = 1.0 + abs(self.interface.level)
        if abs(g) <= ON_INTERFACE_TOL * scale:
            return previous if previous in (1, 2) else 1
        return 1 if g < 0 else 2

    def phase_of_region(self, region: int) -> QuadraticPhase:
        return self.phase1 if region == 1 else self.phase2

    def intensity(self, z: Vec2, previous: Optional[int] = None) -> float:
        return traffic_intensity(self.phase_of_region(self.region_of(z, previous)), z)


def make_biphase(
    phase1: QuadraticPhase,
    phase2: QuadraticPhase,
    interface: Optional[Interface] = None,
) -> BiPhaseMap:
    """Build a two-region map; derive the equal-potential interface when none
    is given. Auto-derived maps are oriented so that each phase governs the
    side containing its own center, and the equal-potential property is
    checked on 32 sampled interface points.
    """
    if interface is not None:
        return BiPhaseMap(phase1, phase2, interface)
    iface = make_equal_potential_interface(phase1, phase2)
    span = 2.0 * max(1.0, norm(phase1.center - phase2.center))
    side1 = interface_value(iface, phase1.center) - iface.level
    side2 = interface_value(iface, phase2.center) - iface.level
    if side1 > 0 > side2:
        phase1, phase2 = phase2, phase1
    elif not (side1 < 0 < side2):
        raise NoRealInterface("derived interface does not separate the phase centers")
    for pt in interface_points(iface, 32, span=span):
        z = Vec2.from_array(pt)
        v1 = traffic_intensity(phase1, z)
        v2 = traffic_intensity(phase2, z)
        if abs(v1 - v2) > 1e-9 * (1.0 + abs(v1)):
            raise NoRealInterface(
                f"derived interface is not equal-potential at {z} ({v1} vs {v2})"
            )
    return BiPhaseMap(phase1, phase2, iface)
