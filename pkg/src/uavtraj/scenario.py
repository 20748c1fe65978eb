"""Scenario documents: parsing, validation, emission.

A scenario is a YAML key-value tree selecting a traffic map, endpoints, a
planner and output options. `parse_scenario` validates every module
invariant at parse time and raises ParseError for malformed documents or
ValidationError naming the offending field; `emit_scenario` writes the
canonical document back so that parse(emit(s)) == s. The full field
reference lives in SCHEMA_REFERENCE (printed by `uavtraj schema`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

import yaml

from .aoa import AoaParams
from .core import BoundaryConditions, TimeWindow, Vec2
from .errors import ParseError, PlannerError, ValidationError
from .mpc import MpcParams
from .potential import (
    BiPhaseMap,
    Interface,
    QuadraticPhase,
    circle_interface,
    line_interface,
    make_biphase,
    reduce_hotspots,
)

PLANNERS = ("closed_form", "mpc", "aoa")
MAP_KINDS = ("single_phase", "hotspot_sum", "biphase")

SCHEMA_REFERENCE = """\
Scenario document reference (YAML)
==================================

name: string            optional, defaults to the file stem
k: number               velocity cost constant, > 0

boundary:               required
  t0: number            start time (seconds)
  T: number             end time, strictly > t0
  z0: [x, y]            start position (meters)
  zT: [x, y]            end position

map:                    required; exactly one of the three keys
  single_phase:
    u0: number          curvature (< 0 hot spot, > 0 hole, 0 needs degenerate)
    u1: number          offset, default 0
    center: [x, y]      default [0, 0]
    degenerate: bool    default false; required true when u0 = 0
  hotspot_sum:
    terms:              list of quadratic terms u/2*||z - at||^2
      - {u: number, at: [x, y]}
    u1: number          extra constant offset, default 0
  biphase:
    phase1: {u0, u1, center, degenerate}   as in single_phase
    phase2: {u0, u1, center, degenerate}
    interface:          optional; derived as the equal-intensity locus when
                        absent (phases are then assigned to the side holding
                        their center)
      line:   {normal: [x, y], offset: number}
      circle: {center: [x, y], radius: number}

planner: closed_form | mpc | aoa
  closed_form requires a single_phase or hotspot_sum map
  mpc and aoa require a biphase map; aoa needs u0 < 0 in both phases

planner_params:         optional
  dt: number            mpc step (also the aoa init run), default (T-t0)/1000
  region_hysteresis: bool   mpc tie-break on the interface, default true
  delta_tau: number     aoa crossing-time step, default (T-t0)/200
  eps_tau: number       default delta_tau/2
  eps_xi: number        default 1e-6 * scene scale
  eps_S: number         default 1e-8 * |initial cost|
  max_iters: int        default 10000
  refine_tau: bool      bisection polish of tau after each step phase,
                        default true

output:                 optional
  samples: int          rows in the trajectory CSV, default 1000
  csv_path: string      default <name>.csv under --out
  summary_path: string  default <name>.summary.json under --out

Region convention: f(z) < C is region 1 (phase1), f(z) > C region 2; points
on the interface belong to region 1 (mpc keeps the previous region there).

Trajectory CSV columns: t,x,y,vx,vy,u,H,region.
Exit codes: 0 ok, 2 parse error, 3 validation error, 4 planner error,
5 verification failure.
"""


@dataclass(frozen=True)
class PhaseSpec:
    u0: float
    u1: float = 0.0
    center: Vec2 = field(default_factory=lambda: Vec2(0.0, 0.0))
    degenerate: bool = False

    def build(self, k: float) -> QuadraticPhase:
        return QuadraticPhase(
            u0=self.u0, u1=self.u1, center=self.center, k=k, degenerate=self.degenerate
        )


@dataclass(frozen=True)
class MapSpec:
    kind: str
    single: Optional[PhaseSpec] = None
    terms: tuple[tuple[float, Vec2], ...] = ()
    terms_u1: float = 0.0
    phase1: Optional[PhaseSpec] = None
    phase2: Optional[PhaseSpec] = None
    interface: Optional[Interface] = None


@dataclass(frozen=True)
class OutputSpec:
    samples: int = 1000
    csv_path: Optional[str] = None
    summary_path: Optional[str] = None


@dataclass(frozen=True)
class Scenario:
    name: str
    k: float
    boundary: BoundaryConditions
    map: MapSpec
    planner: str
    mpc_params: MpcParams
    aoa_params: AoaParams
    output: OutputSpec

    def single_phase(self) -> QuadraticPhase:
        """The effective single phase (direct or reduced from a hot-spot sum)."""
        if self.map.kind == "single_phase":
            return self.map.single.build(self.k)
        if self.map.kind == "hotspot_sum":
            reduced = reduce_hotspots(list(self.map.terms), self.k)
            return QuadraticPhase(
                u0=reduced.u0,
                u1=reduced.u1 + self.map.terms_u1,
                center=reduced.center,
                k=self.k,
            )
        raise ValidationError("map: biphase map has no single-phase reduction")

    def biphase_map(self) -> BiPhaseMap:
        if self.map.kind != "biphase":
            raise ValidationError(f"map: planner {self.planner!r} needs a biphase map")
        return make_biphase(
            self.map.phase1.build(self.k),
            self.map.phase2.build(self.k),
            self.map.interface,
        )


def _require(mapping: dict, key: str, path: str) -> Any:
    if key not in mapping:
        raise ValidationError(f"{path}.{key}: required field is missing")
    return mapping[key]


def _number(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _vec(value: Any, path: str) -> Vec2:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ValidationError(f"{path}: expected [x, y], got {value!r}")
    try:
        return Vec2(_number(value[0], path + "[0]"), _number(value[1], path + "[1]"))
    except ValidationError:
        raise
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def _mapping(value: Any, path: str) -> dict:
    if not isinstance(value, dict):
        raise ParseError(f"{path}: expected a mapping, got {type(value).__name__}")
    return value


def _reject_unknown(mapping: dict, allowed: set[str], path: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ParseError(f"{path}: unknown field(s) {sorted(unknown)}")


def _parse_phase(raw: Any, path: str) -> PhaseSpec:
    raw = _mapping(raw, path)
    _reject_unknown(raw, {"u0", "u1", "center", "degenerate"}, path)
    u0 = _number(_require(raw, "u0", path), path + ".u0")
    u1 = _number(raw.get("u1", 0.0), path + ".u1")
    center = _vec(raw.get("center", [0.0, 0.0]), path + ".center")
    degenerate = bool(raw.get("degenerate", False))
    if u0 == 0.0 and not degenerate:
        raise ValidationError(f"{path}.u0: zero curvature requires degenerate: true")
    return PhaseSpec(u0=u0, u1=u1, center=center, degenerate=degenerate)


def _parse_interface(raw: Any, path: str) -> Interface:
    raw = _mapping(raw, path)
    _reject_unknown(raw, {"line", "circle"}, path)
    if ("line" in raw) == ("circle" in raw):
        raise ValidationError(f"{path}: exactly one of line/circle is required")
    try:
        if "line" in raw:
            spec = _mapping(raw["line"], path + ".line")
            _reject_unknown(spec, {"normal", "offset"}, path + ".line")
            return line_interface(
                _vec(_require(spec, "normal", path + ".line"), path + ".line.normal"),
                _number(_require(spec, "offset", path + ".line"), path + ".line.offset"),
            )
        spec = _mapping(raw["circle"], path + ".circle")
        _reject_unknown(spec, {"center", "radius"}, path + ".circle")
        return circle_interface(
            _vec(_require(spec, "center", path + ".circle"), path + ".circle.center"),
            _number(_require(spec, "radius", path + ".circle"), path + ".circle.radius"),
        )
    except ValidationError:
        raise
    except ValueError as exc:
        raise ValidationError(f"{path}: {exc}") from exc


def _parse_map(raw: Any) -> MapSpec:
    raw = _mapping(raw, "map")
    _reject_unknown(raw, set(MAP_KINDS), "map")
    if len(raw) != 1:
        raise ValidationError(f"map: exactly one of {MAP_KINDS} is required")
    kind = next(iter(raw))
    if kind == "single_phase":
        return MapSpec(kind=kind, single=_parse_phase(raw[kind], "map.single_phase"))
    if kind == "hotspot_sum":
        spec = _mapping(raw[kind], "map.hotspot_sum")
        _reject_unknown(spec, {"terms", "u1"}, "map.hotspot_sum")
        raw_terms = _require(spec, "terms", "map.hotspot_sum")
        if not isinstance(raw_terms, list) or not raw_terms:
            raise ValidationError("map.hotspot_sum.terms: expected a non-empty list")
        terms = []
        for i, item in enumerate(raw_terms):
            path = f"map.hotspot_sum.terms[{i}]"
            item = _mapping(item, path)
            _reject_unknown(item, {"u", "at"}, path)
            terms.append(
                (
                    _number(_require(item, "u", path), path + ".u"),
                    _vec(_require(item, "at", path), path + ".at"),
                )
            )
        total = sum(u for u, _ in terms)
        if total == 0:
            raise ValidationError("map.hotspot_sum.terms: curvatures sum to zero")
        return MapSpec(
            kind=kind,
            terms=tuple(terms),
            terms_u1=_number(spec.get("u1", 0.0), "map.hotspot_sum.u1"),
        )
    spec = _mapping(raw[kind], "map.biphase")
    _reject_unknown(spec, {"phase1", "phase2", "interface"}, "map.biphase")
    iface = None
    if "interface" in spec:
        iface = _parse_interface(spec["interface"], "map.biphase.interface")
    return MapSpec(
        kind=kind,
        phase1=_parse_phase(_require(spec, "phase1", "map.biphase"), "map.biphase.phase1"),
        phase2=_parse_phase(_require(spec, "phase2", "map.biphase"), "map.biphase.phase2"),
        interface=iface,
    )


def parse_scenario(text: str, default_name: str = "scenario") -> Scenario:
    """Parse and validate a scenario document."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ParseError(f"invalid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ParseError("scenario document must be a mapping")
    _reject_unknown(
        raw, {"name", "k", "boundary", "map", "planner", "planner_params", "output"}, "scenario"
    )

    name = raw.get("name", default_name)
    if not isinstance(name, str) or not name:
        raise ValidationError("name: expected a non-empty string")

    k = _number(_require(raw, "k", "scenario"), "k")
    if not k > 0:
        raise ValidationError(f"k: must be > 0, got {k}")

    braw = _mapping(_require(raw, "boundary", "scenario"), "boundary")
    _reject_unknown(braw, {"t0", "T", "z0", "zT"}, "boundary")
    t0 = _number(_require(braw, "t0", "boundary"), "boundary.t0")
    t_end = _number(_require(braw, "T", "boundary"), "boundary.T")
    if not t_end > t0:
        raise ValidationError(f"boundary.T: must be > t0 ({t0}), got {t_end}")
    boundary = BoundaryConditions(
        window=TimeWindow(t0, t_end),
        z0=_vec(_require(braw, "z0", "boundary"), "boundary.z0"),
        zT=_vec(_require(braw, "zT", "boundary"), "boundary.zT"),
    )

    map_spec = _parse_map(_require(raw, "map", "scenario"))

    planner = _require(raw, "planner", "scenario")
    if planner not in PLANNERS:
        raise ValidationError(f"planner: expected one of {PLANNERS}, got {planner!r}")
    if planner == "closed_form" and map_spec.kind == "biphase":
        raise ValidationError("planner: closed_form requires a single_phase or hotspot_sum map")
    if planner in ("mpc", "aoa") and map_spec.kind != "biphase":
        raise ValidationError(f"planner: {planner} requires a biphase map")
    if planner == "aoa":
        if not (map_spec.phase1.u0 < 0 and map_spec.phase2.u0 < 0):
            raise ValidationError("planner: aoa requires u0 < 0 in both phases")

    praw = _mapping(raw.get("planner_params", {}), "planner_params")
    _reject_unknown(
        praw,
        {
            "dt",
            "region_hysteresis",
            "delta_tau",
            "eps_tau",
            "eps_xi",
            "eps_S",
            "max_iters",
            "refine_tau",
        },
        "planner_params",
    )
    dt = _number(praw.get("dt", boundary.duration / 1000.0), "planner_params.dt")
    mpc_params = MpcParams(dt=dt, region_hysteresis=bool(praw.get("region_hysteresis", True)))
    try:
        mpc_params.validate(boundary)
    except ValidationError as exc:
        raise ValidationError(f"planner_params.dt: {exc}") from exc
    max_iters = praw.get("max_iters", 10_000)
    if isinstance(max_iters, bool) or not isinstance(max_iters, int):
        raise ValidationError("planner_params.max_iters: expected an integer")
    optional = {
        key: (_number(praw[key], f"planner_params.{key}") if key in praw else None)
        for key in ("delta_tau", "eps_tau", "eps_xi", "eps_S")
    }
    try:
        aoa_params = AoaParams(
            max_iters=max_iters,
            refine_tau=bool(praw.get("refine_tau", True)),
            **optional,
        )
    except ValidationError as exc:
        raise ValidationError(f"planner_params: {exc}") from exc

    oraw = _mapping(raw.get("output", {}), "output")
    _reject_unknown(oraw, {"samples", "csv_path", "summary_path"}, "output")
    samples = oraw.get("samples", 1000)
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 2:
        raise ValidationError(f"output.samples: expected an integer >= 2, got {samples!r}")
    output = OutputSpec(
        samples=samples,
        csv_path=oraw.get("csv_path"),
        summary_path=oraw.get("summary_path"),
    )

    scenario = Scenario(
        name=name,
        k=k,
        boundary=boundary,
        map=map_spec,
        planner=planner,
        mpc_params=mpc_params,
        aoa_params=aoa_params,
        output=output,
    )
    # building the map surfaces cross-field invariant violations at parse time
    try:
        if map_spec.kind == "biphase":
            scenario.biphase_map()
        else:
            scenario.single_phase()
    except PlannerError as exc:
        raise ValidationError(f"map: {exc}") from exc
    return scenario


def _vec_list(v: Vec2) -> list[float]:
    return [v.x, v.y]


def _emit_phase(spec: PhaseSpec) -> dict:
    out: dict[str, Any] = {"u0": spec.u0, "u1": spec.u1, "center": _vec_list(spec.center)}
    if spec.degenerate:
        out["degenerate"] = True
    return out


def emit_scenario(s: Scenario) -> str:
    """Canonical YAML for a scenario; parse(emit(s)) == s."""
    doc: dict[str, Any] = {
        "name": s.name,
        "k": s.k,
        "boundary": {
            "t0": s.boundary.t0,
            "T": s.boundary.T,
            "z0": _vec_list(s.boundary.z0),
            "zT": _vec_list(s.boundary.zT),
        },
    }
    if s.map.kind == "single_phase":
        doc["map"] = {"single_phase": _emit_phase(s.map.single)}
    elif s.map.kind == "hotspot_sum":
        doc["map"] = {
            "hotspot_sum": {
                "terms": [{"u": u, "at": _vec_list(z)} for u, z in s.map.terms],
                "u1": s.map.terms_u1,
            }
        }
    else:
        biphase: dict[str, Any] = {
            "phase1": _emit_phase(s.map.phase1),
            "phase2": _emit_phase(s.map.phase2),
        }
        if s.map.interface is not None:
            iface = s.map.interface
            if iface.kind == "line":
                biphase["interface"] = {
                    "line": {"normal": _vec_list(iface.normal), "offset": iface.offset}
                }
            else:
                biphase["interface"] = {
                    "circle": {"center": _vec_list(iface.center), "radius": iface.radius}
                }
        doc["map"] = {"biphase": biphase}
    doc["planner"] = s.planner
    params: dict[str, Any] = {
        "dt": s.mpc_params.dt,
        "region_hysteresis": s.mpc_params.region_hysteresis,
        "max_iters": s.aoa_params.max_iters,
        "refine_tau": s.aoa_params.refine_tau,
    }
    for key in ("delta_tau", "eps_tau", "eps_xi", "eps_S"):
        value = getattr(s.aoa_params, key)
        if value is not None:
            params[key] = value
    doc["planner_params"] = params
    out: dict[str, Any] = {"samples": s.output.samples}
    if s.output.csv_path is not None:
        out["csv_path"] = s.output.csv_path
    if s.output.summary_path is not None:
        out["summary_path"] = s.output.summary_path
    doc["output"] = out
    return yaml.safe_dump(doc, sort_keys=False)
