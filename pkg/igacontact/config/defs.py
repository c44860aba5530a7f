"""Typed problem configuration."""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from igacontact.contact import AreaMeasure, PenaltyScaling
from igacontact.nurbs import Face


class ConfigError(Exception):
    def __init__(self, key: str, reason: str, *args, **kwargs):
        super().__init__(args, kwargs)
        self.key = key
        self.reason = reason

    def __str__(self):
        return f"Configuration error at {self.key!r}: {self.reason}"


class GeometryKind(str, enum.Enum):
    value: str

    BLOCK = "block"
    SPHERE_OCTANT = "sphere_octant"
    HOLLOW_HEMISPHERE = "hollow_hemisphere"
    SPHERICAL_INDENTOR = "spherical_indentor"


class BenchmarkKind(str, enum.Enum):
    value: str

    PATCH_TEST = "patch_test"
    HERTZ = "hertz"
    IRONING = "ironing"
    TWISTING = "twisting"
    CUSTOM = "custom"


# Builder keyword arguments per geometry kind, required ones first
GEOMETRY_PARAMS: Dict[GeometryKind, Tuple[Tuple[str, ...], Tuple[str, ...]]] = {
    GeometryKind.BLOCK: (("dimensions",), ("origin",)),
    GeometryKind.SPHERE_OCTANT: (("r_inner", "r_outer"), ("center",)),
    GeometryKind.HOLLOW_HEMISPHERE: (("r_inner", "r_outer", "center"), ()),
    GeometryKind.SPHERICAL_INDENTOR: (("width", "height", "cap_radius", "bottom"), ()),
}

_DISC_RE = re.compile(r"^N(\d+)(?:-N(\d+)[.·](\d+))?$")


@dataclass(frozen=True)
class Discretization:
    """Tag ``N<p>`` (uniform degree p, maximal continuity) or ``N<p>-N<p>.<s>`` (degree p
    bulk with the contact layer elevated by s in both surface directions)."""

    degree: int
    steps: int = 0

    def __post_init__(self):
        if self.degree < 1 or self.steps < 0:
            raise ConfigError("discretization", f"invalid degree {self.degree} / steps {self.steps}")

    @classmethod
    def parse(cls, tag: str) -> Discretization:
        match = _DISC_RE.match(str(tag).strip())
        if match is None:
            raise ConfigError("discretization", f"cannot parse tag {tag!r}")
        p, p2, s = match.groups()
        if p2 is None:
            return cls(int(p))
        if p2 != p:
            raise ConfigError("discretization", f"bulk degrees differ in {tag!r}")
        return cls(int(p), int(s))

    @property
    def tag(self) -> str:
        if self.steps == 0:
            return f"N{self.degree}"
        return f"N{self.degree}-N{self.degree}.{self.steps}"

    def __str__(self):
        return self.tag


@dataclass
class MaterialSpec:
    E: float
    nu: float = 0.3


@dataclass
class BodySpec:
    """One deformable body.

    :var params: Geometry builder arguments, see :py:data:`GEOMETRY_PARAMS`
    :var degrees: Explicit volume degrees, default ``(p, p, 1)`` from the discretization
    :var grading: ``(fraction of spans, fraction of range)`` for graded in-surface knots
    :var contact_face: Face elevated for contact, in the builder's parametrisation
    """

    name: str
    geometry: GeometryKind
    params: Dict[str, Any]
    elements: Tuple[int, int, int]
    material: MaterialSpec
    discretization: Discretization = Discretization(2)
    degrees: Optional[Tuple[int, int, int]] = None
    grading: Optional[Tuple[float, float]] = None
    contact_face: Face = Face.XI3_MAX

    def volume_degrees(self) -> Tuple[int, int, int]:
        if self.degrees is not None:
            return tuple(self.degrees)
        p = self.discretization.degree
        return (p, p, 1)


@dataclass
class RigidPlaneSpec:
    point: Tuple[float, float, float]
    normal: Tuple[float, float, float]


@dataclass
class ContactSpec:
    """A slave body against a master body or a rigid plane (``master = "plane"``).

    :var n_gp: Slave Gauss points per direction and element, 0 selects 4 (p_c + 1)
    """

    slave: str
    master: str
    eps_N: float
    eps_T: float = 0.0
    mu_f: float = 0.0
    n_gp: int = 0
    penalty_scaling: PenaltyScaling = PenaltyScaling.NONE
    area_measure: AreaMeasure = AreaMeasure.REFERENCE
    plane: Optional[RigidPlaneSpec] = None


@dataclass
class ConstraintSpec:
    """Control points on the listed faces of a body with prescribed ``components``."""

    name: str
    body: str
    faces: List[Face]
    components: List[int] = field(default_factory=lambda: [0, 1, 2])


@dataclass
class MotionSpec:
    set: str
    translation: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    angle_deg: float = 0.0
    axis: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    center: Tuple[float, float, float] = (0.0, 0.0, 0.0)


@dataclass
class PressureSpec:
    body: str
    face: Face
    pressure: float


@dataclass
class StageSpec:
    name: str
    steps: int
    motions: List[MotionSpec] = field(default_factory=list)
    load_factor: Optional[float] = None
    friction: bool = False


@dataclass
class SolverSpec:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_iterations: int = 30
    max_cutbacks: int = 6
    parallel: bool = False


@dataclass
class AnalysisSpec:
    """What the history and metrics report.

    :var driven_set: Constraint set whose prescribed motion gives u_z and u_x or theta
    :var reaction_set: Constraint set whose reaction gives P_z and P_x
    :var torque_set: Set whose reaction moment about ``torque_axis`` through ``torque_center``
        is reported
    :var window_stage: Stage providing the amplitude window
    :var window_skip: Leading fraction of the window stage dropped as transient
    """

    driven_set: Optional[str] = None
    reaction_set: Optional[str] = None
    torque_set: Optional[str] = None
    torque_center: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    torque_axis: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    window_stage: Optional[str] = None
    window_skip: float = 0.1
    load_multiplier: float = 1.0


@dataclass
class OutputSpec:
    vtk_every: int = 0
    vtk_subdivisions: int = 2
    contact_every: int = 1


@dataclass
class RunMeta:
    benchmark: BenchmarkKind = BenchmarkKind.CUSTOM
    mesh_level: int = 1
    step_scale: float = 1.0
    description: str = ""


@dataclass
class ProblemConfig:
    bodies: List[BodySpec]
    contacts: List[ContactSpec]
    constraints: List[ConstraintSpec]
    stages: List[StageSpec]
    pressures: List[PressureSpec] = field(default_factory=list)
    solver: SolverSpec = field(default_factory=SolverSpec)
    analysis: AnalysisSpec = field(default_factory=AnalysisSpec)
    output: OutputSpec = field(default_factory=OutputSpec)
    meta: RunMeta = field(default_factory=RunMeta)

    def body(self, name: str) -> BodySpec:
        for b in self.bodies:
            if b.name == name:
                return b
        raise ConfigError("bodies", f"no body named {name!r}")

    def validate(self):
        """Cross references between sections.

        :raises ConfigError: Unknown body or set names, duplicate names
        """
        names = [b.name for b in self.bodies]
        if len(set(names)) != len(names):
            raise ConfigError("bodies", f"duplicate body names {names}")
        for kind in (b.geometry for b in self.bodies):
            if kind not in GEOMETRY_PARAMS:
                raise ConfigError("bodies.geometry", f"unsupported kind {kind}")
        for b in self.bodies:
            required, optional = GEOMETRY_PARAMS[b.geometry]
            missing = [k for k in required if k not in b.params]
            unknown = [k for k in b.params if k not in required + optional]
            if missing or unknown:
                raise ConfigError(
                    f"bodies.{b.name}.params", f"missing {missing}, unknown {unknown}"
                )
            if b.grading is not None and b.geometry != GeometryKind.SPHERE_OCTANT:
                raise ConfigError(f"bodies.{b.name}.grading", "only sphere octants support grading")
        for c in self.contacts:
            self.body(c.slave)
            if c.master == "plane":
                if c.plane is None:
                    raise ConfigError("contacts.plane", "rigid plane master needs a plane section")
            else:
                self.body(c.master)
            if c.eps_N <= 0.0 or c.eps_T < 0.0 or c.mu_f < 0.0:
                raise ConfigError("contacts", "penalties and friction must satisfy eps_N > 0, eps_T >= 0, mu_f >= 0")
        sets = [c.name for c in self.constraints]
        if len(set(sets)) != len(sets):
            raise ConfigError("constraints", f"duplicate set names {sets}")
        for c in self.constraints:
            self.body(c.body)
        for p in self.pressures:
            self.body(p.body)
        if not self.stages:
            raise ConfigError("stages", "at least one stage is required")
        for s in self.stages:
            if s.steps < 1:
                raise ConfigError(f"stages.{s.name}.steps", "must be at least 1")
            for m in s.motions:
                if m.set not in sets:
                    raise ConfigError(f"stages.{s.name}.motions", f"unknown set {m.set!r}")
        for key in ("driven_set", "reaction_set", "torque_set"):
            name = getattr(self.analysis, key)
            if name is not None and name not in sets:
                raise ConfigError(f"analysis.{key}", f"unknown set {name!r}")
