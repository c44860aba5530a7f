"""JSON problem files.

Each section is read with :py:class:`_Section`, which consumes the keys it knows about and
rejects whatever is left, so typos surface as :py:class:`ConfigError` instead of silently
falling back to defaults.
"""
from __future__ import annotations

import enum
import json
import logging
import os
from typing import Any, Callable, Dict, List, Optional, Type

from igacontact.config.defs import (
    AnalysisSpec,
    BenchmarkKind,
    BodySpec,
    ConfigError,
    ConstraintSpec,
    ContactSpec,
    Discretization,
    GeometryKind,
    MaterialSpec,
    MotionSpec,
    OutputSpec,
    PressureSpec,
    ProblemConfig,
    RigidPlaneSpec,
    RunMeta,
    SolverSpec,
    StageSpec,
)
from igacontact.contact import AreaMeasure, PenaltyScaling
from igacontact.nurbs import Face

_LOGGER = logging.getLogger(__name__)

_MISSING = object()


class JsonKeyNames(str, enum.Enum):
    """Top level sections of a problem file."""

    value: str

    BODIES = "bodies"
    CONTACTS = "contacts"
    CONSTRAINTS = "constraints"
    STAGES = "stages"
    PRESSURES = "pressures"
    SOLVER = "solver"
    ANALYSIS = "analysis"
    OUTPUT = "output"
    META = "meta"


class _Section:
    def __init__(self, data: Any, path: str):
        if not isinstance(data, dict):
            raise ConfigError(path, f"expected an object, got {type(data).__name__}")
        self._data = dict(data)
        self.path = path

    def take(self, key: str, default: Any = _MISSING, convert: Optional[Callable] = None):
        if key not in self._data:
            if default is _MISSING:
                raise ConfigError(f"{self.path}.{key}", "missing required key")
            return default
        value = self._data.pop(key)
        if convert is None or value is None:
            return value
        try:
            return convert(value)
        except ConfigError:
            raise
        except (TypeError, ValueError) as e:
            raise ConfigError(f"{self.path}.{key}", str(e)) from e

    def finish(self):
        if self._data:
            raise ConfigError(self.path, f"unknown keys {sorted(self._data)}")


def _vec3(value) -> tuple:
    out = tuple(float(v) for v in value)
    if len(out) != 3:
        raise ValueError(f"expected 3 components, got {len(out)}")
    return out


def _int3(value) -> tuple:
    out = tuple(int(v) for v in value)
    if len(out) != 3:
        raise ValueError(f"expected 3 integers, got {len(out)}")
    return out


def _pair(value) -> tuple:
    out = tuple(float(v) for v in value)
    if len(out) != 2:
        raise ValueError(f"expected 2 values, got {len(out)}")
    return out


def _enum(cls: Type[enum.Enum]) -> Callable:
    def convert(value):
        try:
            return cls(value)
        except ValueError:
            choices = [m.value for m in cls]
            raise ValueError(f"{value!r} is not one of {choices}")

    return convert


def _items(data: Any, path: str) -> List[Any]:
    if not isinstance(data, list):
        raise ConfigError(path, "expected a list")
    return data


def _body(data, path) -> BodySpec:
    sec = _Section(data, path)
    material = _Section(sec.take("material"), f"{path}.material")
    body = BodySpec(
        name=sec.take("name", convert=str),
        geometry=sec.take("geometry", convert=_enum(GeometryKind)),
        params=sec.take("params", convert=dict),
        elements=sec.take("elements", convert=_int3),
        material=MaterialSpec(
            E=material.take("E", convert=float), nu=material.take("nu", 0.3, float)
        ),
        discretization=sec.take("discretization", Discretization(2), Discretization.parse),
        degrees=sec.take("degrees", None, _int3),
        grading=sec.take("grading", None, _pair),
        contact_face=sec.take("contact_face", Face.XI3_MAX, _enum(Face)),
    )
    material.finish()
    sec.finish()
    return body


def _contact(data, path) -> ContactSpec:
    sec = _Section(data, path)
    plane = sec.take("plane", None)
    if plane is not None:
        psec = _Section(plane, f"{path}.plane")
        plane = RigidPlaneSpec(
            point=psec.take("point", convert=_vec3), normal=psec.take("normal", convert=_vec3)
        )
        psec.finish()
    contact = ContactSpec(
        slave=sec.take("slave", convert=str),
        master=sec.take("master", convert=str),
        eps_N=sec.take("eps_N", convert=float),
        eps_T=sec.take("eps_T", 0.0, float),
        mu_f=sec.take("mu_f", 0.0, float),
        n_gp=sec.take("n_gp", 0, int),
        penalty_scaling=sec.take("penalty_scaling", PenaltyScaling.NONE, _enum(PenaltyScaling)),
        area_measure=sec.take("area_measure", AreaMeasure.REFERENCE, _enum(AreaMeasure)),
        plane=plane,
    )
    sec.finish()
    return contact


def _constraint(data, path) -> ConstraintSpec:
    sec = _Section(data, path)
    out = ConstraintSpec(
        name=sec.take("name", convert=str),
        body=sec.take("body", convert=str),
        faces=sec.take("faces", convert=lambda v: [_enum(Face)(f) for f in _items(v, f"{path}.faces")]),
        components=sec.take("components", [0, 1, 2], lambda v: [int(c) for c in v]),
    )
    sec.finish()
    if not out.components or any(c not in (0, 1, 2) for c in out.components):
        raise ConfigError(f"{path}.components", f"invalid components {out.components}")
    return out


def _motion(data, path) -> MotionSpec:
    sec = _Section(data, path)
    out = MotionSpec(
        set=sec.take("set", convert=str),
        translation=sec.take("translation", (0.0, 0.0, 0.0), _vec3),
        angle_deg=sec.take("angle_deg", 0.0, float),
        axis=sec.take("axis", (0.0, 0.0, 1.0), _vec3),
        center=sec.take("center", (0.0, 0.0, 0.0), _vec3),
    )
    sec.finish()
    return out


def _stage(data, path) -> StageSpec:
    sec = _Section(data, path)
    motions = _items(sec.take("motions", []), f"{path}.motions")
    out = StageSpec(
        name=sec.take("name", convert=str),
        steps=sec.take("steps", convert=int),
        motions=[_motion(m, f"{path}.motions[{i}]") for i, m in enumerate(motions)],
        load_factor=sec.take("load_factor", None, float),
        friction=sec.take("friction", False, bool),
    )
    sec.finish()
    return out


def _pressure(data, path) -> PressureSpec:
    sec = _Section(data, path)
    out = PressureSpec(
        body=sec.take("body", convert=str),
        face=sec.take("face", convert=_enum(Face)),
        pressure=sec.take("pressure", convert=float),
    )
    sec.finish()
    return out


def _flat(data, path, cls, fields: Dict[str, Callable]):
    """Sections made of scalar fields with dataclass defaults."""
    sec = _Section(data, path)
    defaults = cls()
    kwargs = {
        key: sec.take(key, getattr(defaults, key), convert) for key, convert in fields.items()
    }
    sec.finish()
    return cls(**kwargs)


def config_from_dict(data: Dict[str, Any]) -> ProblemConfig:
    """Build and validate a :py:class:`ProblemConfig`.

    :raises ConfigError: Missing or unknown keys, values of the wrong type, dangling
        references
    """
    sec = _Section(data, "config")
    k = JsonKeyNames
    cfg = ProblemConfig(
        bodies=[
            _body(b, f"bodies[{i}]")
            for i, b in enumerate(_items(sec.take(k.BODIES.value), k.BODIES.value))
        ],
        contacts=[
            _contact(c, f"contacts[{i}]")
            for i, c in enumerate(_items(sec.take(k.CONTACTS.value, []), k.CONTACTS.value))
        ],
        constraints=[
            _constraint(c, f"constraints[{i}]")
            for i, c in enumerate(
                _items(sec.take(k.CONSTRAINTS.value, []), k.CONSTRAINTS.value)
            )
        ],
        stages=[
            _stage(s, f"stages[{i}]")
            for i, s in enumerate(_items(sec.take(k.STAGES.value), k.STAGES.value))
        ],
        pressures=[
            _pressure(p, f"pressures[{i}]")
            for i, p in enumerate(_items(sec.take(k.PRESSURES.value, []), k.PRESSURES.value))
        ],
        solver=_flat(
            sec.take(k.SOLVER.value, {}),
            k.SOLVER.value,
            SolverSpec,
            {
                "rel_tol": float,
                "abs_tol": float,
                "max_iterations": int,
                "max_cutbacks": int,
                "parallel": bool,
            },
        ),
        analysis=_flat(
            sec.take(k.ANALYSIS.value, {}),
            k.ANALYSIS.value,
            AnalysisSpec,
            {
                "driven_set": str,
                "reaction_set": str,
                "torque_set": str,
                "torque_center": _vec3,
                "torque_axis": _vec3,
                "window_stage": str,
                "window_skip": float,
                "load_multiplier": float,
            },
        ),
        output=_flat(
            sec.take(k.OUTPUT.value, {}),
            k.OUTPUT.value,
            OutputSpec,
            {"vtk_every": int, "vtk_subdivisions": int, "contact_every": int},
        ),
        meta=_flat(
            sec.take(k.META.value, {}),
            k.META.value,
            RunMeta,
            {
                "benchmark": _enum(BenchmarkKind),
                "mesh_level": int,
                "step_scale": float,
                "description": str,
            },
        ),
    )
    sec.finish()
    if not 0.0 <= cfg.analysis.window_skip < 1.0:
        raise ConfigError("analysis.window_skip", "must lie in [0, 1)")
    cfg.validate()
    return cfg


def _plain(value):
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, Discretization):
        return value.tag
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    if isinstance(value, list):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {key: _plain(v) for key, v in value.items()}
    if hasattr(value, "__dataclass_fields__"):
        return {
            name: _plain(getattr(value, name))
            for name in value.__dataclass_fields__
            if getattr(value, name) is not None
        }
    return value


def config_to_dict(cfg: ProblemConfig) -> Dict[str, Any]:
    """Plain JSON compatible representation; ``config_from_dict`` restores an equal config."""
    return _plain(cfg)


def load_config(path: str) -> ProblemConfig:
    """:raises ConfigError: Unreadable file, JSON syntax or content errors"""
    if not os.path.isfile(path):
        raise ConfigError(path, "file does not exist")
    with open(path, "r") as file:
        try:
            data = json.load(file)
        except json.decoder.JSONDecodeError as e:
            raise ConfigError(path, f"JSON decode error: {e}") from e
    _LOGGER.debug(f"Loaded problem configuration {path}")
    return config_from_dict(data)


def save_config(cfg: ProblemConfig, path: str):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w") as file:
        json.dump(config_to_dict(cfg), file, indent=2)
        file.write("\n")
