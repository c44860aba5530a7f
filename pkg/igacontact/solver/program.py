"""Load programs: stages of prescribed rigid motions of control point sets and load ramps.

Motions are cumulative. A stage gives the motion of a set reached at its end, the motion at
its start is the one reached at the end of the previous stage defining that set. Translation
and rotation angle are interpolated linearly inside a stage and the rotation is applied
exactly, so rotated points stay on circular arcs.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

_LOGGER = logging.getLogger(__name__)


def rotation_matrix(axis: Sequence[float], angle: float) -> np.ndarray:
    """Rodrigues rotation about a unit ``axis`` by ``angle`` radians."""
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    kx = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + np.sin(angle) * kx + (1.0 - np.cos(angle)) * kx @ kx


@dataclass(frozen=True)
class Motion:
    """Rigid motion ``x = R(angle) (X - center) + center + translation``.

    :var angle_deg: Rotation angle in degrees about ``axis`` through ``center``
    """

    translation: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    angle_deg: float = 0.0
    axis: Tuple[float, float, float] = (0.0, 0.0, 1.0)
    center: Tuple[float, float, float] = (0.0, 0.0, 0.0)

    def displacement(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        c = np.asarray(self.center, dtype=float)
        rot = rotation_matrix(self.axis, np.deg2rad(self.angle_deg))
        return (X - c) @ rot.T + c + np.asarray(self.translation, dtype=float) - X

    def interpolate(self, end: Motion, s: float) -> Motion:
        """Motion a fraction ``s`` of the way from this one to ``end`` (axis and center of
        ``end``)."""
        t0 = np.asarray(self.translation, dtype=float)
        t1 = np.asarray(end.translation, dtype=float)
        return Motion(
            translation=tuple(t0 + s * (t1 - t0)),
            angle_deg=self.angle_deg + s * (end.angle_deg - self.angle_deg),
            axis=end.axis,
            center=end.center,
        )


@dataclass(frozen=True)
class ConstraintSet:
    """Control points of one body whose ``components`` are prescribed."""

    name: str
    body: int
    nodes: np.ndarray
    components: Tuple[int, ...] = (0, 1, 2)

    def __post_init__(self):
        if not self.components or any(c not in (0, 1, 2) for c in self.components):
            raise ValueError(f"invalid components {self.components} for set {self.name!r}")


@dataclass(frozen=True)
class Stage:
    """One stage of a load program.

    :var motions: End motion per constraint set name
    :var load_factor: Factor on the external loads reached at the end of the stage
    :var friction: Tangential tractions active during the stage
    """

    name: str
    steps: int
    motions: Dict[str, Motion] = field(default_factory=dict)
    load_factor: Optional[float] = None
    friction: bool = False

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError(f"stage {self.name!r} needs at least one step, got {self.steps}")


class LoadProgram:
    def __init__(self, stages: Sequence[Stage]):
        if not stages:
            raise ValueError("a load program needs at least one stage")
        self._stages: List[Stage] = list(stages)

    @property
    def stages(self) -> List[Stage]:
        return self._stages

    @property
    def total_steps(self) -> int:
        return sum(s.steps for s in self._stages)

    def _start_motion(self, set_name: str, stage: int) -> Motion:
        for prev in reversed(self._stages[:stage]):
            if set_name in prev.motions:
                return prev.motions[set_name]
        return Motion()

    def _start_load(self, stage: int) -> float:
        for prev in reversed(self._stages[:stage]):
            if prev.load_factor is not None:
                return prev.load_factor
        return 0.0

    def motion_at(self, set_name: str, stage: int, s: float) -> Motion:
        """Motion of a set at progress ``s`` in [0, 1] of a stage."""
        start = self._start_motion(set_name, stage)
        end = self._stages[stage].motions.get(set_name)
        if end is None:
            return start
        return start.interpolate(end, s)

    def load_factor_at(self, stage: int, s: float) -> float:
        start = self._start_load(stage)
        end = self._stages[stage].load_factor
        if end is None:
            return start
        return start + s * (end - start)

    def __repr__(self):
        return f"{self.__class__.__name__}(stages={[(s.name, s.steps) for s in self._stages]})"
