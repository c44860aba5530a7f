from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Tuple

import numpy as np


class Face(str, enum.Enum):
    """Parametric boundary faces of a tri-variate patch."""

    value: str

    XI1_MIN = "xi1_min"
    XI1_MAX = "xi1_max"
    XI2_MIN = "xi2_min"
    XI2_MAX = "xi2_max"
    XI3_MIN = "xi3_min"
    XI3_MAX = "xi3_max"

    @property
    def axis(self) -> int:
        return int(self.value[2]) - 1

    @property
    def at_max(self) -> bool:
        return self.value.endswith("max")

    @classmethod
    def from_axis(cls, axis: int, at_max: bool) -> Face:
        return cls(f"xi{axis + 1}_{'max' if at_max else 'min'}")

    def in_surface_axes(self) -> Tuple[int, int]:
        axes = [a for a in range(3) if a != self.axis]
        return axes[0], axes[1]


@dataclass(frozen=True)
class Orientation:
    """Re-parametrisation of a patch by an axis permutation and axis reversals.

    ``perm[b]`` is the original axis that becomes new axis ``b``; ``flips[b]`` reverses the
    new axis ``b``. Even permutations combined with an even number of reversals keep the
    handedness of the parametrisation.
    """

    perm: Tuple[int, int, int] = (0, 1, 2)
    flips: Tuple[bool, bool, bool] = (False, False, False)

    @classmethod
    def identity(cls) -> Orientation:
        return cls()

    def map_face(self, face: Face) -> Face:
        new_axis = self.perm.index(face.axis)
        at_max = face.at_max != self.flips[new_axis]
        return Face.from_axis(new_axis, at_max)

    def apply_grid(self, grid: np.ndarray) -> np.ndarray:
        """Apply to an array whose first three axes run over the control grid."""
        rest = tuple(range(3, grid.ndim))
        out = np.transpose(grid, self.perm + rest)
        for axis, flip in enumerate(self.flips):
            if flip:
                out = np.flip(out, axis=axis)
        return np.ascontiguousarray(out)

    def with_flip(self, axis: int) -> Orientation:
        flips = list(self.flips)
        flips[axis] = not flips[axis]
        return Orientation(self.perm, tuple(flips))


_TO_TOP = {
    Face.XI3_MAX: Orientation((0, 1, 2), (False, False, False)),
    Face.XI3_MIN: Orientation((0, 1, 2), (True, False, True)),
    Face.XI1_MAX: Orientation((1, 2, 0), (False, False, False)),
    Face.XI1_MIN: Orientation((1, 2, 0), (True, False, True)),
    Face.XI2_MAX: Orientation((2, 0, 1), (False, False, False)),
    Face.XI2_MIN: Orientation((2, 0, 1), (True, False, True)),
}


def orientation_to_top(face: Face) -> Orientation:
    """Orientation moving ``face`` to xi3 = max while keeping the handedness."""
    return _TO_TOP[Face(face)]
