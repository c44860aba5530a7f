"""Global degree of freedom numbering: three components per control point, bodies stacked."""
from __future__ import annotations

import logging
from typing import List, Sequence

import numpy as np

from igacontact.nurbs import VOBody

_LOGGER = logging.getLogger(__name__)


class DofMap:
    """Dense numbering ``3 (offset_b + cp) + component`` over all bodies."""

    def __init__(self, bodies: Sequence[VOBody]):
        self._bodies = list(bodies)
        counts = [b.control_count for b in self._bodies]
        self._offsets = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        self._dirichlet = np.zeros(self.n_dofs, dtype=bool)

    @property
    def n_bodies(self) -> int:
        return len(self._bodies)

    @property
    def n_dofs(self) -> int:
        return int(3 * self._offsets[-1])

    @property
    def dirichlet(self) -> np.ndarray:
        return self._dirichlet

    @property
    def free(self) -> np.ndarray:
        return ~self._dirichlet

    def cp_offset(self, body: int) -> int:
        return int(self._offsets[body])

    def body_index(self, body: VOBody) -> int:
        for i, b in enumerate(self._bodies):
            if b is body:
                return i
        raise ValueError(f"body {body.name!r} is not part of the model")

    def body_slice(self, body: int) -> slice:
        return slice(3 * int(self._offsets[body]), 3 * int(self._offsets[body + 1]))

    def global_dofs(self, body: int, nodes: np.ndarray, components: Sequence[int] = (0, 1, 2)) -> np.ndarray:
        """Global dofs (n, len(components)) of body control points."""
        nodes = np.asarray(nodes, dtype=np.int64)
        return 3 * (self._offsets[body] + nodes)[:, None] + np.asarray(components)[None, :]

    def constrain(self, body: int, nodes: np.ndarray, components: Sequence[int]) -> np.ndarray:
        dofs = self.global_dofs(body, nodes, components).ravel()
        self._dirichlet[dofs] = True
        return dofs

    def split(self, u: np.ndarray) -> List[np.ndarray]:
        """Per body control point displacements (N_b, 3) as views of the global vector."""
        return [u[self.body_slice(i)].reshape(-1, 3) for i in range(self.n_bodies)]

    def join(self, fields: Sequence[np.ndarray]) -> np.ndarray:
        return np.concatenate([np.asarray(f, dtype=float).ravel() for f in fields])

    def __repr__(self):
        return (
            f"{self.__class__.__name__}(bodies={self.n_bodies}, dofs={self.n_dofs}, "
            f"dirichlet={int(np.count_nonzero(self._dirichlet))})"
        )
