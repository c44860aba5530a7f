"""Master surfaces the slave quadrature points are projected onto."""
from __future__ import annotations

import abc
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from igacontact.nurbs import (
    SurfaceKinematics,
    TensorBasis,
    VOBody,
    kinematics_from_basis,
)

_LOGGER = logging.getLogger(__name__)


class MasterSurface(abc.ABC):
    """A surface parametrised over a rectangle in (xi1, xi2).

    Displacements passed to the methods are those of the owning body's control points,
    shape (N, 3), or None for the reference configuration.
    """

    @property
    @abc.abstractmethod
    def n_local(self) -> int:
        """Non-zero basis functions per point, 0 for surfaces without degrees of freedom."""

    @property
    @abc.abstractmethod
    def bounds(self) -> np.ndarray:
        """Parameter bounds (2, 2) ``[direction, lo/hi]``."""

    @abc.abstractmethod
    def kinematics(
        self, xis: np.ndarray, u: Optional[np.ndarray] = None
    ) -> Tuple[SurfaceKinematics, Optional[TensorBasis]]:
        """Kinematics at parameters (P, 2) and the basis used to compute them. The basis
        indices refer to control points of the owning body."""

    @abc.abstractmethod
    def element_centers(self) -> np.ndarray:
        """Parameters (E, 2) of the element centers used as projection seeds."""

    @abc.abstractmethod
    def length_scale(self) -> float:
        """Characteristic size used to normalise projection tolerances."""

    def clamp(self, xis: np.ndarray) -> np.ndarray:
        bounds = self.bounds
        return np.clip(xis, bounds[:, 0], bounds[:, 1])

    def evaluate(self, xis: np.ndarray, u: Optional[np.ndarray] = None) -> np.ndarray:
        return self.kinematics(xis, u)[0].x

    def kinks(self) -> Tuple[np.ndarray, np.ndarray]:
        """Parameter lines per direction across which the tangents may jump."""
        return np.zeros(0), np.zeros(0)

    def exact_parameters(self, x: np.ndarray) -> Optional[np.ndarray]:
        """Closest point parameters of points (P, 3) when known in closed form."""
        return None

    def element_keys(self, basis: Optional[TensorBasis], n_points: int) -> np.ndarray:
        """An integer per point identifying the element its basis lives on."""
        if basis is None:
            return np.zeros(n_points, dtype=np.int64)
        return basis.spans[:, 0] + (1 << 20) * basis.spans[:, 1]


class NurbsMasterSurface(MasterSurface):
    """Contact surface of a deformable body, deformed by the face control point
    displacements."""

    def __init__(self, body: VOBody):
        self.body = body
        self.surface = body.contact_surface()
        self._bounds = np.array([kv.bounds for kv in self.surface.knot_vectors])
        extent = np.ptp(self.surface.flat_points, axis=0)
        self._length = float(max(np.linalg.norm(extent), 1e-12))

    @property
    def n_local(self) -> int:
        p1, p2 = self.surface.degrees
        return (p1 + 1) * (p2 + 1)

    @property
    def bounds(self) -> np.ndarray:
        return self._bounds

    def face_points(self, u: Optional[np.ndarray] = None) -> np.ndarray:
        pts = self.body.points[self.body.n_bulk :]
        if u is not None:
            pts = pts + u[self.body.n_bulk :]
        return pts

    def kinematics(
        self, xis: np.ndarray, u: Optional[np.ndarray] = None
    ) -> Tuple[SurfaceKinematics, Optional[TensorBasis]]:
        basis = self.surface.basis(np.atleast_2d(xis), der=2)
        kin = kinematics_from_basis(basis, self.face_points(u))
        return kin, TensorBasis(
            indices=basis.indices + self.body.n_bulk,
            values=basis.values,
            grads=basis.grads,
            hessians=basis.hessians,
            spans=basis.spans,
        )

    def element_centers(self) -> np.ndarray:
        return self.surface.element_bounds(self.surface.element_spans()).mean(axis=-1)

    def kinks(self) -> Tuple[np.ndarray, np.ndarray]:
        kv1, kv2 = self.surface.knot_vectors
        return kv1.c0_knots(), kv2.c0_knots()

    def length_scale(self) -> float:
        return self._length

    def __repr__(self):
        return f"{self.__class__.__name__}(body={self.body.name!r}, surface={self.surface!r})"


class RigidPlane(MasterSurface):
    """Fixed, infinite plane ``x = point + xi1 e1 + xi2 e2`` with unit normal ``e1 x e2``
    pointing towards the slave body.

    :param point: A point on the plane
    :param normal: Outward normal, normalised on construction
    :raises ValueError: Zero normal
    """

    def __init__(
        self,
        point: Sequence[float],
        normal: Sequence[float],
        tangent: Optional[Sequence[float]] = None,
    ):
        n = np.asarray(normal, dtype=float)
        norm = np.linalg.norm(n)
        if norm == 0.0:
            raise ValueError("rigid plane normal must not vanish")
        n = n / norm
        if tangent is None:
            helper = np.eye(3)[int(np.argmin(np.abs(n)))]
            tangent = helper - n * (helper @ n)
        e1 = np.asarray(tangent, dtype=float)
        e1 = e1 - n * (e1 @ n)
        e1 /= np.linalg.norm(e1)
        self.point = np.asarray(point, dtype=float)
        self.normal = n
        self.frame = np.stack([e1, np.cross(n, e1)])

    @property
    def n_local(self) -> int:
        return 0

    @property
    def bounds(self) -> np.ndarray:
        return np.array([[-np.inf, np.inf], [-np.inf, np.inf]])

    def exact_parameters(self, x: np.ndarray) -> Optional[np.ndarray]:
        return (np.atleast_2d(x) - self.point) @ self.frame.T

    def kinematics(
        self, xis: np.ndarray, u: Optional[np.ndarray] = None
    ) -> Tuple[SurfaceKinematics, Optional[TensorBasis]]:
        xis = np.atleast_2d(xis)
        n_pts = xis.shape[0]
        kin = SurfaceKinematics(
            x=self.point + xis @ self.frame,
            tangents=np.broadcast_to(self.frame, (n_pts, 2, 3)).copy(),
            second=np.zeros((n_pts, 2, 2, 3)),
            normal=np.broadcast_to(self.normal, (n_pts, 3)).copy(),
            metric=np.broadcast_to(np.eye(2), (n_pts, 2, 2)).copy(),
            curvature=np.zeros((n_pts, 2, 2)),
            area=np.ones(n_pts),
        )
        return kin, None

    def element_centers(self) -> np.ndarray:
        return np.zeros((1, 2))

    def length_scale(self) -> float:
        return 1.0

    def __repr__(self):
        return f"{self.__class__.__name__}(point={self.point.tolist()}, normal={self.normal.tolist()})"
