from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from igacontact.nurbs.basis import TensorBasis, flatten_grid, rational_basis
from igacontact.nurbs.defs import KinematicsError
from igacontact.spline import KnotVector, elevate_degree

_LOGGER = logging.getLogger(__name__)

# Tangent cross product norms below this are treated as degenerate
DEGENERATE_TOL = 1e-12


class NurbsSurface:
    """Bi-variate NURBS surface.

    :param knot_vectors: Knot vectors of both parametric directions
    :param points: Control points, shape (n1, n2, 3)
    :param weights: Control weights, shape (n1, n2), strictly positive
    """

    def __init__(
        self,
        knot_vectors: Sequence[KnotVector],
        points: np.ndarray,
        weights: np.ndarray,
    ):
        points = np.array(points, dtype=float)
        weights = np.array(weights, dtype=float)
        kvs = tuple(knot_vectors)
        if len(kvs) != 2:
            raise ValueError("a surface needs two knot vectors")
        shape = tuple(kv.n_basis for kv in kvs)
        if points.shape != shape + (3,) or weights.shape != shape:
            raise ValueError(
                f"control grid {points.shape} does not match knot vectors {shape}"
            )
        if np.any(weights <= 0.0):
            raise ValueError("control weights must be strictly positive")
        self._kvs = kvs
        self._points = points
        self._weights = weights
        self._flat_points = flatten_grid(points, 2)

    @property
    def knot_vectors(self) -> Tuple[KnotVector, KnotVector]:
        return self._kvs

    @property
    def degrees(self) -> Tuple[int, int]:
        return self._kvs[0].degree, self._kvs[1].degree

    @property
    def shape(self) -> Tuple[int, int]:
        return self._points.shape[:2]

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def control_count(self) -> int:
        return self._points.shape[0] * self._points.shape[1]

    @property
    def flat_points(self) -> np.ndarray:
        return self._flat_points

    @property
    def flat_weights(self) -> np.ndarray:
        return flatten_grid(self._weights, 2)

    @property
    def element_shape(self) -> Tuple[int, int]:
        return self._kvs[0].n_spans, self._kvs[1].n_spans

    def element_spans(self) -> np.ndarray:
        """Span index pairs of all elements, first direction running fastest."""
        s1, s2 = self._kvs[0].spans, self._kvs[1].spans
        grid = np.stack(np.meshgrid(s1, s2, indexing="xy"), axis=-1)
        return grid.reshape(-1, 2)

    def element_bounds(self, spans: np.ndarray) -> np.ndarray:
        """Parametric bounds (E, 2, 2) ``[e, direction, lo/hi]`` for span pairs (E, 2)."""
        spans = np.atleast_2d(spans)
        out = np.empty((spans.shape[0], 2, 2))
        for d, kv in enumerate(self._kvs):
            out[:, d, 0] = kv.knots[spans[:, d]]
            out[:, d, 1] = kv.knots[spans[:, d] + 1]
        return out

    def clamp(self, xis: np.ndarray) -> np.ndarray:
        out = np.array(xis, dtype=float)
        for d, kv in enumerate(self._kvs):
            lo, hi = kv.bounds
            out[..., d] = np.clip(out[..., d], lo, hi)
        return out

    def basis(self, xis: np.ndarray, der: int = 2) -> TensorBasis:
        return rational_basis(self._kvs, self._weights, xis, der)

    def evaluate(self, xis: np.ndarray) -> np.ndarray:
        return self.basis(xis, der=1).map(self._flat_points)

    def elevate(self, steps: Sequence[int]) -> NurbsSurface:
        """Raise the degree of both directions by ``steps`` without changing the geometry."""
        ctrl = np.concatenate([self._points, self._weights[..., None]], axis=-1)
        kvs = list(self._kvs)
        for d, s in enumerate(steps):
            if s < 1:
                continue
            moved = np.moveaxis(ctrl, d, 0)
            kvs[d], moved = elevate_degree(kvs[d], moved, s)
            ctrl = np.moveaxis(moved, 0, d)
        return NurbsSurface(kvs, ctrl[..., :3], ctrl[..., 3])

    def __repr__(self):
        return (
            f"{self.__class__.__name__}(degrees={self.degrees}, shape={self.shape}, "
            f"elements={self.element_shape})"
        )


@dataclass(frozen=True)
class SurfaceKinematics:
    """Differential geometry of a surface at P points.

    :var x: Points (P, 3)
    :var tangents: Covariant tangents (P, 2, 3), ``tangents[:, a]`` = dx/dxi_a
    :var second: Second derivatives (P, 2, 2, 3)
    :var normal: Unit normals (P, 3), oriented along tau_1 x tau_2
    :var metric: Covariant metric (P, 2, 2)
    :var curvature: Curvature components x_{,ab}.n (P, 2, 2)
    :var area: Area element |tau_1 x tau_2| (P,)
    """

    x: np.ndarray
    tangents: np.ndarray
    second: np.ndarray
    normal: np.ndarray
    metric: np.ndarray
    curvature: np.ndarray
    area: np.ndarray

    @property
    def degenerate(self) -> np.ndarray:
        return self.area <= DEGENERATE_TOL


def kinematics_from_basis(basis: TensorBasis, points: np.ndarray) -> SurfaceKinematics:
    """Differential quantities from an evaluated surface basis and flat control points
    (already displaced, if the surface is deformed)."""
    ctrl = points[basis.indices]
    x = np.einsum("pa,pai->pi", basis.values, ctrl)
    tangents = np.einsum("pad,pai->pdi", basis.grads, ctrl)
    if basis.hessians is None:
        second = np.zeros(tangents.shape[:2] + (2, 3))
    else:
        second = np.einsum("pade,pai->pdei", basis.hessians, ctrl)
    cross = np.cross(tangents[:, 0], tangents[:, 1])
    area = np.linalg.norm(cross, axis=-1)
    safe = np.where(area > DEGENERATE_TOL, area, 1.0)
    normal = cross / safe[:, None]
    metric = np.einsum("pai,pbi->pab", tangents, tangents)
    curvature = np.einsum("pabi,pi->pab", second, normal)
    return SurfaceKinematics(
        x=x,
        tangents=tangents,
        second=second,
        normal=normal,
        metric=metric,
        curvature=curvature,
        area=area,
    )


def surface_basis_batch(
    surface: NurbsSurface, xis: np.ndarray, der: int = 2
) -> TensorBasis:
    """Rational basis values, first and second parametric derivatives and control indices
    at many surface parameters."""
    return surface.basis(np.atleast_2d(xis), der)


def surface_kinematics(
    surface: NurbsSurface,
    xi: Sequence[float],
    points: Optional[np.ndarray] = None,
) -> SurfaceKinematics:
    """Point, tangents, second derivatives, normal and metric at one parameter pair.

    :param points: Optional flat control points replacing the reference net
    :raises KinematicsError: tau_1 x tau_2 vanishes at ``xi``
    """
    basis = surface_basis_batch(surface, np.asarray(xi, dtype=float)[None, :])
    kin = kinematics_from_basis(
        basis, surface.flat_points if points is None else points
    )
    if kin.degenerate[0]:
        raise KinematicsError(tuple(xi))
    return kin
