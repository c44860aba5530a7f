from __future__ import annotations

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from igacontact.nurbs.basis import TensorBasis, flatten_grid, rational_basis
from igacontact.nurbs.faces import Face, Orientation, orientation_to_top
from igacontact.nurbs.surface import NurbsSurface
from igacontact.spline import KnotVector, elevate_degree, insert_knots

_LOGGER = logging.getLogger(__name__)


class NurbsVolume:
    """Tri-variate NURBS solid.

    :param knot_vectors: Knot vectors of the three parametric directions
    :param points: Control points, shape (n1, n2, n3, 3)
    :param weights: Control weights, shape (n1, n2, n3), strictly positive
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
        if len(kvs) != 3:
            raise ValueError("a volume needs three knot vectors")
        shape = tuple(kv.n_basis for kv in kvs)
        if points.shape != shape + (3,) or weights.shape != shape:
            raise ValueError(
                f"control grid {points.shape[:3]} does not match knot vectors {shape}"
            )
        if np.any(weights <= 0.0):
            raise ValueError("control weights must be strictly positive")
        self._kvs = kvs
        self._points = points
        self._weights = weights
        self._flat_points = flatten_grid(points, 3)
        self._flat_points.setflags(write=False)

    @classmethod
    def from_control(
        cls, knot_vectors: Sequence[KnotVector], ctrl: np.ndarray
    ) -> NurbsVolume:
        """Build from a (n1, n2, n3, 4) array of Cartesian coordinates and weights."""
        return cls(knot_vectors, ctrl[..., :3], ctrl[..., 3])

    @property
    def knot_vectors(self) -> Tuple[KnotVector, KnotVector, KnotVector]:
        return self._kvs

    @property
    def degrees(self) -> Tuple[int, int, int]:
        return tuple(kv.degree for kv in self._kvs)

    @property
    def shape(self) -> Tuple[int, int, int]:
        return self._points.shape[:3]

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def control(self) -> np.ndarray:
        return np.concatenate([self._points, self._weights[..., None]], axis=-1)

    @property
    def flat_points(self) -> np.ndarray:
        """Control points (N, 3), index ``i + n1*(j + n2*k)``."""
        return self._flat_points

    @property
    def flat_weights(self) -> np.ndarray:
        return flatten_grid(self._weights, 3)

    @property
    def control_count(self) -> int:
        return int(np.prod(self.shape))

    @property
    def element_shape(self) -> Tuple[int, int, int]:
        return tuple(kv.n_spans for kv in self._kvs)

    @property
    def element_count(self) -> int:
        return int(np.prod(self.element_shape))

    def element_spans(self) -> np.ndarray:
        """Span index triples of all elements (E, 3), first direction running fastest."""
        s1, s2, s3 = (kv.spans for kv in self._kvs)
        k, j, i = np.meshgrid(s3, s2, s1, indexing="ij")
        return np.stack([i.ravel(), j.ravel(), k.ravel()], axis=1)

    def element_bounds(self, spans: np.ndarray) -> np.ndarray:
        """Parametric bounds (E, 3, 2) for span triples (E, 3)."""
        spans = np.atleast_2d(spans)
        out = np.empty((spans.shape[0], 3, 2))
        for d, kv in enumerate(self._kvs):
            out[:, d, 0] = kv.knots[spans[:, d]]
            out[:, d, 1] = kv.knots[spans[:, d] + 1]
        return out

    def element_centers(self) -> np.ndarray:
        return self.element_bounds(self.element_spans()).mean(axis=-1)

    def random_parameters(self, n: int, rng: np.random.Generator) -> np.ndarray:
        lo = np.array([kv.bounds[0] for kv in self._kvs])
        hi = np.array([kv.bounds[1] for kv in self._kvs])
        return lo + (hi - lo) * rng.random((n, 3))

    def basis(self, xis: np.ndarray, der: int = 1) -> TensorBasis:
        return rational_basis(self._kvs, self._weights, xis, der)

    def evaluate(
        self, xis: np.ndarray, displacement: Optional[np.ndarray] = None
    ) -> Tuple[np.ndarray, np.ndarray]:
        """Points (P, 3) and Jacobians dx/dxi (P, 3, 3) at parameters (P, 3)."""
        basis = self.basis(np.atleast_2d(xis), der=1)
        ctrl = self._flat_points
        if displacement is not None:
            ctrl = ctrl + displacement
        return basis.map(ctrl), basis.map_grad(ctrl)

    def insert(self, knots: Sequence[Sequence[float]]) -> NurbsVolume:
        """Insert knots per direction, preserving the geometry."""
        ctrl = self.control
        kvs = list(self._kvs)
        for d, new in enumerate(knots):
            if len(new) == 0:
                continue
            moved = np.moveaxis(ctrl, d, 0)
            kvs[d], moved = insert_knots(kvs[d], moved, new)
            ctrl = np.moveaxis(moved, 0, d)
        return NurbsVolume.from_control(kvs, ctrl)

    def elevate(self, steps: Sequence[int]) -> NurbsVolume:
        """Raise the degree per direction, preserving the geometry."""
        ctrl = self.control
        kvs = list(self._kvs)
        for d, s in enumerate(steps):
            if s < 1:
                continue
            moved = np.moveaxis(ctrl, d, 0)
            kvs[d], moved = elevate_degree(kvs[d], moved, s)
            ctrl = np.moveaxis(moved, 0, d)
        return NurbsVolume.from_control(kvs, ctrl)

    def reoriented(self, orientation: Orientation) -> NurbsVolume:
        kvs = []
        for b, a in enumerate(orientation.perm):
            kv = self._kvs[a]
            if orientation.flips[b]:
                lo, hi = kv.bounds
                kv = KnotVector(lo + hi - kv.knots[::-1], kv.degree)
            kvs.append(kv)
        return NurbsVolume.from_control(kvs, orientation.apply_grid(self.control))

    def face_slab(self, face: Face) -> np.ndarray:
        """Grid indices (i, j, k) of the control points on ``face``, shape (m1, m2, 3)."""
        face = Face(face)
        ranges = [np.arange(n) for n in self.shape]
        ranges[face.axis] = np.array([self.shape[face.axis] - 1 if face.at_max else 0])
        grid = np.stack(np.meshgrid(*ranges, indexing="ij"), axis=-1)
        return np.squeeze(grid, axis=face.axis)

    def face_indices(self, face: Face) -> np.ndarray:
        """Flat control point indices on ``face``, sorted."""
        slab = self.face_slab(face).reshape(-1, 3)
        n1, n2, _ = self.shape
        return np.sort(slab[:, 0] + n1 * (slab[:, 1] + n2 * slab[:, 2]))

    def jacobian_signs(self) -> np.ndarray:
        _, jac = self.evaluate(self.element_centers())
        return np.sign(np.linalg.det(jac))

    def __repr__(self):
        return (
            f"{self.__class__.__name__}(degrees={self.degrees}, shape={self.shape}, "
            f"elements={self.element_shape})"
        )


def eval_volume(vol: NurbsVolume, xi: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """Physical point and Jacobian dx/dxi at one parameter triple.

    :raises KnotDomainError: xi lies outside the knot ranges
    """
    x, jac = vol.evaluate(np.asarray(xi, dtype=float)[None, :])
    return x[0], jac[0]


def refine_h(vol: NurbsVolume, new_knots: Sequence[Sequence[float]]) -> NurbsVolume:
    return vol.insert(new_knots)


def extract_face_surface(vol: NurbsVolume, face: Face) -> NurbsSurface:
    """Boundary surface of ``vol`` on ``face``. The surface directions are the remaining
    volume directions in increasing order."""
    face = Face(face)
    index = vol.shape[face.axis] - 1 if face.at_max else 0
    points = np.take(vol.points, index, axis=face.axis)
    weights = np.take(vol.weights, index, axis=face.axis)
    a, b = face.in_surface_axes()
    return NurbsSurface((vol.knot_vectors[a], vol.knot_vectors[b]), points, weights)


def orient_to_face(vol: NurbsVolume, face: Face) -> Tuple[NurbsVolume, Orientation]:
    """Re-parametrise ``vol`` so ``face`` becomes xi3 = max with a right-handed map.

    Left-handed volumes are additionally reversed along xi1.
    """
    orientation = orientation_to_top(face)
    out = vol.reoriented(orientation)
    signs = out.jacobian_signs()
    if np.count_nonzero(signs < 0) > np.count_nonzero(signs > 0):
        _LOGGER.info("Left-handed parametrisation, reversing xi1")
        orientation = orientation.with_flip(0)
        out = vol.reoriented(orientation)
    return out, orientation
