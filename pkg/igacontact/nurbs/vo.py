"""Varying-order bodies.

A varying-order body keeps the bulk of a NURBS volume at its original degrees and replaces
the control points of the contact face by those of a degree elevated face surface. The
elements of the through-thickness span next to the contact face (the contact layer) combine
the elevated in-surface functions on the face slab with the original functions on the
interior slabs, all normalised by one common weight function.

The contact face is always xi3 = max of the stored volume; :py:func:`build_vo_body`
re-parametrises the input volume accordingly. Merged control table layout:

- bulk points ``i + n1*(j + n2*k)`` for ``k < n3 - 1``, numbered exactly as in the volume
- face points ``n1*n2*(n3-1) + ic + nc1*jc`` of the elevated surface

With zero elevation steps the merged table and all connectivities coincide with those of the
plain volume.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from igacontact.nurbs.basis import (
    TensorBasis,
    local_indices,
    rationalize,
    tensor_derivatives,
    univariate,
)
from igacontact.nurbs.defs import VOConstructionError, VOMisuseError
from igacontact.nurbs.faces import Face, Orientation
from igacontact.nurbs.surface import NurbsSurface, kinematics_from_basis
from igacontact.nurbs.volume import NurbsVolume, extract_face_surface, orient_to_face

_LOGGER = logging.getLogger(__name__)


class ElementKind(str, enum.Enum):
    BULK = "bulk"
    LAYER = "layer"


@dataclass(frozen=True)
class ElementGroup:
    """Elements of one kind sharing the same number of local functions.

    :var ids: Global element ids (E,)
    :var spans: Volume knot span triples (E, 3)
    :var conn: Merged control point indices (E, nloc)
    :var quad_points: Gauss points per parametric direction
    """

    kind: ElementKind
    ids: np.ndarray
    spans: np.ndarray
    conn: np.ndarray
    quad_points: Tuple[int, int, int]

    @property
    def size(self) -> int:
        return len(self.ids)

    @property
    def n_local(self) -> int:
        return self.conn.shape[1]


@dataclass(frozen=True)
class VOBasisEval:
    values: np.ndarray
    gradients: np.ndarray


class VOBody:
    """Varying-order body with the contact face at xi3 = max of ``volume``.

    Instances are created by :py:func:`build_vo_body`.
    """

    def __init__(
        self,
        volume: NurbsVolume,
        surface: NurbsSurface,
        steps: int,
        contact_face: Face,
        orientation: Orientation,
        name: str = "",
    ):
        n1, n2, n3 = volume.shape
        if n3 < 2:
            raise VOConstructionError(
                "the volume needs at least one element through the thickness"
            )
        self.name = name
        self._volume = volume
        self._surface = surface
        self._steps = steps
        self._contact_face = Face(contact_face)
        self._orientation = orientation
        self._n_bulk = n1 * n2 * (n3 - 1)
        self._points = np.concatenate(
            [volume.flat_points[: self._n_bulk], surface.flat_points], axis=0
        )
        self._weights = np.concatenate(
            [volume.flat_weights[: self._n_bulk], surface.flat_weights]
        )
        self._points.setflags(write=False)
        self._build_groups()

    def _build_groups(self):
        vol = self._volume
        spans = vol.element_spans()
        ids = np.arange(len(spans))
        last = vol.knot_vectors[2].spans[-1]
        layer = spans[:, 2] == last
        p1, p2, p3 = vol.degrees
        pc1, pc2 = self._surface.degrees

        centers = vol.element_bounds(spans).mean(axis=-1)
        bulk_spans = spans[~layer]
        bulk_conn = local_indices(bulk_spans, vol.degrees, vol.shape)
        self._bulk = ElementGroup(
            kind=ElementKind.BULK,
            ids=ids[~layer],
            spans=bulk_spans,
            conn=bulk_conn,
            quad_points=(p1 + 1, p2 + 1, p3 + 1),
        )
        layer_basis = self.layer_basis(centers[layer])
        self._layer = ElementGroup(
            kind=ElementKind.LAYER,
            ids=ids[layer],
            spans=spans[layer],
            conn=layer_basis.indices,
            quad_points=(pc1 + 1, pc2 + 1, p3 + 1),
        )
        self._is_layer = layer

    @property
    def volume(self) -> NurbsVolume:
        return self._volume

    @property
    def surface(self) -> NurbsSurface:
        return self._surface

    @property
    def steps(self) -> int:
        return self._steps

    @property
    def contact_face(self) -> Face:
        """Contact face in the parametrisation the body was built from."""
        return self._contact_face

    @property
    def orientation(self) -> Orientation:
        return self._orientation

    @property
    def points(self) -> np.ndarray:
        """Merged control points (N, 3)."""
        return self._points

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def n_bulk(self) -> int:
        return self._n_bulk

    @property
    def n_face(self) -> int:
        return self._surface.control_count

    @property
    def control_count(self) -> int:
        return self._n_bulk + self.n_face

    @property
    def bulk_elements(self) -> ElementGroup:
        return self._bulk

    @property
    def layer_elements(self) -> ElementGroup:
        return self._layer

    @property
    def groups(self) -> Tuple[ElementGroup, ElementGroup]:
        return self._bulk, self._layer

    @property
    def element_count(self) -> int:
        return len(self._is_layer)

    def element_kind(self, element: int) -> ElementKind:
        return ElementKind.LAYER if self._is_layer[element] else ElementKind.BULK

    def element_spans(self, element: int) -> np.ndarray:
        return self._volume.element_spans()[element]

    def layer_basis(
        self, xis: np.ndarray, element: Optional[int] = None
    ) -> TensorBasis:
        """Varying-order basis of the contact-layer elements at parameters (P, 3) lying in
        the last thickness span.

        ``grads`` holds the parametric gradients (P, nloc, 3).
        """
        xis = np.atleast_2d(np.asarray(xis, dtype=float))
        vol = self._volume
        p1, p2, p3 = vol.degrees
        spans, ders = univariate(vol.knot_vectors, xis, 1)
        if np.any(spans[:, 2] != vol.knot_vectors[2].n_basis - 1):
            raise VOMisuseError(-1 if element is None else element)
        n_slab = (p1 + 1) * (p2 + 1)

        values, grads, _ = tensor_derivatives(ders, 1)
        idx = local_indices(spans, vol.degrees, vol.shape)
        bulk_values = values[:, : n_slab * p3]
        bulk_grads = grads[:, : n_slab * p3]
        bulk_idx = idx[:, : n_slab * p3]

        surf = self._surface
        xi_s = xis[:, :2]
        s_spans, s_ders = univariate(surf.knot_vectors, xi_s, 1)
        face_values, face_grads, _ = tensor_derivatives(s_ders, 1)
        n3_last = ders[2][:, 0, p3]
        dn3_last = ders[2][:, 1, p3]
        face_idx = self._n_bulk + local_indices(s_spans, surf.degrees, surf.shape)
        face_grads3 = np.concatenate(
            [
                face_grads * n3_last[:, None, None],
                (face_values * dn3_last[:, None])[..., None],
            ],
            axis=-1,
        )
        face_values = face_values * n3_last[:, None]

        indices = np.concatenate([bulk_idx, face_idx], axis=1)
        r, dr, _ = rationalize(
            self._weights[indices],
            np.concatenate([bulk_values, face_values], axis=1),
            np.concatenate([bulk_grads, face_grads3], axis=1),
        )
        return TensorBasis(indices=indices, values=r, grads=dr, hessians=None, spans=spans)

    def bulk_basis(self, xis: np.ndarray) -> TensorBasis:
        return self._volume.basis(xis, der=1)

    def group_basis(self, group: ElementGroup, xis: np.ndarray) -> TensorBasis:
        if group.kind == ElementKind.LAYER:
            return self.layer_basis(xis)
        return self.bulk_basis(xis)

    def evaluate(
        self, xis: np.ndarray, displacement: Optional[np.ndarray] = None
    ) -> np.ndarray:
        """Physical points of the (displaced) body at arbitrary parameters (P, 3)."""
        xis = np.atleast_2d(np.asarray(xis, dtype=float))
        ctrl = self._points if displacement is None else self._points + displacement
        kv3 = self._volume.knot_vectors[2]
        in_layer = xis[:, 2] >= kv3.knots[kv3.n_basis - 1]
        out = np.empty((xis.shape[0], 3))
        if np.any(in_layer):
            out[in_layer] = self.layer_basis(xis[in_layer]).map(ctrl)
        if np.any(~in_layer):
            out[~in_layer] = self.bulk_basis(xis[~in_layer]).map(ctrl)
        return out

    def face_nodes(self, face: Face) -> np.ndarray:
        """Merged indices of the control points on a face given in the parametrisation the
        body was built from."""
        face = self._orientation.map_face(Face(face))
        vol = self._volume
        n1, n2, n3 = vol.shape
        nc1, nc2 = self._surface.shape
        if face == Face.XI3_MAX:
            return self._n_bulk + np.arange(self.n_face)
        if face == Face.XI3_MIN:
            return np.arange(n1 * n2)
        bulk = vol.face_indices(face)
        bulk = bulk[bulk < self._n_bulk]
        ic = np.arange(nc1)
        jc = np.arange(nc2)
        if face.axis == 0:
            ic = np.array([nc1 - 1 if face.at_max else 0])
        else:
            jc = np.array([nc2 - 1 if face.at_max else 0])
        grid_i, grid_j = np.meshgrid(ic, jc, indexing="ij")
        top = self._n_bulk + (grid_i + nc1 * grid_j).ravel()
        return np.sort(np.concatenate([bulk, top]))

    def contact_surface(self) -> NurbsSurface:
        return self._surface

    def __repr__(self):
        return (
            f"{self.__class__.__name__}(name={self.name!r}, degrees={self._volume.degrees}, "
            f"face_degrees={self._surface.degrees}, elements={self._volume.element_shape}, "
            f"control_points={self.control_count})"
        )


def _check_face(surface: NurbsSurface):
    spans = surface.element_spans()
    centers = surface.element_bounds(spans).mean(axis=-1)
    kin = kinematics_from_basis(surface.basis(centers, der=1), surface.flat_points)
    bad = kin.degenerate
    if np.any(bad):
        raise VOConstructionError(
            f"face element {int(np.argmax(bad))} has a collapsed parametrisation"
        )


def build_vo_body(
    vol: NurbsVolume, face: Face, elevation_steps: int, name: str = ""
) -> VOBody:
    """Build a varying-order body elevating ``face`` by ``elevation_steps`` in both
    in-surface directions.

    :param vol: Volume with at least one element through the thickness
    :param face: Contact face of ``vol``
    :param elevation_steps: 0 reproduces the uniform-order body
    :raises VOConstructionError: Face elements with collapsed parametrisation
    """
    if elevation_steps < 0:
        raise ValueError(f"invalid elevation steps {elevation_steps}")
    face = Face(face)
    oriented, orientation = orient_to_face(vol, face)
    surface = extract_face_surface(oriented, Face.XI3_MAX)
    if elevation_steps > 0:
        _check_face(surface)
        surface = surface.elevate((elevation_steps, elevation_steps))
    body = VOBody(oriented, surface, elevation_steps, face, orientation, name=name)
    _LOGGER.debug(f"Built {body}")
    return body


def eval_vo_basis(body: VOBody, element: int, xi: Sequence[float]) -> VOBasisEval:
    """Varying-order basis of one contact-layer element at one parameter triple.

    :raises VOMisuseError: ``element`` is a bulk element
    """
    if body.element_kind(element) != ElementKind.LAYER:
        raise VOMisuseError(element)
    bounds = body.volume.element_bounds(body.element_spans(element)[None, :])[0]
    width = bounds[:, 1] - bounds[:, 0]
    xi = np.clip(np.asarray(xi, dtype=float), bounds[:, 0], bounds[:, 1] - 1e-14 * width)
    basis = body.layer_basis(xi[None, :], element=element)
    return VOBasisEval(values=basis.values[0], gradients=basis.grads[0])
