"""External force vectors: dead pressure on a parametric face and body forces."""
from __future__ import annotations

import logging
from typing import Optional, Sequence

import numpy as np

from igacontact.continuum.defs import LoadFaceError
from igacontact.continuum.element import ElementQuadData
from igacontact.nurbs import Face, VOBody
from igacontact.spline import gauss_legendre

_LOGGER = logging.getLogger(__name__)


def _face_points(body: VOBody, face: Face, n_points: Optional[Sequence[int]]):
    """Parameters and weights of a Gauss rule on every element of an oriented face."""
    vol = body.volume
    a, b = face.in_surface_axes()
    kvs = vol.knot_vectors
    degrees = list(vol.degrees)
    degrees[0], degrees[1] = body.surface.degrees
    counts = (
        [degrees[a] + 1, degrees[b] + 1] if n_points is None else list(n_points)
    )
    xis = []
    wts = []
    for d, n in zip((a, b), counts):
        rule = gauss_legendre(n)
        kv = kvs[d]
        pts_d = []
        wts_d = []
        for span in kv.spans:
            p, w = rule.mapped(*kv.span_bounds(span))
            pts_d.append(p)
            wts_d.append(w)
        xis.append(np.concatenate(pts_d))
        wts.append(np.concatenate(wts_d))
    ga, gb = np.meshgrid(xis[0], xis[1], indexing="ij")
    wa, wb = np.meshgrid(wts[0], wts[1], indexing="ij")
    params = np.empty((ga.size, 3))
    params[:, a] = ga.ravel()
    params[:, b] = gb.ravel()
    lo, hi = kvs[face.axis].bounds
    params[:, face.axis] = hi if face.at_max else lo
    return params, (wa * wb).ravel()


def pressure_force(
    body: VOBody,
    face: Face,
    pressure: float,
    n_points: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """Control point forces (N, 3) of a uniform dead pressure acting against the outward
    reference normal of ``face``.

    :param face: Face in the parametrisation the body was built from
    :param n_points: Gauss points per face direction, default degree + 1
    :raises LoadFaceError: Unknown face or a face without area
    """
    try:
        face = body.orientation.map_face(Face(face))
    except ValueError as e:
        raise LoadFaceError(str(face), "not a parametric boundary face") from e
    params, wts = _face_points(body, face, n_points)
    kv3 = body.volume.knot_vectors[2]
    in_layer = params[:, 2] >= kv3.knots[kv3.n_basis - 1]
    a, b = face.in_surface_axes()
    # outward orientation of the cyclic tangent pair for faces at max
    sign = 1.0 if face.at_max else -1.0
    if face.axis == 1:
        sign = -sign
    force = np.zeros((body.control_count, 3))
    area = 0.0
    for mask, evaluate in ((in_layer, body.layer_basis), (~in_layer, body.bulk_basis)):
        if not np.any(mask):
            continue
        basis = evaluate(params[mask])
        dx = basis.map_grad(body.points)
        normal_area = sign * np.cross(dx[:, :, a], dx[:, :, b])
        area += float(np.sum(np.linalg.norm(normal_area, axis=1) * wts[mask]))
        contrib = -pressure * np.einsum(
            "pa,pi,p->pai", basis.values, normal_area, wts[mask]
        )
        np.add.at(force, basis.indices, contrib)
    if area <= 0.0:
        raise LoadFaceError(face.value, "face has no area")
    _LOGGER.debug(f"{body.name}: pressure {pressure} on {face.value}, area {area:.6g}")
    return force


def body_force(quad: Sequence[ElementQuadData], n_cp: int, density_force) -> np.ndarray:
    """Control point forces of a constant body force density (force per reference volume)."""
    force = np.zeros((n_cp, 3))
    b = np.asarray(density_force, dtype=float)
    for elem in quad:
        contrib = np.einsum("ega,eg->ea", elem.values, elem.weights)[..., None] * b
        np.add.at(force, elem.conn, contrib)
    return force


def element_external_force(
    body: VOBody,
    quad: Sequence[ElementQuadData],
    face: Optional[Face] = None,
    pressure: float = 0.0,
    density_force: Optional[Sequence[float]] = None,
) -> np.ndarray:
    """Sum of a face pressure and a body force, shape (N, 3)."""
    force = np.zeros((body.control_count, 3))
    if face is not None and pressure != 0.0:
        force += pressure_force(body, face, pressure)
    if density_force is not None:
        force += body_force(quad, body.control_count, density_force)
    return force
