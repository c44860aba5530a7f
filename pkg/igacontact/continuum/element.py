"""Batched element quadrature data and Neo-Hookean element routines.

An :py:class:`ElementQuadData` holds the reference configuration data of a group of elements
sharing one local function count (all bulk elements or all contact-layer elements of a body),
so element forces and stiffness matrices are evaluated for the whole group with ``einsum``.
Element vectors use the layout ``[a, i]`` (control point, direction), stiffness matrices
``[a, i, b, k]``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from igacontact.continuum.defs import ElementInversionError
from igacontact.continuum.material import (
    DeformationState,
    MaterialParams,
    cauchy_stress,
    deformation_state,
    strain_energy,
    tangent_moduli,
)
from igacontact.nurbs import ElementGroup, MeshQualityError, VOBody
from igacontact.spline import gauss_legendre

_LOGGER = logging.getLogger(__name__)

# Quadrature points with det J below this fraction of the element maximum are dropped
DEGENERATE_DET_FRACTION = 1e-12


@dataclass(frozen=True)
class ElementQuadData:
    """Reference quadrature data of E elements with G points and n local functions.

    :var element_ids: Global element ids (E,)
    :var conn: Control point indices (E, n)
    :var values: Basis values (E, G, n)
    :var grads: Reference gradients dR/dX (E, G, n, 3)
    :var weights: Quadrature weight times reference det J (E, G)
    :var points: Reference positions of the quadrature points (E, G, 3)
    """

    element_ids: np.ndarray
    conn: np.ndarray
    values: np.ndarray
    grads: np.ndarray
    weights: np.ndarray
    points: np.ndarray

    @property
    def n_elements(self) -> int:
        return self.conn.shape[0]

    @property
    def n_local(self) -> int:
        return self.conn.shape[1]

    def subset(self, sl: slice) -> ElementQuadData:
        return ElementQuadData(
            element_ids=self.element_ids[sl],
            conn=self.conn[sl],
            values=self.values[sl],
            grads=self.grads[sl],
            weights=self.weights[sl],
            points=self.points[sl],
        )

    def gather(self, u: np.ndarray) -> np.ndarray:
        """Element displacements (E, n, 3) from body control point displacements (N, 3)."""
        return u[self.conn]


def tensor_rule(counts) -> tuple:
    """Tensor Gauss-Legendre rule on [-1, 1]^3, first direction running fastest."""
    rules = [gauss_legendre(n) for n in counts]
    pts = np.stack(
        np.meshgrid(*[r.points for r in rules[::-1]], indexing="ij")[::-1], axis=-1
    ).reshape(-1, 3)
    wts = np.einsum(
        "k,j,i->kji", rules[2].weights, rules[1].weights, rules[0].weights
    ).reshape(-1)
    return pts, wts


def element_quad_data(
    body: VOBody,
    group: ElementGroup,
    quad_points: Optional[tuple] = None,
) -> ElementQuadData:
    """Evaluate basis functions and reference gradients at the Gauss points of a group.

    :raises MeshQualityError: Negative reference Jacobian determinant
    """
    counts = group.quad_points if quad_points is None else quad_points
    ref_pts, ref_wts = tensor_rule(counts)
    bounds = body.volume.element_bounds(group.spans)
    lo, hi = bounds[..., 0], bounds[..., 1]
    half = 0.5 * (hi - lo)
    xis = 0.5 * (hi + lo)[:, None, :] + half[:, None, :] * ref_pts[None, :, :]
    n_el, n_gp = xis.shape[:2]
    basis = body.group_basis(group, xis.reshape(-1, 3))
    n_loc = basis.indices.shape[1]
    values = basis.values.reshape(n_el, n_gp, n_loc)
    dr_dxi = basis.grads.reshape(n_el, n_gp, n_loc, 3)
    ctrl = body.points[group.conn]
    jac = np.einsum("eai,egad->egid", ctrl, dr_dxi)
    det = np.linalg.det(jac)
    scale = np.max(np.abs(det), axis=1, keepdims=True)
    degenerate = np.abs(det) <= DEGENERATE_DET_FRACTION * scale
    inverted = (det < 0.0) & ~degenerate
    if np.any(inverted):
        e, g = np.argwhere(inverted)[0]
        raise MeshQualityError(int(group.ids[e]), float(det[e, g]))
    if np.any(degenerate):
        _LOGGER.warning(
            f"{body.name}: dropping {np.count_nonzero(degenerate)} degenerate quadrature points"
        )
    safe = np.where(degenerate[..., None, None], np.eye(3), jac)
    inv = np.linalg.inv(safe)
    grads = np.einsum("egad,egdj->egaj", dr_dxi, inv)
    grads[degenerate] = 0.0
    weights = ref_wts[None, :] * np.prod(half, axis=1)[:, None] * det
    weights[degenerate] = 0.0
    points = np.einsum("ega,eai->egi", values, ctrl)
    return ElementQuadData(
        element_ids=group.ids,
        conn=group.conn,
        values=values,
        grads=grads,
        weights=weights,
        points=points,
    )


def deformation_gradient(elem: ElementQuadData, u_e: np.ndarray) -> DeformationState:
    """F = I + du/dX at all quadrature points.

    :param u_e: Element displacements (E, n, 3)
    :raises ElementInversionError: det F <= 0 at a quadrature point
    """
    F = np.eye(3) + np.einsum("eai,egaj->egij", u_e, elem.grads)
    state = deformation_state(F)
    active = elem.weights > 0.0
    bad = (state.J <= 0.0) & active
    if np.any(bad):
        e, g = np.argwhere(bad)[0]
        raise ElementInversionError(int(elem.element_ids[e]), float(state.J[e, g]))
    # dropped points carry no weight, keep their state finite
    if not np.all(active):
        F = np.where(active[..., None, None], F, np.eye(3))
        state = deformation_state(F)
    return state


def spatial_gradients(elem: ElementQuadData, state: DeformationState) -> np.ndarray:
    """dR/dx = dR/dX F^-1, shape (E, G, n, 3)."""
    return np.einsum("egak,egkj->egaj", elem.grads, np.linalg.inv(state.F))


def element_strain_energy(
    elem: ElementQuadData, u_e: np.ndarray, mat: MaterialParams
) -> np.ndarray:
    state = deformation_gradient(elem, u_e)
    return np.einsum("eg,eg->e", strain_energy(state, mat), elem.weights)


def element_internal_force(
    elem: ElementQuadData, u_e: np.ndarray, mat: MaterialParams
) -> np.ndarray:
    """Internal forces (E, n, 3), the integral of sigma grad_x R over the current
    configuration."""
    state = deformation_gradient(elem, u_e)
    sigma = cauchy_stress(state, mat)
    gx = spatial_gradients(elem, state)
    dv = elem.weights * state.J
    return np.einsum("egij,egaj,eg->eai", sigma, gx, dv)


def element_stiffness(
    elem: ElementQuadData, u_e: np.ndarray, mat: MaterialParams
) -> np.ndarray:
    """Tangent stiffness (E, n, 3, n, 3): material part with the Neo-Hookean spatial moduli
    plus the initial stress part."""
    return element_force_and_stiffness(elem, u_e, mat)[1]


def element_force_and_stiffness(
    elem: ElementQuadData, u_e: np.ndarray, mat: MaterialParams
) -> Tuple[np.ndarray, np.ndarray]:
    """Internal forces and stiffness sharing one kinematic evaluation."""
    state = deformation_gradient(elem, u_e)
    sigma = cauchy_stress(state, mat)
    gx = spatial_gradients(elem, state)
    dv = elem.weights * state.J
    force = np.einsum("egij,egaj,eg->eai", sigma, gx, dv)
    lam_eff, mu_eff = tangent_moduli(state, mat)
    k = np.einsum("eg,egai,egbk->eaibk", lam_eff * dv, gx, gx)
    k += np.einsum("eg,egak,egbi->eaibk", mu_eff * dv, gx, gx)
    stress = sigma + mu_eff[..., None, None] * np.eye(3)
    geo = np.einsum("egaj,egjl,egbl,eg->eab", gx, stress, gx, dv)
    k += geo[:, :, None, :, None] * np.eye(3)[None, None, :, None, :]
    return force, k
