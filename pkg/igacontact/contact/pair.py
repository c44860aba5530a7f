"""Slave/master contact pair: slave quadrature, active set, assembled forces and tangent."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from igacontact.contact.defs import AreaMeasure, FrictionStatus, PenaltyScaling
from igacontact.contact.kernel import KernelInput, PenaltyParams, evaluate_kernel
from igacontact.contact.master import MasterSurface
from igacontact.contact.projection import ProjectionBatch, project_points
from igacontact.contact.traction import FrictionState, commit_history
from igacontact.nurbs import VOBody
from igacontact.spline import gauss_legendre

_LOGGER = logging.getLogger(__name__)

# Stiffness entries evaluated per kernel batch
CHUNK_ENTRIES = 1 << 23


@dataclass(frozen=True)
class SlaveQuadrature:
    """Gauss points on every element of a slave contact surface.

    :var params: Surface parameters (P, 2)
    :var element: Slave surface element per point (P,)
    :var indices: Body control point indices (P, ns)
    :var values: Basis values (P, ns)
    :var grads: Parametric basis derivatives (P, ns, 2)
    :var gauss_weight: Parametric weights (P,)
    :var ref_weight: Weights times the reference area element (P,)
    :var ref_points: Reference positions (P, 3)
    """

    params: np.ndarray
    element: np.ndarray
    indices: np.ndarray
    values: np.ndarray
    grads: np.ndarray
    gauss_weight: np.ndarray
    ref_weight: np.ndarray
    ref_points: np.ndarray

    @property
    def n_points(self) -> int:
        return self.params.shape[0]

    @property
    def n_local(self) -> int:
        return self.values.shape[1]


def slave_quadrature(body: VOBody, n_gp: int) -> SlaveQuadrature:
    surface = body.contact_surface()
    spans = surface.element_spans()
    bounds = surface.element_bounds(spans)
    rule = gauss_legendre(n_gp)
    ref = np.stack(np.meshgrid(rule.points, rule.points, indexing="xy"), axis=-1).reshape(-1, 2)
    ref_w = np.outer(rule.weights, rule.weights).ravel()
    mid = bounds.mean(axis=-1)
    half = 0.5 * (bounds[..., 1] - bounds[..., 0])
    params = (mid[:, None, :] + half[:, None, :] * ref[None]).reshape(-1, 2)
    gauss_weight = (np.prod(half, axis=1)[:, None] * ref_w[None]).ravel()
    element = np.repeat(np.arange(spans.shape[0]), ref.shape[0])
    basis = surface.basis(params, der=1)
    ctrl = surface.flat_points
    tangents = np.einsum("pad,pai->pdi", basis.grads, ctrl[basis.indices])
    area = np.linalg.norm(np.cross(tangents[:, 0], tangents[:, 1]), axis=-1)
    degenerate = area <= 1e-12 * max(float(np.max(area)), 1e-300)
    if np.any(degenerate):
        _LOGGER.warning(
            f"{body.name}: {np.count_nonzero(degenerate)} slave points on collapsed edges carry no weight"
        )
    return SlaveQuadrature(
        params=params,
        element=element,
        indices=basis.indices + body.n_bulk,
        values=basis.values,
        grads=basis.grads,
        gauss_weight=np.where(degenerate, 0.0, gauss_weight),
        ref_weight=np.where(degenerate, 0.0, gauss_weight * area),
        ref_points=basis.map(ctrl),
    )


def min_element_edge(body: VOBody) -> float:
    """Shortest non-vanishing corner-to-corner chord of the slave surface elements in the
    reference configuration."""
    surface = body.contact_surface()
    bounds = surface.element_bounds(surface.element_spans())
    corners = np.stack(
        [
            np.stack([bounds[:, 0, i], bounds[:, 1, j]], axis=-1)
            for j in (0, 1)
            for i in (0, 1)
        ],
        axis=1,
    )
    pts = surface.evaluate(corners.reshape(-1, 2)).reshape(-1, 4, 3)
    edges = np.concatenate(
        [
            np.linalg.norm(pts[:, b] - pts[:, a], axis=-1)
            for a, b in ((0, 1), (2, 3), (0, 2), (1, 3))
        ]
    )
    edges = edges[edges > 1e-12 * max(float(np.max(edges)), 1e-300)]
    return float(np.min(edges))


def scaled_penalty(
    eps_N: float, eps_T: float, mu_f: float, scaling: PenaltyScaling, h_min: float
) -> PenaltyParams:
    if scaling == PenaltyScaling.MIN_ELEMENT_SIZE:
        return PenaltyParams(eps_N / h_min, eps_T / h_min, mu_f)
    return PenaltyParams(eps_N, eps_T, mu_f)


@dataclass
class ContactEvaluation:
    """Assembled contact contribution and per slave point fields of one evaluation.

    :var slave_force: Forces on the slave body control points (N_s, 3)
    :var master_force: Forces on the master body control points, None for rigid masters
    :var tangent: Global COO triplets ``(rows, cols, data)`` or None
    """

    slave_force: np.ndarray
    master_force: Optional[np.ndarray]
    tangent: Optional[Tuple[np.ndarray, np.ndarray, np.ndarray]]
    active: np.ndarray
    status: np.ndarray
    converged: np.ndarray
    xi_bar: np.ndarray
    gap: np.ndarray
    pressure: np.ndarray
    tangential: np.ndarray
    x_current: np.ndarray
    weights: np.ndarray = field(repr=False)

    @property
    def n_active(self) -> int:
        return int(np.count_nonzero(self.active))

    @property
    def n_stick(self) -> int:
        return int(np.count_nonzero(self.status == FrictionStatus.STICK))

    @property
    def n_slip(self) -> int:
        return int(np.count_nonzero(self.status == FrictionStatus.SLIP))

    @property
    def n_unprojected(self) -> int:
        """Slave points without a converged closest point projection."""
        return int(np.count_nonzero(~self.converged))

    @property
    def max_penetration(self) -> float:
        if not np.any(self.active):
            return 0.0
        return float(-np.min(self.gap[self.active]))


class ContactPair:
    """Gauss point to surface penalty contact between the contact face of a slave body and a
    master surface.

    :param n_gp: Gauss points per direction and slave element, 0 selects ``4 (p_c + 1)``
    """

    def __init__(
        self,
        slave: VOBody,
        master: MasterSurface,
        penalty: PenaltyParams,
        n_gp: int = 0,
        area_measure: AreaMeasure = AreaMeasure.REFERENCE,
        name: str = "",
    ):
        self.slave = slave
        self.master = master
        self.penalty = penalty
        self.area_measure = AreaMeasure(area_measure)
        self.name = name or f"{slave.name}->{getattr(getattr(master, 'body', None), 'name', 'rigid')}"
        if n_gp <= 0:
            n_gp = 4 * (max(slave.surface.degrees) + 1)
        self.n_gp = n_gp
        self.quad = slave_quadrature(slave, n_gp)
        self.slave_offset = 0
        self.master_offset = 0
        self._warm: Optional[np.ndarray] = None

    @property
    def n_points(self) -> int:
        return self.quad.n_points

    @property
    def rigid_master(self) -> bool:
        return self.master.n_local == 0

    def bind_dofs(self, slave_offset: int, master_offset: int = 0):
        """Control point offsets of both bodies in the global numbering."""
        self.slave_offset = slave_offset
        self.master_offset = master_offset

    def new_history(self) -> FrictionState:
        return FrictionState.empty(self.n_points)

    def reset_warm_start(self):
        self._warm = None

    def slave_positions(self, u_slave: Optional[np.ndarray]) -> np.ndarray:
        if u_slave is None:
            return self.quad.ref_points.copy()
        return self.quad.ref_points + np.einsum(
            "pa,pai->pi", self.quad.values, u_slave[self.quad.indices]
        )

    def project(
        self, u_slave: Optional[np.ndarray], u_master: Optional[np.ndarray] = None
    ) -> ProjectionBatch:
        proj = project_points(
            self.master, self.slave_positions(u_slave), u_master, seeds=self._warm
        )
        self._warm = np.where(proj.converged[:, None], proj.xi, np.nan)
        return proj

    def evaluate(
        self,
        u_slave: Optional[np.ndarray],
        u_master: Optional[np.ndarray] = None,
        history: Optional[FrictionState] = None,
        friction: bool = False,
        tangent: bool = True,
    ) -> ContactEvaluation:
        """Contact forces, tangent and point fields at the given displacements.

        :param history: Committed friction history, required for frictional evaluation
        :param friction: Tangential tractions on, points without history start sticking
        """
        quad = self.quad
        n_pts = quad.n_points
        if history is None:
            history = self.new_history()
        x_s = self.slave_positions(u_slave)
        proj = self.project(u_slave, u_master)
        usable = proj.converged & (quad.ref_weight > 0.0)
        active = usable & (proj.gap < 0.0)
        lost = np.count_nonzero(history.has_history & ~proj.converged)
        if lost:
            _LOGGER.debug(f"{self.name}: projection failed at {lost} previously active points")

        frictional = active & history.has_history if friction else np.zeros(n_pts, dtype=bool)
        idx = np.flatnonzero(active)
        inp, slave_idx, master_idx, slip_idx, keys = self._kernel_input(
            idx, x_s, proj, history, frictional, u_slave, u_master
        )

        slave_force = np.zeros((self.slave.control_count, 3))
        master_force = None
        if not self.rigid_master:
            master_force = np.zeros((self.master.body.control_count, 3))
        status = np.full(n_pts, FrictionStatus.INACTIVE, dtype=np.int8)
        pressure = np.zeros(n_pts)
        tangential = np.zeros(n_pts)
        blocks: List[Tuple[np.ndarray, np.ndarray]] = []

        ns, nm = quad.n_local, self.master.n_local
        nq = 3 * (ns + 2 * nm)
        chunk = max(1, CHUNK_ENTRIES // (nq * nq))
        for start in range(0, idx.size, chunk):
            sl = slice(start, start + chunk)
            out = evaluate_kernel(inp.subset(sl), self.penalty, self.area_measure, tangent)
            pts = idx[sl]
            status[pts] = out.status
            pressure[pts] = np.linalg.norm(out.t_N, axis=-1)
            tangential[pts] = np.linalg.norm(out.t_T, axis=-1)
            np.add.at(slave_force, slave_idx[sl], out.forces[:, : 3 * ns].reshape(-1, ns, 3))
            if master_force is not None:
                np.add.at(
                    master_force,
                    master_idx[sl],
                    out.forces[:, 3 * ns : 3 * (ns + nm)].reshape(-1, nm, 3),
                )
            if tangent:
                dofs = self._local_dofs(slave_idx[sl], master_idx[sl], slip_idx[sl])
                blocks.append(_reduce_blocks(keys[sl], dofs, out.stiffness))

        coo = None
        if tangent:
            coo = _coo(blocks)
        if idx.size:
            _LOGGER.debug(
                f"{self.name}: {idx.size} active, {np.count_nonzero(status == FrictionStatus.STICK)} stick, "
                f"{np.count_nonzero(status == FrictionStatus.SLIP)} slip"
            )
        return ContactEvaluation(
            slave_force=slave_force,
            master_force=master_force,
            tangent=coo,
            active=active,
            status=status,
            converged=proj.converged,
            xi_bar=proj.xi,
            gap=proj.gap,
            pressure=pressure,
            tangential=tangential,
            x_current=x_s,
            weights=quad.ref_weight,
        )

    def _kernel_input(self, idx, x_s, proj, history, frictional, u_slave, u_master):
        quad = self.quad
        n_act = idx.size
        kin = proj.kin
        if self.area_measure == AreaMeasure.CURRENT:
            ctrl = self.slave.points if u_slave is None else self.slave.points + u_slave
            slave_tangents = np.einsum(
                "pad,pai->pdi", quad.grads[idx], ctrl[quad.indices[idx]]
            )
            weight = quad.gauss_weight[idx]
        else:
            slave_tangents = np.zeros((n_act, 2, 3))
            weight = quad.ref_weight[idx]

        nm = self.master.n_local
        if proj.basis is None:
            rm = np.zeros((n_act, 0))
            rm_grad = np.zeros((n_act, 0, 2))
            master_idx = np.zeros((n_act, 0), dtype=np.int64)
        else:
            rm = proj.basis.values[idx]
            rm_grad = proj.basis.grads[idx]
            master_idx = proj.basis.indices[idx]
        x_slip = kin.x[idx].copy()
        r_slip = np.zeros((n_act, nm))
        slip_idx = master_idx.copy()
        fr = frictional[idx]
        slip_keys = np.full(n_act, -1, dtype=np.int64)
        if np.any(fr):
            slip_kin, slip_basis = self.master.kinematics(history.xi_slip[idx[fr]], u_master)
            x_slip[fr] = slip_kin.x
            if slip_basis is not None:
                r_slip[fr] = slip_basis.values
                slip_idx[fr] = slip_basis.indices
                slip_keys[fr] = self.master.element_keys(slip_basis, slip_basis.n_points)

        if proj.basis is None:
            master_keys = np.zeros(n_act, dtype=np.int64)
        else:
            spans = proj.basis.spans[idx]
            master_keys = spans[:, 0] + (1 << 20) * spans[:, 1]
        keys = np.stack([quad.element[idx], master_keys, slip_keys], axis=1)
        inp = KernelInput(
            weight=weight,
            rs=quad.values[idx],
            rs_grad=quad.grads[idx],
            slave_tangents=slave_tangents,
            gap=proj.gap[idx],
            x_bar=kin.x[idx],
            tau=kin.tangents[idx],
            normal=kin.normal[idx],
            metric=kin.metric[idx],
            curvature=kin.curvature[idx],
            rm=rm,
            rm_grad=rm_grad,
            x_slip=x_slip,
            r_slip=r_slip,
            frictional=fr,
        )
        return inp, quad.indices[idx], master_idx, slip_idx, keys

    def _local_dofs(self, slave_idx, master_idx, slip_idx) -> np.ndarray:
        comp = np.arange(3)
        parts = [3 * (self.slave_offset + slave_idx)[..., None] + comp]
        if master_idx.shape[1]:
            parts.append(3 * (self.master_offset + master_idx)[..., None] + comp)
            parts.append(3 * (self.master_offset + slip_idx)[..., None] + comp)
        return np.concatenate([p.reshape(p.shape[0], -1) for p in parts], axis=1)

    def commit(
        self, history: FrictionState, evaluation: ContactEvaluation, friction: bool
    ) -> FrictionState:
        return commit_history(
            history, evaluation.active, evaluation.status, evaluation.xi_bar, friction
        )

    def __repr__(self):
        return (
            f"{self.__class__.__name__}(name={self.name!r}, points={self.n_points}, "
            f"penalty={self.penalty!r}, area_measure={self.area_measure.value})"
        )


def _reduce_blocks(keys: np.ndarray, dofs: np.ndarray, stiffness: np.ndarray):
    """Sum the stiffness of points sharing all three element sets, they share their dofs."""
    _, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    order = np.argsort(inverse, kind="stable")
    sorted_inv = inverse[order]
    starts = np.flatnonzero(np.r_[True, sorted_inv[1:] != sorted_inv[:-1]])
    return dofs[order][starts], np.add.reduceat(stiffness[order], starts, axis=0)


def _coo(blocks) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if not blocks:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, np.zeros(0)
    rows, cols, data = [], [], []
    for dofs, k in blocks:
        n = dofs.shape[1]
        rows.append(np.repeat(dofs, n, axis=1).ravel())
        cols.append(np.tile(dofs, (1, n)).ravel())
        data.append(k.ravel())
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(data)
