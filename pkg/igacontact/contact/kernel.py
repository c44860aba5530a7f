"""Contact residual and consistent tangent at slave quadrature points.

Every point couples three sets of control points, collected in the local vector
``q = [slave | master at xi_bar | master at xi_slip]`` of length ``3 (ns + 2 nm)``, components
running fastest. The master set at the slip reference only enters the tangential trial
traction. Linearisation operators are stored as arrays ``(P, 3, nq)`` mapping ``dq`` to the
variation of a vector, so the chain rule reduces to ``einsum`` contractions.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from igacontact.contact.defs import AreaMeasure, FrictionStatus
from igacontact.contact.traction import return_map_batch

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class PenaltyParams:
    eps_N: float
    eps_T: float = 0.0
    mu_f: float = 0.0

    def __post_init__(self):
        if self.eps_N <= 0.0:
            raise ValueError(f"normal penalty must be positive, got {self.eps_N}")
        if self.eps_T < 0.0 or self.mu_f < 0.0:
            raise ValueError("tangential penalty and friction coefficient must not be negative")


@dataclass(frozen=True)
class KernelInput:
    """Per point data of P active slave points.

    :var weight: Parametric quadrature weight (P,), times the reference area element unless
        the current area measure is used
    :var rs: Slave surface basis values (P, ns)
    :var rs_grad: Slave surface basis derivatives (P, ns, 2)
    :var slave_tangents: Current slave tangents (P, 2, 3), used by the current area measure
    :var gap: Normal gaps (P,)
    :var x_bar: Closest master points (P, 3)
    :var tau: Master tangents (P, 2, 3)
    :var normal: Master unit normals (P, 3)
    :var metric: Master metric (P, 2, 2)
    :var curvature: Master curvature components (P, 2, 2)
    :var rm: Master basis values at xi_bar (P, nm)
    :var rm_grad: Master basis derivatives at xi_bar (P, nm, 2)
    :var x_slip: Current master points at the slip reference (P, 3)
    :var r_slip: Master basis values at the slip reference (P, nm)
    :var frictional: Points carrying tangential traction (P,)
    """

    weight: np.ndarray
    rs: np.ndarray
    rs_grad: np.ndarray
    slave_tangents: np.ndarray
    gap: np.ndarray
    x_bar: np.ndarray
    tau: np.ndarray
    normal: np.ndarray
    metric: np.ndarray
    curvature: np.ndarray
    rm: np.ndarray
    rm_grad: np.ndarray
    x_slip: np.ndarray
    r_slip: np.ndarray
    frictional: np.ndarray

    @property
    def n_points(self) -> int:
        return self.rs.shape[0]

    @property
    def n_slave(self) -> int:
        return self.rs.shape[1]

    @property
    def n_master(self) -> int:
        return self.rm.shape[1]

    @property
    def n_local(self) -> int:
        return 3 * (self.n_slave + 2 * self.n_master)

    def subset(self, sel) -> KernelInput:
        return KernelInput(**{k: v[sel] for k, v in self.__dict__.items()})


@dataclass(frozen=True)
class KernelOutput:
    """Local forces (P, nq), stiffness (P, nq, nq) or None, tractions and status."""

    forces: np.ndarray
    stiffness: Optional[np.ndarray]
    t_N: np.ndarray
    t_T: np.ndarray
    status: np.ndarray


def _spread(values: np.ndarray, offset: int, nq: int) -> np.ndarray:
    """Operator ``values (x) I`` (P, 3, nq) of one control point set placed at ``offset``."""
    n_pts, n = values.shape
    out = np.zeros((n_pts, 3, nq))
    for i in range(3):
        out[:, i, offset + i : offset + 3 * n : 3] = values
    return out


def _closest_point_inverse(metric: np.ndarray, h: np.ndarray) -> np.ndarray:
    """c_bar = (m - g k)^-1, falling back to m^-1 where the curvature term makes it singular."""
    weak = np.abs(np.linalg.det(h)) <= 1e-12 * np.abs(np.linalg.det(metric))
    if np.any(weak):
        _LOGGER.warning(
            f"dropping the curvature term at {np.count_nonzero(weak)} contact points"
        )
        h = np.where(weak[:, None, None], metric, h)
    return np.linalg.inv(h)


def evaluate_kernel(
    inp: KernelInput,
    penalty: PenaltyParams,
    area_measure: AreaMeasure = AreaMeasure.REFERENCE,
    tangent: bool = True,
) -> KernelOutput:
    n_pts, ns, nm, nq = inp.n_points, inp.n_slave, inp.n_master, inp.n_local
    eps_N, eps_T, mu_f = penalty.eps_N, penalty.eps_T, penalty.mu_f
    g, n, tau = inp.gap, inp.normal, inp.tau

    S = _spread(inp.rs, 0, nq)
    M = _spread(inp.rm, 3 * ns, nq)
    L = _spread(inp.r_slip, 3 * (ns + nm), nq)
    Md = np.stack([_spread(inp.rm_grad[:, :, a], 3 * ns, nq) for a in range(2)], axis=1)
    SM = S - M

    # parameter variation of the closest point
    c_bar = _closest_point_inverse(inp.metric, inp.metric - g[:, None, None] * inp.curvature)
    n_md = np.einsum("pi,paiq->paq", n, Md)
    A = np.einsum(
        "pab,pbq->paq",
        c_bar,
        np.einsum("pbi,piq->pbq", tau, SM) + g[:, None, None] * n_md,
    )
    Dx = M + np.einsum("pai,paq->piq", tau, A)
    Dg = np.einsum("pi,piq->pq", n, SM)
    tau_con = np.einsum("pab,pbi->pai", np.linalg.inv(inp.metric), tau)
    Dn = -np.einsum(
        "pai,paq->piq", tau_con, n_md + np.einsum("pab,pbq->paq", inp.curvature, A)
    )

    t_N_mag = -eps_N * g
    t_N = t_N_mag[:, None] * n
    Dt_N = -eps_N * (n[:, :, None] * Dg[:, None, :] + g[:, None, None] * Dn)

    t_T = np.zeros((n_pts, 3))
    Dt_T = np.zeros((n_pts, 3, nq))
    status = np.full(n_pts, FrictionStatus.FREE, dtype=np.int8)
    fr = np.asarray(inp.frictional, dtype=bool)
    if np.any(fr):
        nf, Dnf = n[fr], Dn[fr]
        v = inp.x_bar[fr] - inp.x_slip[fr]
        nv = np.einsum("pi,pi->p", nf, v)
        t_trial = eps_T * (v - nf * nv[:, None])
        t_T_fr, st, norm = return_map_batch(t_trial, t_N_mag[fr], mu_f)
        Dv = Dx[fr] - L[fr]
        DPv = (
            Dv
            - nv[:, None, None] * Dnf
            - nf[:, :, None] * np.einsum("pi,piq->pq", v, Dnf)[:, None, :]
            - nf[:, :, None] * np.einsum("pi,piq->pq", nf, Dv)[:, None, :]
        )
        Dt_fr = eps_T * DPv
        slip = st == FrictionStatus.SLIP
        if np.any(slip):
            n_T = t_trial[slip] / norm[slip, None]
            proj_T = np.eye(3) - n_T[:, :, None] * n_T[:, None, :]
            Dg_fr = Dg[fr][slip]
            Dt_fr[slip] = mu_f * (
                n_T[:, :, None] * (-eps_N * Dg_fr)[:, None, :]
                + (t_N_mag[fr][slip] / norm[slip])[:, None, None]
                * np.einsum("pij,pjq->piq", proj_T, Dt_fr[slip])
            )
        t_T[fr] = t_T_fr
        Dt_T[fr] = Dt_fr
        status[fr] = st

    t_c = t_N - t_T
    w = inp.weight
    if area_measure == AreaMeasure.CURRENT:
        w = w * np.linalg.norm(
            np.cross(inp.slave_tangents[:, 0], inp.slave_tangents[:, 1]), axis=-1
        )
    forces = w[:, None] * np.einsum("piq,pi->pq", -SM, t_c)
    stiffness = None
    if tangent:
        Dt_c = Dt_N - Dt_T
        stiffness = np.einsum("piq,pir->pqr", -SM, Dt_c)
        stiffness += np.einsum("paiq,pi,par->pqr", Md, t_c, A, optimize=True)
        stiffness *= w[:, None, None]
        if area_measure == AreaMeasure.CURRENT:
            metric_s = np.einsum("pai,pbi->pab", inp.slave_tangents, inp.slave_tangents)
            tau_s_con = np.einsum("pab,pbi->pai", np.linalg.inv(metric_s), inp.slave_tangents)
            Sd = np.stack(
                [_spread(inp.rs_grad[:, :, a], 0, nq) for a in range(2)], axis=1
            )
            dw_w = np.einsum("pai,paiq->pq", tau_s_con, Sd)
            stiffness += forces[:, :, None] * dw_w[:, None, :]
    return KernelOutput(forces=forces, stiffness=stiffness, t_N=t_N, t_T=t_T, status=status)


def contact_force_vectors(
    inp: KernelInput,
    penalty: PenaltyParams,
    area_measure: AreaMeasure = AreaMeasure.REFERENCE,
) -> Tuple[np.ndarray, np.ndarray]:
    """Slave (ns, 3) and master (nm, 3) control point forces of a single point."""
    out = evaluate_kernel(inp, penalty, area_measure, tangent=False)
    ns, nm = inp.n_slave, inp.n_master
    f = out.forces[0]
    return f[: 3 * ns].reshape(ns, 3), f[3 * ns : 3 * (ns + nm)].reshape(nm, 3)


def contact_tangents(
    inp: KernelInput,
    penalty: PenaltyParams,
    area_measure: AreaMeasure = AreaMeasure.REFERENCE,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Stiffness blocks ``k_ss, k_sm, k_ms, k_mm`` of a single point.

    Master columns span both master sets, the one at xi_bar followed by the one at the slip
    reference, so ``k_sm`` has shape (3 ns, 6 nm). Master rows only cover xi_bar.
    """
    out = evaluate_kernel(inp, penalty, area_measure, tangent=True)
    ns, nm = inp.n_slave, inp.n_master
    k = out.stiffness[0]
    s = slice(0, 3 * ns)
    m_rows = slice(3 * ns, 3 * (ns + nm))
    m_cols = slice(3 * ns, 3 * (ns + 2 * nm))
    return k[s, s], k[s, m_cols], k[m_rows, s], k[m_rows, m_cols]
