"""Closest point projection of slave points onto a master surface.

Newton's method on the orthogonality conditions ``(x_s - x(xi)) . tau_a(xi) = 0`` runs for
all points of a batch at once. Points without a warm start are tried from the centers of
the nearest master elements and keep the closest converged result.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from igacontact.contact.defs import ProjectionFailure, ProjectionResult
from igacontact.contact.master import MasterSurface
from igacontact.nurbs import SurfaceKinematics, TensorBasis

_LOGGER = logging.getLogger(__name__)

PROJECTION_TOL = 1e-10
MAX_ITERATIONS = 50
N_STARTS = 4
KINK_TOL = 1e-12


@dataclass(frozen=True)
class ProjectionBatch:
    """Projection results of P slave points.

    :var xi: Master parameters (P, 2)
    :var converged: (P,) flags, points that failed are treated as inactive
    :var kin: Current master kinematics at ``xi``
    :var basis: Master basis at ``xi``, None for rigid masters
    :var gap: Signed normal gaps (P,), negative under penetration
    """

    xi: np.ndarray
    converged: np.ndarray
    iterations: np.ndarray
    kin: SurfaceKinematics
    basis: Optional[TensorBasis]
    gap: np.ndarray

    @property
    def n_points(self) -> int:
        return self.xi.shape[0]

    def result(self, p: int) -> ProjectionResult:
        kin = self.kin
        g = float(self.gap[p])
        curvature = kin.curvature[p]
        return ProjectionResult(
            xi_bar=(float(self.xi[p, 0]), float(self.xi[p, 1])),
            x_bar=kin.x[p],
            tau_bar=kin.tangents[p],
            n_bar=kin.normal[p],
            m_bar=kin.metric[p],
            k_bar=curvature,
            c_bar=np.linalg.pinv(kin.metric[p] - g * curvature),
            g_N=g,
            converged=bool(self.converged[p]),
            iterations=int(self.iterations[p]),
        )


def _stop_at_kinks(
    old: np.ndarray, new: np.ndarray, kinks: Tuple[np.ndarray, np.ndarray]
) -> np.ndarray:
    """Shorten steps ``old -> new`` (P, 2) that cross a kink line so they end on it."""
    n_pts = old.shape[0]
    t = np.ones(n_pts)
    hit = np.full(n_pts, -1)
    hit_value = np.zeros(n_pts)
    rows = np.arange(n_pts)
    for d, knots in enumerate(kinks):
        if knots.size == 0:
            continue
        a = old[:, d, None]
        b = new[:, d, None]
        cross = (knots[None, :] - a) * (knots[None, :] - b) < 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(cross, (knots[None, :] - a) / (b - a), np.inf)
        j = np.argmin(frac, axis=1)
        first = frac[rows, j]
        closer = first < t
        t = np.where(closer, first, t)
        hit = np.where(closer, d, hit)
        hit_value = np.where(closer, knots[j], hit_value)
    out = old + t[:, None] * (new - old)
    stopped = np.flatnonzero(hit >= 0)
    out[stopped, hit[stopped]] = hit_value[stopped]
    return out


def _kink_minimum(
    master: MasterSurface,
    kinks: Tuple[np.ndarray, np.ndarray],
    xi: np.ndarray,
    x_s: np.ndarray,
    f: np.ndarray,
    f_tol: np.ndarray,
    u: Optional[np.ndarray],
) -> np.ndarray:
    """(P, 2) flags of directions in which a point sits on a kink line at a one-sided
    distance minimum: the distance grows when leaving the line towards either side."""
    bounds = master.bounds
    held = np.zeros(xi.shape, dtype=bool)
    for d, knots in enumerate(kinks):
        if knots.size == 0:
            continue
        width = bounds[d, 1] - bounds[d, 0]
        dist = np.min(np.abs(xi[:, d, None] - knots[None, :]), axis=1)
        rows = np.flatnonzero(dist <= KINK_TOL * width)
        if rows.size == 0:
            continue
        # kinematics on a knot belong to the element above it
        below = xi[rows].copy()
        below[:, d] -= KINK_TOL * width
        kin, _ = master.kinematics(below, u)
        f_below = np.einsum("pi,pi->p", kin.tangents[:, d], x_s[rows] - kin.x)
        held[rows, d] = (f[rows, d] <= f_tol[rows, d]) & (f_below >= -f_tol[rows, d])
    return held


def _newton(
    master: MasterSurface,
    x_s: np.ndarray,
    xi0: np.ndarray,
    u: Optional[np.ndarray],
    tol: float,
    max_iter: int,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    n_pts = x_s.shape[0]
    xi = master.clamp(np.array(xi0, dtype=float))
    kinks = master.kinks()
    converged = np.zeros(n_pts, dtype=bool)
    iterations = np.zeros(n_pts, dtype=np.int64)
    scale = tol * master.length_scale()
    active = np.arange(n_pts)
    for it in range(max_iter + 1):
        if active.size == 0:
            break
        kin, _ = master.kinematics(xi[active], u)
        r = x_s[active] - kin.x
        f = np.einsum("pai,pi->pa", kin.tangents, r)
        f_tol = scale * np.linalg.norm(kin.tangents, axis=-1)
        held = _kink_minimum(master, kinks, xi[active], x_s[active], f, f_tol, u)
        satisfied = np.all((np.abs(f) <= f_tol) | held, axis=1)
        degenerate = kin.degenerate
        # the first correction is always taken so xi follows small changes of x_s
        done = ~degenerate & satisfied & (it > 0)
        converged[active[done]] = True
        iterations[active] = it
        keep = ~done & ~degenerate
        if it == max_iter or not np.any(keep):
            break
        active = active[keep]
        r, f, held, satisfied = r[keep], f[keep], held[keep], satisfied[keep]
        metric = kin.metric[keep]
        hess = metric - np.einsum("pabi,pi->pab", kin.second[keep], r)
        weak = np.abs(np.linalg.det(hess)) <= 1e-12 * np.abs(np.linalg.det(metric))
        hess[weak] = metric[weak]
        # directions held on a kink drop out of the system
        hess = np.where(held[:, :, None] | held[:, None, :], np.eye(2), hess)
        f = np.where(held, 0.0, f)
        step = np.linalg.solve(hess, f[..., None])[..., 0]
        new = master.clamp(_stop_at_kinks(xi[active], xi[active] + step, kinks))
        # stuck on the parameter boundary
        stalled = np.all(np.abs(new - xi[active]) <= 1e-15 * (1.0 + np.abs(new)), axis=1)
        xi[active] = new
        active = active[~stalled | satisfied]
    return xi, converged, iterations


def _cold_start(
    master: MasterSurface,
    x_s: np.ndarray,
    u: Optional[np.ndarray],
    tol: float,
    max_iter: int,
    n_starts: int,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    centers = master.element_centers()
    n_seeds = min(n_starts, centers.shape[0])
    tree = cKDTree(master.evaluate(centers, u))
    _, nearest = tree.query(x_s, k=n_seeds)
    nearest = np.asarray(nearest).reshape(x_s.shape[0], n_seeds)
    best_xi = centers[nearest[:, 0]].copy()
    best_dist = np.full(x_s.shape[0], np.inf)
    best_conv = np.zeros(x_s.shape[0], dtype=bool)
    best_iter = np.zeros(x_s.shape[0], dtype=np.int64)
    for j in range(n_seeds):
        xi, conv, iters = _newton(master, x_s, centers[nearest[:, j]], u, tol, max_iter)
        dist = np.linalg.norm(x_s - master.evaluate(xi, u), axis=1)
        better = conv & (dist < best_dist)
        best_xi[better] = xi[better]
        best_dist[better] = dist[better]
        best_conv |= conv
        best_iter = np.maximum(best_iter, iters)
    return best_xi, best_conv, best_iter


def project_points(
    master: MasterSurface,
    x_s: np.ndarray,
    u: Optional[np.ndarray] = None,
    seeds: Optional[np.ndarray] = None,
    tol: float = PROJECTION_TOL,
    max_iter: int = MAX_ITERATIONS,
    n_starts: int = N_STARTS,
) -> ProjectionBatch:
    """Project physical points (P, 3) onto the (displaced) master surface.

    :param seeds: Optional warm start parameters (P, 2), rows with NaN are started cold
    """
    x_s = np.atleast_2d(np.asarray(x_s, dtype=float))
    n_pts = x_s.shape[0]
    exact = master.exact_parameters(x_s)
    if exact is not None:
        xi, converged, iterations = _newton(master, x_s, exact, u, tol, max_iter)
    else:
        xi = np.zeros((n_pts, 2))
        converged = np.zeros(n_pts, dtype=bool)
        iterations = np.zeros(n_pts, dtype=np.int64)
        cold = np.ones(n_pts, dtype=bool)
        if seeds is not None:
            warm = ~np.any(np.isnan(seeds), axis=1)
            if np.any(warm):
                xi[warm], converged[warm], iterations[warm] = _newton(
                    master, x_s[warm], seeds[warm], u, tol, max_iter
                )
            cold = ~converged
        if np.any(cold):
            xi[cold], converged[cold], iterations[cold] = _cold_start(
                master, x_s[cold], u, tol, max_iter, n_starts
            )
    kin, basis = master.kinematics(xi, u)
    gap = np.einsum("pi,pi->p", x_s - kin.x, kin.normal)
    failed = np.count_nonzero(~converged)
    if failed:
        _LOGGER.debug(f"{failed} of {n_pts} closest point projections did not converge")
    return ProjectionBatch(
        xi=xi,
        converged=converged,
        iterations=iterations,
        kin=kin,
        basis=basis,
        gap=gap,
    )


def project_closest_point(
    x_s,
    master: MasterSurface,
    seed=None,
    u: Optional[np.ndarray] = None,
    raise_on_failure: bool = False,
) -> ProjectionResult:
    """Single point projection.

    :raises ProjectionFailure: Only with ``raise_on_failure``, otherwise the result is
        returned with ``converged`` cleared
    """
    seeds = None if seed is None else np.asarray(seed, dtype=float).reshape(1, 2)
    batch = project_points(master, np.asarray(x_s, dtype=float), u, seeds)
    result = batch.result(0)
    if raise_on_failure and not result.converged:
        raise ProjectionFailure(np.asarray(x_s, dtype=float), result.iterations)
    return result


def normal_gap(x_s, proj: ProjectionResult) -> float:
    """g_N = (x_s - x_bar) . n_bar."""
    return float(np.dot(np.asarray(x_s, dtype=float) - proj.x_bar, proj.n_bar))
