"""Geometry preserving refinement of B-spline and NURBS control sequences.

Control sequences are arrays whose first axis runs over the basis functions and whose last
axis holds Cartesian coordinates followed by the weight, e.g. shape (n, 4) for a space curve
or (n, m, 4) when refining one direction of a surface. Refinement is carried out on the
homogeneous (weight multiplied) coordinates.
"""
from __future__ import annotations

import logging
import math
from typing import Sequence, Tuple

import numpy as np

from igacontact.spline.knots import KnotVector, KNOT_TOL, find_span

_LOGGER = logging.getLogger(__name__)


class RefinementError(Exception):
    def __init__(self, xi: float, reason: str, *args, **kwargs):
        super().__init__(args, kwargs)
        self.xi = xi
        self.reason = reason

    def __str__(self):
        return f"Refinement at {self.xi} failed: {self.reason}"


def to_homogeneous(ctrl: np.ndarray) -> np.ndarray:
    ctrl = np.asarray(ctrl, dtype=float)
    w = ctrl[..., -1:]
    return np.concatenate([ctrl[..., :-1] * w, w], axis=-1)


def from_homogeneous(pw: np.ndarray) -> np.ndarray:
    w = pw[..., -1:]
    return np.concatenate([pw[..., :-1] / w, w], axis=-1)


def _snap(kv: KnotVector, xi: float) -> float:
    """Replace xi by an existing knot value if both coincide within the knot tolerance."""
    tol = KNOT_TOL * kv.length
    close = np.abs(kv.knots - xi) <= tol
    if np.any(close):
        return float(kv.knots[np.argmax(close)])
    return float(xi)


def insert_homogeneous(
    kv: KnotVector, pw: np.ndarray, xi: float, repetitions: int = 1
) -> Tuple[KnotVector, np.ndarray]:
    """Insert ``xi`` ``repetitions`` times. Linear in ``pw``, which may be any array whose
    first axis runs over the basis functions."""
    p = kv.degree
    lo, hi = kv.bounds
    xi = _snap(kv, xi)
    if not lo < xi < hi:
        raise RefinementError(xi, "knot insertion requires an interior parameter")
    if repetitions < 1:
        return kv, np.array(pw, copy=True)
    s = kv.multiplicity(xi)
    if s + repetitions > p:
        raise RefinementError(
            xi, f"multiplicity {s}+{repetitions} would exceed degree {p}"
        )
    knots = kv.knots
    n = kv.n_basis
    k = find_span(kv, xi)
    r = repetitions
    new_knots = np.concatenate([knots[: k + 1], np.full(r, xi), knots[k + 1 :]])
    q = np.empty((n + r,) + pw.shape[1:])
    q[: k - p + 1] = pw[: k - p + 1]
    q[k - s + r :] = pw[k - s :]
    tmp = np.array(pw[k - p : k - s + 1], dtype=float, copy=True)
    last = k - p
    for j in range(1, r + 1):
        last = k - p + j
        for i in range(p - j - s + 1):
            alpha = (xi - knots[last + i]) / (knots[i + k + 1] - knots[last + i])
            tmp[i] = alpha * tmp[i + 1] + (1.0 - alpha) * tmp[i]
        q[last] = tmp[0]
        q[k + r - j - s] = tmp[p - j - s]
    for i in range(last + 1, k - s):
        q[i] = tmp[i - last]
    return KnotVector(new_knots, p), q


def insert_knot(
    kv: KnotVector, ctrl: np.ndarray, xi_new: float, repetitions: int = 1
) -> Tuple[KnotVector, np.ndarray]:
    """Insert a knot into a (rational) control sequence without changing the geometry.

    :param kv: Knot vector of the control sequence
    :param ctrl: Cartesian coordinates plus weight, first axis over the basis functions
    :param xi_new: Interior parameter to insert
    :param repetitions: Number of insertions
    :raises RefinementError: The resulting multiplicity would exceed the degree
    """
    new_kv, pw = insert_homogeneous(kv, to_homogeneous(ctrl), xi_new, repetitions)
    return new_kv, from_homogeneous(pw)


def insert_knots(
    kv: KnotVector, ctrl: np.ndarray, xis: Sequence[float]
) -> Tuple[KnotVector, np.ndarray]:
    pw = to_homogeneous(ctrl)
    for xi in sorted(xis):
        kv, pw = insert_homogeneous(kv, pw, float(xi), 1)
    return kv, from_homogeneous(pw)


def bezier_elevation_matrix(degree: int, steps: int) -> np.ndarray:
    """Matrix mapping the p+1 Bezier control points to the p+steps+1 control points of the
    same polynomial expressed in degree p+steps."""
    ph = degree + steps
    mat = np.zeros((ph + 1, degree + 1))
    for i in range(ph + 1):
        for j in range(max(0, i - steps), min(degree, i) + 1):
            mat[i, j] = (
                math.comb(degree, j) * math.comb(steps, i - j) / math.comb(ph, i)
            )
    return mat


def _to_bezier(kv: KnotVector, arr: np.ndarray) -> Tuple[KnotVector, np.ndarray]:
    p = kv.degree
    values, counts = np.unique(kv.knots, return_counts=True)
    for value, mult in zip(values[1:-1], counts[1:-1]):
        if mult < p:
            kv, arr = insert_homogeneous(kv, arr, float(value), int(p - mult))
    return kv, arr


def elevate_homogeneous(
    kv: KnotVector, pw: np.ndarray, steps: int
) -> Tuple[KnotVector, np.ndarray]:
    """Degree elevation by Bezier extraction. Each Bezier segment is elevated separately and
    the result is expressed in the knot vector with all multiplicities raised by ``steps``."""
    if steps < 0:
        raise ValueError(f"invalid elevation steps {steps}")
    if steps == 0:
        return kv, np.array(pw, copy=True)
    p = kv.degree
    if p < 1:
        raise RefinementError(kv.bounds[0], "degree elevation needs p >= 1")
    ph = p + steps
    n_seg = len(kv.unique_knots) - 1

    _, bez = _to_bezier(kv, pw)
    elev = bezier_elevation_matrix(p, steps)
    q_bez = np.empty((n_seg * ph + 1,) + pw.shape[1:])
    for seg in range(n_seg):
        q_bez[seg * ph : seg * ph + ph + 1] = np.tensordot(
            elev, bez[seg * p : seg * p + p + 1], axes=(1, 0)
        )

    target = kv.elevated(steps)
    # Columns of the extraction operator of the target space; the elevated curve lies in
    # this space, so the least squares solution is exact.
    _, extraction = _to_bezier(target, np.eye(target.n_basis))
    flat = q_bez.reshape(q_bez.shape[0], -1)
    sol, *_ = np.linalg.lstsq(extraction, flat, rcond=None)
    return target, sol.reshape((target.n_basis,) + pw.shape[1:])


def elevate_degree(
    kv: KnotVector, ctrl: np.ndarray, steps: int
) -> Tuple[KnotVector, np.ndarray]:
    """Raise the degree of a (rational) control sequence by ``steps`` without changing its
    geometry. Every knot multiplicity increases by ``steps``.

    :param kv: Knot vector of the control sequence
    :param ctrl: Cartesian coordinates plus weight, first axis over the basis functions
    :param steps: Number of degree increments, at least 1
    """
    if steps < 1:
        raise ValueError(f"elevation needs at least one step, got {steps}")
    new_kv, pw = elevate_homogeneous(kv, to_homogeneous(ctrl), steps)
    return new_kv, from_homogeneous(pw)
