"""Penalty normal traction, Coulomb friction return map and the friction history."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from igacontact.contact.defs import (
    ContactTraction,
    FrictionStatus,
    ProjectionResult,
    SlipDirectionUndefined,
)

_LOGGER = logging.getLogger(__name__)


def normal_traction(g_N: float, n_bar, eps_N: float) -> np.ndarray:
    """Penalty traction ``-eps_N g_N n_bar`` for ``g_N < 0``, zero otherwise."""
    n_bar = np.asarray(n_bar, dtype=float)
    if g_N >= 0.0:
        return np.zeros_like(n_bar)
    return -eps_N * g_N * n_bar


def tangential_trial(
    x_bar: np.ndarray, x_slip: np.ndarray, n_bar: np.ndarray, eps_T: float
) -> np.ndarray:
    """Trial traction ``eps_T P (x_bar - x_slip)`` with the tangent plane projector
    ``P = I - n n``, batched over leading dimensions."""
    v = x_bar - x_slip
    v = v - n_bar * np.sum(v * n_bar, axis=-1, keepdims=True)
    return eps_T * v


def return_map_batch(
    t_trial: np.ndarray, t_N_magnitude: np.ndarray, mu_f: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coulomb return map of trial tractions (P, 3).

    :return: Tangential tractions (P, 3), status (P,) and trial norms (P,)
    """
    norm = np.linalg.norm(t_trial, axis=-1)
    phi = norm - mu_f * t_N_magnitude
    slip = phi > 0.0
    status = np.where(slip, FrictionStatus.SLIP, FrictionStatus.STICK).astype(np.int8)
    t_T = t_trial.copy()
    if np.any(slip):
        if np.any(norm[slip] == 0.0):
            raise SlipDirectionUndefined(np.flatnonzero(slip & (norm == 0.0)))
        direction = t_trial[slip] / norm[slip, None]
        t_T[slip] = mu_f * t_N_magnitude[slip, None] * direction
    return t_T, status, norm


def friction_return_map(
    proj: ProjectionResult,
    x_slip,
    eps_T: float,
    mu_f: float,
    t_N_magnitude: float,
) -> Tuple[ContactTraction, FrictionStatus]:
    """Stick/slip decision of one point.

    :param x_slip: Current position of the master point at the stored slip reference
    :return: Traction with the normal part ``t_N_magnitude n_bar`` and the status
    """
    t_trial = tangential_trial(proj.x_bar, np.asarray(x_slip, dtype=float), proj.n_bar, eps_T)
    t_N_vec = t_N_magnitude * proj.n_bar
    try:
        t_T, status, _ = return_map_batch(t_trial[None], np.array([t_N_magnitude]), mu_f)
    except SlipDirectionUndefined:
        _LOGGER.warning(SlipDirectionUndefined(proj.xi_bar))
        return ContactTraction(t_N_vec, np.zeros(3)), FrictionStatus.STICK
    return ContactTraction(t_N_vec, t_T[0]), FrictionStatus(int(status[0]))


@dataclass
class FrictionState:
    """Committed friction history of all slave quadrature points of a pair.

    :var status: Status at the last converged step (P,)
    :var xi_slip: Master parameters of the slip reference (P, 2)
    :var has_history: Points that were active at the last converged step (P,)
    """

    status: np.ndarray
    xi_slip: np.ndarray
    has_history: np.ndarray

    @classmethod
    def empty(cls, n_points: int) -> FrictionState:
        return cls(
            status=np.zeros(n_points, dtype=np.int8),
            xi_slip=np.full((n_points, 2), np.nan),
            has_history=np.zeros(n_points, dtype=bool),
        )

    @property
    def n_points(self) -> int:
        return self.status.shape[0]

    def copy(self) -> FrictionState:
        return FrictionState(
            status=self.status.copy(),
            xi_slip=self.xi_slip.copy(),
            has_history=self.has_history.copy(),
        )


def commit_history(
    state: FrictionState,
    active: np.ndarray,
    status: np.ndarray,
    xi_bar: np.ndarray,
    friction: bool,
) -> FrictionState:
    """History after a converged step.

    Sticking points keep their slip reference. Slipping, newly active and frictionless points
    move it to the current projection. Inactive points lose their history.
    """
    new = FrictionState.empty(state.n_points)
    active = np.asarray(active, dtype=bool)
    keep = active & state.has_history & (status == FrictionStatus.STICK)
    if not friction:
        keep[:] = False
    moved = active & ~keep
    new.xi_slip[keep] = state.xi_slip[keep]
    new.xi_slip[moved] = xi_bar[moved]
    new.has_history[active] = True
    new.status[keep] = FrictionStatus.STICK
    if friction:
        new.status[moved] = np.where(
            state.has_history[moved] & (status[moved] == FrictionStatus.SLIP),
            FrictionStatus.SLIP,
            FrictionStatus.STICK,
        )
    else:
        new.status[moved] = FrictionStatus.STICK
    return new
