"""Compressible Neo-Hookean material in spatial form.

Strain energy per reference volume::

    W = mu/2 (tr C - 3) - mu ln J + lambda/2 (ln J)^2

with Cauchy stress ``sigma = [lambda ln J I + mu (b - I)] / J`` and spatial tangent
``c = lambda/J I x I + 2 (mu - lambda ln J)/J II`` where ``II`` is the symmetric fourth
order identity. All functions accept arbitrary leading batch dimensions.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from igacontact.continuum.defs import IncompressibilityError

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class MaterialParams:
    E: float
    nu: float
    lam: float
    mu: float

    def __repr__(self):
        return (
            f"{self.__class__.__name__}(E={self.E!r}, nu={self.nu!r}, "
            f"lam={self.lam!r}, mu={self.mu!r})"
        )


@dataclass(frozen=True)
class DeformationState:
    F: np.ndarray
    J: np.ndarray
    b: np.ndarray


def lame_from_engineering(E: float, nu: float) -> MaterialParams:
    """Lame constants from Young's modulus and Poisson ratio.

    :raises IncompressibilityError: nu not in (-1, 0.5)
    :raises ValueError: E not positive
    """
    if not -1.0 < nu < 0.5:
        raise IncompressibilityError(nu)
    if E <= 0.0:
        raise ValueError(f"Young's modulus must be positive, got {E}")
    mu = E / (2.0 * (1.0 + nu))
    lam = 2.0 * mu * nu / (1.0 - 2.0 * nu)
    return MaterialParams(E=E, nu=nu, lam=lam, mu=mu)


def deformation_state(F: np.ndarray) -> DeformationState:
    F = np.asarray(F, dtype=float)
    return DeformationState(
        F=F, J=np.linalg.det(F), b=np.einsum("...ik,...jk->...ij", F, F)
    )


def strain_energy(state: DeformationState, mat: MaterialParams) -> np.ndarray:
    log_j = np.log(state.J)
    tr_c = np.einsum("...ii->...", state.b)
    return 0.5 * mat.mu * (tr_c - 3.0) - mat.mu * log_j + 0.5 * mat.lam * log_j**2


def cauchy_stress(state: DeformationState, mat: MaterialParams) -> np.ndarray:
    log_j = np.log(state.J)
    eye = np.eye(3)
    sigma = mat.lam * log_j[..., None, None] * eye + mat.mu * (state.b - eye)
    return sigma / state.J[..., None, None]


def tangent_moduli(
    state: DeformationState, mat: MaterialParams
) -> Tuple[np.ndarray, np.ndarray]:
    """Effective moduli ``(lambda/J, (mu - lambda ln J)/J)`` of the spatial tangent."""
    log_j = np.log(state.J)
    return mat.lam / state.J, (mat.mu - mat.lam * log_j) / state.J


def material_tangent(state: DeformationState, mat: MaterialParams) -> np.ndarray:
    """Spatial tangent moduli c_ijkl, shape (..., 3, 3, 3, 3)."""
    lam_eff, mu_eff = tangent_moduli(state, mat)
    eye = np.eye(3)
    ixi = np.einsum("ij,kl->ijkl", eye, eye)
    sym = 0.5 * (np.einsum("ik,jl->ijkl", eye, eye) + np.einsum("il,jk->ijkl", eye, eye))
    lam_eff = lam_eff[..., None, None, None, None]
    mu_eff = mu_eff[..., None, None, None, None]
    return lam_eff * ixi + 2.0 * mu_eff * sym
