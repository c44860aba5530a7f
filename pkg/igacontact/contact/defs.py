from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Tuple

import numpy as np


class ProjectionFailure(Exception):
    def __init__(self, x_slave, iterations: int, *args, **kwargs):
        super().__init__(args, kwargs)
        self.x_slave = x_slave
        self.iterations = iterations

    def __str__(self):
        return (
            f"Closest point projection of {tuple(np.round(self.x_slave, 12))} did not "
            f"converge after {self.iterations} iterations"
        )


class SlipDirectionUndefined(Exception):
    def __init__(self, xi_bar, *args, **kwargs):
        super().__init__(args, kwargs)
        self.xi_bar = xi_bar

    def __str__(self):
        return f"Slip direction undefined at {tuple(np.atleast_1d(self.xi_bar).tolist())}"


class FrictionStatus(enum.IntEnum):
    INACTIVE = 0
    STICK = 1
    SLIP = 2
    # active without tangential traction, used while friction is switched off
    FREE = 3


class AreaMeasure(str, enum.Enum):
    """Area element of the slave surface integral."""

    REFERENCE = "reference"
    CURRENT = "current"


class PenaltyScaling(str, enum.Enum):
    NONE = "none"
    MIN_ELEMENT_SIZE = "min_element_size"


@dataclass(frozen=True)
class ProjectionResult:
    """Master surface quantities at the closest point of one slave point."""

    xi_bar: Tuple[float, float]
    x_bar: np.ndarray
    tau_bar: np.ndarray
    n_bar: np.ndarray
    m_bar: np.ndarray
    k_bar: np.ndarray
    c_bar: np.ndarray
    g_N: float
    converged: bool
    iterations: int


@dataclass(frozen=True)
class ContactTraction:
    t_N_vec: np.ndarray
    t_T_vec: np.ndarray

    @property
    def t_c(self) -> np.ndarray:
        return self.t_N_vec - self.t_T_vec
