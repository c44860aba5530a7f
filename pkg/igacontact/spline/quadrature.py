import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import numpy as np
from numpy.polynomial import Legendre

_LOGGER = logging.getLogger(__name__)

MAX_POINTS = 200
NEWTON_TOL = 1e-15
NEWTON_MAX_ITER = 20


class QuadratureRangeError(Exception):
    def __init__(self, n: int, *args, **kwargs):
        super().__init__(args, kwargs)
        self.n = n

    def __str__(self):
        return f"Gauss-Legendre rule with {self.n} points not supported (1..{MAX_POINTS})"


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray
    weights: np.ndarray

    @property
    def n_points(self) -> int:
        return len(self.points)

    def mapped(self, lo: float, hi: float) -> Tuple[np.ndarray, np.ndarray]:
        """Points and weights transformed from [-1, 1] to [lo, hi]."""
        half = 0.5 * (hi - lo)
        return 0.5 * (hi + lo) + half * self.points, half * self.weights


@lru_cache(maxsize=None)
def _rule(n: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    if n > 1:
        poly = Legendre.basis(n)
        dpoly = poly.deriv()
        for _ in range(NEWTON_MAX_ITER):
            dx = poly(x) / dpoly(x)
            x = x - dx
            if np.max(np.abs(dx)) < NEWTON_TOL:
                break
        else:
            _LOGGER.warning(f"Gauss-Legendre Newton polish for n={n} hit the iteration limit")
        w = 2.0 / ((1.0 - x * x) * dpoly(x) ** 2)
    # exact symmetry about 0
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule on [-1, 1], exact for polynomials of degree 2n-1. Nodes from
    :py:func:`numpy.polynomial.legendre.leggauss` are polished by Newton iteration on the Legendre
    polynomial.

    :raises QuadratureRangeError: n is not in 1..200
    """
    if not 1 <= n <= MAX_POINTS:
        raise QuadratureRangeError(n)
    x, w = _rule(int(n))
    return QuadratureRule(points=x, weights=w)
