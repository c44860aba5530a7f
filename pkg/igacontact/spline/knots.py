"""Knot vectors and B-spline basis evaluation.

All indices are 0-based. A knot vector of degree ``p`` with ``n`` basis functions stores
``n + p + 1`` knots, and the basis functions which do not vanish on span ``i`` are
``N_{i-p}, ..., N_i``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

_LOGGER = logging.getLogger(__name__)

# Relative tolerance used to detect equal knot values
KNOT_TOL = 1e-12


class InvalidKnotVector(Exception):
    def __init__(self, reason: str, *args, **kwargs):
        super().__init__(args, kwargs)
        self.reason = reason

    def __str__(self):
        return f"Invalid knot vector: {self.reason}"


class KnotDomainError(Exception):
    def __init__(self, xi: float, bounds: Tuple[float, float], *args, **kwargs):
        super().__init__(args, kwargs)
        self.xi = xi
        self.bounds = bounds

    def __str__(self):
        return f"Parameter {self.xi} outside of knot range {self.bounds}"


class KnotVector:
    """Open (clamped) knot vector together with its polynomial degree.

    Knots are stored as given, no normalization to [0, 1] is performed.

    :param knots: Non-decreasing knot values
    :param degree: Polynomial degree p
    :raises InvalidKnotVector: If the sequence is not non-decreasing, not clamped or if an
        interior knot has a multiplicity larger than p
    """

    def __init__(self, knots: Union[Sequence[float], np.ndarray], degree: int):
        knots = np.array(knots, dtype=float)
        if knots.ndim != 1:
            raise InvalidKnotVector("knots must be one-dimensional")
        if degree < 0:
            raise InvalidKnotVector(f"negative degree {degree}")
        if len(knots) < 2 * (degree + 1):
            raise InvalidKnotVector(
                f"{len(knots)} knots are not enough for degree {degree}"
            )
        if np.any(np.diff(knots) < 0.0):
            raise InvalidKnotVector("knots are not non-decreasing")
        if knots[-1] <= knots[0]:
            raise InvalidKnotVector("knot range is empty")
        if np.any(knots[: degree + 1] != knots[0]) or np.any(
            knots[-degree - 1 :] != knots[-1]
        ):
            raise InvalidKnotVector("knot vector is not clamped")
        if knots[degree + 1] == knots[0] or knots[-degree - 2] == knots[-1]:
            raise InvalidKnotVector("end knots repeated more than p+1 times")
        self._knots = knots
        self._knots.setflags(write=False)
        self._degree = degree
        for value, mult in zip(*self._interior_multiplicities()):
            if mult > degree:
                raise InvalidKnotVector(
                    f"interior knot {value} has multiplicity {mult} > p={degree}"
                )

    @classmethod
    def uniform(
        cls, degree: int, n_spans: int, start: float = 0.0, end: float = 1.0
    ) -> KnotVector:
        interior = np.linspace(start, end, n_spans + 1)[1:-1]
        return cls.from_breaks(degree, np.concatenate([[start], interior, [end]]))

    @classmethod
    def from_breaks(
        cls, degree: int, breaks: Sequence[float], multiplicity: int = 1
    ) -> KnotVector:
        """Build a clamped knot vector from distinct break points, repeating each interior
        break ``multiplicity`` times."""
        breaks = np.asarray(breaks, dtype=float)
        knots = np.concatenate(
            [
                np.full(degree + 1, breaks[0]),
                np.repeat(breaks[1:-1], multiplicity),
                np.full(degree + 1, breaks[-1]),
            ]
        )
        return cls(knots, degree)

    @property
    def knots(self) -> np.ndarray:
        return self._knots

    @property
    def degree(self) -> int:
        return self._degree

    @property
    def n_basis(self) -> int:
        return len(self._knots) - self._degree - 1

    @property
    def bounds(self) -> Tuple[float, float]:
        return float(self._knots[0]), float(self._knots[-1])

    @property
    def length(self) -> float:
        return float(self._knots[-1] - self._knots[0])

    @property
    def unique_knots(self) -> np.ndarray:
        return np.unique(self._knots)

    @property
    def spans(self) -> np.ndarray:
        """Indices of the non-empty knot spans, one per element."""
        idx = np.arange(self._degree, self.n_basis)
        return idx[self._knots[idx + 1] > self._knots[idx]]

    @property
    def n_spans(self) -> int:
        return len(self.spans)

    def span_bounds(self, span: int) -> Tuple[float, float]:
        return float(self._knots[span]), float(self._knots[span + 1])

    def multiplicity(self, xi: float) -> int:
        tol = KNOT_TOL * self.length
        return int(np.count_nonzero(np.abs(self._knots - xi) <= tol))

    def _interior_multiplicities(self) -> Tuple[np.ndarray, np.ndarray]:
        values, counts = np.unique(self._knots, return_counts=True)
        return values[1:-1], counts[1:-1]

    def c0_knots(self) -> np.ndarray:
        """Interior knots across which the basis is only C0."""
        values, counts = self._interior_multiplicities()
        return values[counts >= self._degree]

    def interior_knots(self) -> np.ndarray:
        return self._knots[self._degree + 1 : -self._degree - 1]

    def elevated(self, steps: int) -> KnotVector:
        """Knot vector of the degree ``p + steps`` space with the same continuity."""
        values, counts = np.unique(self._knots, return_counts=True)
        knots = np.concatenate(
            [
                np.full(self._degree + steps + 1, values[0]),
                np.repeat(values[1:-1], counts[1:-1] + steps),
                np.full(self._degree + steps + 1, values[-1]),
            ]
        )
        return KnotVector(knots, self._degree + steps)

    def __eq__(self, other):
        if not isinstance(other, KnotVector):
            return False
        return self._degree == other._degree and np.array_equal(
            self._knots, other._knots
        )

    def __repr__(self):
        return f"{self.__class__.__name__}(knots={self._knots.tolist()}, degree={self._degree})"


@dataclass(frozen=True)
class BasisEval:
    """Non-zero basis functions at one parameter.

    ``derivatives[k]`` holds the k-th derivatives of the p+1 functions ``N_{span-p..span}``;
    ``derivatives[0]`` equals ``values``.
    """

    span: int
    values: np.ndarray
    derivatives: np.ndarray


def _check_domain(kv: KnotVector, xis: np.ndarray):
    lo, hi = kv.bounds
    tol = KNOT_TOL * kv.length
    bad = (xis < lo - tol) | (xis > hi + tol) | ~np.isfinite(xis)
    if np.any(bad):
        raise KnotDomainError(float(xis[np.argmax(bad)]), kv.bounds)


def find_spans(kv: KnotVector, xis: Union[Sequence[float], np.ndarray]) -> np.ndarray:
    """Vectorised :py:func:`find_span`."""
    xis = np.atleast_1d(np.asarray(xis, dtype=float))
    _check_domain(kv, xis)
    spans = np.searchsorted(kv.knots, xis, side="right") - 1
    return np.clip(spans, kv.degree, kv.n_basis - 1)


def find_span(kv: KnotVector, xi: float) -> int:
    """Return the span index ``i`` with ``knots[i] <= xi < knots[i+1]``. At the right end of
    the knot range the last non-empty span is returned.

    :raises KnotDomainError: xi lies outside the knot range
    """
    return int(find_spans(kv, [xi])[0])


def eval_basis_batch(
    kv: KnotVector, xis: Union[Sequence[float], np.ndarray], der_order: int = 0
) -> Tuple[np.ndarray, np.ndarray]:
    """Evaluate the non-zero basis functions and their derivatives at many parameters.

    Vectorised form of the triangular Cox-de Boor scheme with derivatives.

    :param kv: Knot vector
    :param xis: Parameters, shape (n,)
    :param der_order: Highest derivative order. Orders above p are returned as zeros.
    :return: Tuple of spans with shape (n,) and derivatives with shape (n, der_order+1, p+1)
    """
    xis = np.atleast_1d(np.asarray(xis, dtype=float))
    spans = find_spans(kv, xis)
    p = kv.degree
    knots = kv.knots
    n_pts = xis.size
    nd = min(der_order, p)

    ndu = np.zeros((n_pts, p + 1, p + 1))
    left = np.zeros((n_pts, p + 1))
    right = np.zeros((n_pts, p + 1))
    ndu[:, 0, 0] = 1.0
    for j in range(1, p + 1):
        left[:, j] = xis - knots[spans + 1 - j]
        right[:, j] = knots[spans + j] - xis
        saved = np.zeros(n_pts)
        for r in range(j):
            # Lower triangle holds knot differences, upper triangle the basis functions
            ndu[:, j, r] = right[:, r + 1] + left[:, j - r]
            temp = ndu[:, r, j - 1] / ndu[:, j, r]
            ndu[:, r, j] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        ndu[:, j, j] = saved

    ders = np.zeros((n_pts, der_order + 1, p + 1))
    ders[:, 0, :] = ndu[:, :, p]
    a = np.zeros((n_pts, 2, p + 1))
    for r in range(p + 1):
        s1, s2 = 0, 1
        a[:] = 0.0
        a[:, 0, 0] = 1.0
        for k in range(1, nd + 1):
            d = np.zeros(n_pts)
            rk = r - k
            pk = p - k
            if r >= k:
                a[:, s2, 0] = a[:, s1, 0] / ndu[:, pk + 1, rk]
                d = a[:, s2, 0] * ndu[:, rk, pk]
            j1 = 1 if rk >= -1 else -rk
            j2 = k - 1 if r - 1 <= pk else p - r
            for j in range(j1, j2 + 1):
                a[:, s2, j] = (a[:, s1, j] - a[:, s1, j - 1]) / ndu[:, pk + 1, rk + j]
                d = d + a[:, s2, j] * ndu[:, rk + j, pk]
            if r <= pk:
                a[:, s2, k] = -a[:, s1, k - 1] / ndu[:, pk + 1, r]
                d = d + a[:, s2, k] * ndu[:, r, pk]
            ders[:, k, r] = d
            s1, s2 = s2, s1
    factor = p
    for k in range(1, nd + 1):
        ders[:, k, :] *= factor
        factor *= p - k
    return spans, ders


def eval_basis(kv: KnotVector, xi: float, der_order: int = 0) -> BasisEval:
    """Evaluate the p+1 non-zero basis functions at ``xi`` with derivatives up to
    ``der_order``.

    :raises KnotDomainError: xi lies outside the knot range
    """
    spans, ders = eval_basis_batch(kv, [xi], der_order)
    return BasisEval(span=int(spans[0]), values=ders[0, 0].copy(), derivatives=ders[0])


def uniform_interior_knots(
    n_spans: int, start: float = 0.0, end: float = 1.0
) -> np.ndarray:
    """Interior break points splitting [start, end] into ``n_spans`` equal spans."""
    return np.linspace(start, end, n_spans + 1)[1:-1]


def graded_interior_knots(
    n_spans: int,
    fraction_spans: float,
    fraction_range: float,
    start: float = 0.0,
    end: float = 1.0,
) -> np.ndarray:
    """Interior break points concentrating ``round(fraction_spans * n_spans)`` uniform spans in
    the first ``fraction_range`` of the parameter range, the remaining spans uniform over the
    rest."""
    n_fine = int(round(fraction_spans * n_spans))
    n_fine = min(max(n_fine, 1), n_spans - 1) if n_spans > 1 else n_spans
    if n_spans == 1:
        return np.array([])
    split = start + fraction_range * (end - start)
    fine = np.linspace(start, split, n_fine + 1)
    coarse = np.linspace(split, end, n_spans - n_fine + 1)
    return np.concatenate([fine[1:], coarse[1:-1]])
