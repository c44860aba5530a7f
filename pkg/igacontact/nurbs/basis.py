"""Rational tensor-product basis functions evaluated at many parameters at once.

Local functions of one point are ordered with the first parametric direction running
fastest, so local index ``a = a1 + (p1+1)*(a2 + (p2+1)*a3)``. Global control point indices
follow the same rule, ``i + n1*(j + n2*k)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from igacontact.spline import KnotVector, eval_basis_batch


@dataclass(frozen=True)
class TensorBasis:
    """Non-zero rational basis functions at P points.

    :var indices: Global control point indices, shape (P, nloc)
    :var values: Function values, shape (P, nloc)
    :var grads: First parametric derivatives, shape (P, nloc, d)
    :var hessians: Second parametric derivatives, shape (P, nloc, d, d), or None
    :var spans: Knot span per point and direction, shape (P, d)
    """

    indices: np.ndarray
    values: np.ndarray
    grads: np.ndarray
    hessians: Optional[np.ndarray]
    spans: np.ndarray

    @property
    def n_points(self) -> int:
        return self.values.shape[0]

    def map(self, ctrl: np.ndarray) -> np.ndarray:
        """Interpolate per-control-point data (rows of ``ctrl``) to the points."""
        return np.einsum("pa,pa...->p...", self.values, ctrl[self.indices])

    def map_grad(self, ctrl: np.ndarray) -> np.ndarray:
        """Parametric derivatives, shape (P, dim, d)."""
        return np.einsum("pad,pai->pid", self.grads, ctrl[self.indices])


def outer_local(factors: Sequence[np.ndarray]) -> np.ndarray:
    """Tensor product of per-direction local values (P, m_k) flattened with the first
    direction running fastest, result shape (P, prod m_k)."""
    out = factors[0]
    for f in factors[1:]:
        shape = (f.shape[0],) + (1,) * (out.ndim - 1) + (f.shape[1],)
        out = out[..., None] * f.reshape(shape)
    axes = (0,) + tuple(range(out.ndim - 1, 0, -1))
    return np.transpose(out, axes).reshape(out.shape[0], int(np.prod(out.shape[1:])))


def local_indices(
    spans: np.ndarray, degrees: Sequence[int], counts: Sequence[int]
) -> np.ndarray:
    """Flattened global indices of the non-zero functions for each point."""
    strides = np.cumprod((1,) + tuple(counts[:-1]))
    parts = [
        ((spans[:, d, None] - degrees[d] + np.arange(degrees[d] + 1)) * strides[d])
        .astype(np.int64)
        for d in range(len(degrees))
    ]
    idx = parts[0]
    for part in parts[1:]:
        shape = (part.shape[0],) + (1,) * (idx.ndim - 1) + (part.shape[1],)
        idx = idx[..., None] + part.reshape(shape)
    axes = (0,) + tuple(range(idx.ndim - 1, 0, -1))
    return np.transpose(idx, axes).reshape(idx.shape[0], int(np.prod(idx.shape[1:])))


def univariate(
    kvs: Sequence[KnotVector], xis: np.ndarray, der: int
) -> Tuple[np.ndarray, List[np.ndarray]]:
    spans = []
    ders = []
    for d, kv in enumerate(kvs):
        s, n = eval_basis_batch(kv, xis[:, d], der)
        spans.append(s)
        ders.append(n)
    return np.stack(spans, axis=1), ders


def tensor_derivatives(
    ders: Sequence[np.ndarray], der: int
) -> Tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
    """Polynomial tensor-product values, gradients and Hessians from univariate tables."""
    dim = len(ders)

    def product(orders):
        return outer_local([ders[d][:, orders[d], :] for d in range(dim)])

    values = product([0] * dim)
    grads = np.stack(
        [product([1 if e == d else 0 for e in range(dim)]) for d in range(dim)], axis=-1
    )
    hessians = None
    if der >= 2:
        hessians = np.empty(values.shape + (dim, dim))
        for a in range(dim):
            for b in range(a, dim):
                orders = [0] * dim
                orders[a] += 1
                orders[b] += 1
                hessians[..., a, b] = product(orders)
                hessians[..., b, a] = hessians[..., a, b]
    return values, grads, hessians


def rationalize(
    weights: np.ndarray,
    values: np.ndarray,
    grads: np.ndarray,
    hessians: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, np.ndarray, Optional[np.ndarray]]:
    """Turn polynomial basis functions and derivatives into rational ones for the local
    weights ``weights`` (P, nloc)."""
    nw = values * weights
    dnw = grads * weights[..., None]
    w = nw.sum(axis=1)
    dw = dnw.sum(axis=1)
    r = nw / w[:, None]
    dr = (dnw - r[..., None] * dw[:, None, :]) / w[:, None, None]
    d2r = None
    if hessians is not None:
        d2nw = hessians * weights[..., None, None]
        d2w = d2nw.sum(axis=1)
        d2r = (
            d2nw
            - dr[..., :, None] * dw[:, None, None, :]
            - dr[..., None, :] * dw[:, None, :, None]
            - r[..., None, None] * d2w[:, None, :, :]
        ) / w[:, None, None, None]
    return r, dr, d2r


def rational_basis(
    kvs: Sequence[KnotVector], weights: np.ndarray, xis: np.ndarray, der: int = 1
) -> TensorBasis:
    """Evaluate the rational basis of a tensor-product patch at P parameters.

    :param kvs: One knot vector per parametric direction
    :param weights: Control weights, array with one axis per direction
    :param xis: Parameters, shape (P, d)
    :param der: 1 or 2
    """
    xis = np.atleast_2d(np.asarray(xis, dtype=float))
    degrees = [kv.degree for kv in kvs]
    counts = [kv.n_basis for kv in kvs]
    spans, ders = univariate(kvs, xis, der)
    idx = local_indices(spans, degrees, counts)
    flat_w = flatten_grid(weights, weights.ndim)
    values, grads, hessians = tensor_derivatives(ders, der)
    r, dr, d2r = rationalize(flat_w[idx], values, grads, hessians)
    return TensorBasis(indices=idx, values=r, grads=dr, hessians=d2r, spans=spans)


def flatten_grid(grid: np.ndarray, dim: int) -> np.ndarray:
    """Flatten the leading ``dim`` grid axes with the first axis running fastest."""
    axes = tuple(range(dim - 1, -1, -1)) + tuple(range(dim, grid.ndim))
    flat = np.transpose(grid, axes)
    return flat.reshape((-1,) + grid.shape[dim:])
