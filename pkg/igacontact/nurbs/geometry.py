"""Catalog of the solids used by the benchmarks.

Every builder starts from the exact coarse NURBS description of the shape, raises the degree
to the requested one and then inserts knots (k-refinement, maximal continuity inside the
coarse patches). Each result is checked against the analytic shape before it is returned.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from igacontact.nurbs.defs import GeometrySelfCheckError
from igacontact.nurbs.faces import Face
from igacontact.nurbs.volume import NurbsVolume
from igacontact.spline import KnotVector, graded_interior_knots, uniform_interior_knots

_LOGGER = logging.getLogger(__name__)

SELF_CHECK_TOL = 1e-10
SELF_CHECK_SAMPLES = 50
HALF_SQRT2 = math.sqrt(0.5)


@dataclass(frozen=True)
class Grading:
    """Concentrate ``fraction_spans`` of the spans in the first ``fraction_range`` of the
    parameter range."""

    fraction_spans: float = 0.75
    fraction_range: float = 0.1


@dataclass(frozen=True)
class Geometry:
    name: str
    volume: NurbsVolume
    degenerate_faces: Tuple[Face, ...] = field(default_factory=tuple)


def _breaks(
    kv: KnotVector, n_elements: int, grading: Optional[Grading] = None
) -> np.ndarray:
    lo, hi = kv.bounds
    if grading is not None:
        new = graded_interior_knots(
            n_elements, grading.fraction_spans, grading.fraction_range, lo, hi
        )
    else:
        new = uniform_interior_knots(n_elements, lo, hi)
    existing = kv.unique_knots
    keep = [x for x in new if np.min(np.abs(existing - x)) > 1e-12 * kv.length]
    if len(keep) + kv.n_spans != n_elements:
        raise ValueError(
            f"{n_elements} elements cannot be obtained from {kv.n_spans} coarse spans"
        )
    return np.array(keep)


def k_refine(
    coarse: NurbsVolume,
    degrees: Sequence[int],
    elements: Sequence[int],
    grading: Sequence[Optional[Grading]] = (None, None, None),
) -> NurbsVolume:
    """Elevate ``coarse`` to ``degrees`` and insert knots to reach ``elements`` spans per
    direction."""
    steps = [d - c for d, c in zip(degrees, coarse.degrees)]
    if any(s < 0 for s in steps):
        raise ValueError(f"degrees {tuple(degrees)} below the exact degrees {coarse.degrees}")
    vol = coarse.elevate(steps)
    knots = [
        _breaks(kv, n, g) for kv, n, g in zip(vol.knot_vectors, elements, grading)
    ]
    return vol.insert(knots)


def _linear_kv() -> KnotVector:
    return KnotVector([0.0, 0.0, 1.0, 1.0], 1)


def _quadratic_kv() -> KnotVector:
    return KnotVector([0.0, 0.0, 0.0, 1.0, 1.0, 1.0], 2)


def _half_circle_kv() -> KnotVector:
    return KnotVector([0.0, 0.0, 0.0, 0.5, 0.5, 1.0, 1.0, 1.0], 2)


def _max_deviation(values: np.ndarray, target: float) -> float:
    return float(np.max(np.abs(values - target)))


def _check_handedness(geo: Geometry):
    signs = geo.volume.jacobian_signs()
    if np.any(signs <= 0):
        raise GeometrySelfCheckError(geo.name, float(np.count_nonzero(signs <= 0)))


def _check_radius(
    geo: Geometry, center: np.ndarray, radius: float, xi3: float, seed: int = 7
):
    rng = np.random.default_rng(seed)
    xis = geo.volume.random_parameters(SELF_CHECK_SAMPLES, rng)
    xis[:, 2] = xi3
    x, _ = geo.volume.evaluate(xis)
    dev = _max_deviation(np.linalg.norm(x - center, axis=1), radius)
    if dev > SELF_CHECK_TOL * max(radius, 1.0):
        raise GeometrySelfCheckError(geo.name, dev)


def block(
    dimensions: Sequence[float],
    origin: Sequence[float] = (0.0, 0.0, 0.0),
    elements: Sequence[int] = (1, 1, 1),
    degrees: Sequence[int] = (1, 1, 1),
) -> Geometry:
    """Axis aligned box ``origin + [0, a] x [0, b] x [0, c]``, xi_i along the i-th axis."""
    origin = np.asarray(origin, dtype=float)
    dims = np.asarray(dimensions, dtype=float)
    grid = np.stack(
        np.meshgrid([0.0, 1.0], [0.0, 1.0], [0.0, 1.0], indexing="ij"), axis=-1
    )
    coarse = NurbsVolume(
        (_linear_kv(), _linear_kv(), _linear_kv()),
        origin + grid * dims,
        np.ones((2, 2, 2)),
    )
    geo = Geometry("block", k_refine(coarse, degrees, elements))
    _check_handedness(geo)
    x, _ = geo.volume.evaluate(np.array([[1.0, 1.0, 1.0]]))
    dev = float(np.max(np.abs(x[0] - origin - dims)))
    if dev > SELF_CHECK_TOL * float(np.max(dims)):
        raise GeometrySelfCheckError(geo.name, dev)
    return geo


def sphere_octant(
    r_inner: float,
    r_outer: float,
    elements: Sequence[int],
    degrees: Sequence[int] = (2, 2, 1),
    grading: Optional[Grading] = None,
    center: Sequence[float] = (0.0, 0.0, 0.0),
) -> Geometry:
    """Lower octant ``x >= 0, y >= 0, z <= 0`` of a thick spherical shell.

    xi1 sweeps from -z to +y, xi2 runs from the x = 0 plane to the +x pole (collapsed face
    xi2_max), xi3 runs radially outwards. The lowest point of the outer face is xi = (0, 0, 1).
    ``grading`` applies to both angular directions.
    """
    center = np.asarray(center, dtype=float)
    sweep = np.array([[0.0, -1.0], [1.0, -1.0], [1.0, 0.0]])
    profile = np.array([[0.0, 1.0], [1.0, 1.0], [1.0, 0.0]])
    w = np.array([1.0, HALF_SQRT2, 1.0])
    radii = np.array([r_inner, r_outer])
    points = np.empty((3, 3, 2, 3))
    weights = np.empty((3, 3, 2))
    for i in range(3):
        for j in range(3):
            for k in range(2):
                x, rho = profile[j]
                points[i, j, k] = center + radii[k] * np.array(
                    [x, rho * sweep[i, 0], rho * sweep[i, 1]]
                )
                weights[i, j, k] = w[i] * w[j]
    coarse = NurbsVolume((_quadratic_kv(), _quadratic_kv(), _linear_kv()), points, weights)
    vol = k_refine(coarse, degrees, elements, (grading, grading, None))
    geo = Geometry("sphere_octant", vol, (Face.XI2_MAX,))
    _check_handedness(geo)
    _check_radius(geo, center, r_outer, 1.0)
    _check_radius(geo, center, r_inner, 0.0)
    return geo


def hollow_hemisphere(
    r_inner: float,
    r_outer: float,
    center: Sequence[float],
    elements: Sequence[int],
    degrees: Sequence[int] = (2, 2, 1),
) -> Geometry:
    """Lower half ``z <= center_z`` of a thick spherical shell.

    The points are ``center + r (cos t, sin t cos f, -sin t sin f)`` where xi1 sweeps f and
    xi2 sweeps t over [0, pi], r grows with xi3. Both xi2 faces collapse to poles on the equator.
    In-surface element counts must be even.
    """
    center = np.asarray(center, dtype=float)
    half = np.array([[1.0, 0.0], [1.0, 1.0], [0.0, 1.0], [-1.0, 1.0], [-1.0, 0.0]])
    w = np.array([1.0, HALF_SQRT2, 1.0, HALF_SQRT2, 1.0])
    radii = np.array([r_inner, r_outer])
    points = np.empty((5, 5, 2, 3))
    weights = np.empty((5, 5, 2))
    for i in range(5):
        cos_f, sin_f = half[i]
        for j in range(5):
            cos_t, sin_t = half[j]
            for k in range(2):
                points[i, j, k] = center + radii[k] * np.array(
                    [cos_t, sin_t * cos_f, -sin_t * sin_f]
                )
                weights[i, j, k] = w[i] * w[j]
    coarse = NurbsVolume(
        (_half_circle_kv(), _half_circle_kv(), _linear_kv()), points, weights
    )
    vol = k_refine(coarse, degrees, elements)
    geo = Geometry("hollow_hemisphere", vol, (Face.XI2_MIN, Face.XI2_MAX))
    _check_handedness(geo)
    _check_radius(geo, center, r_outer, 1.0)
    _check_radius(geo, center, r_inner, 0.0)
    return geo


def spherical_indentor(
    width: float,
    height: float,
    cap_radius: float,
    bottom: Sequence[float],
    elements: Sequence[int],
    degrees: Sequence[int] = (2, 2, 1),
) -> Geometry:
    """Block with a flat square top and a spherical cap as bottom face.

    The cap is the part of the sphere of radius ``cap_radius`` around
    ``bottom + (0, 0, cap_radius)`` spanning ``width`` in x and y; its lowest point is
    ``bottom``. The top face is the square of side ``width`` at ``bottom_z + height``.
    xi1 runs along y, xi2 along x and xi3 from the top face (xi3_min) to the cap (xi3_max).
    """
    bottom = np.asarray(bottom, dtype=float)
    if width >= 2.0 * cap_radius:
        raise ValueError("indentor width must be smaller than the cap diameter")
    alpha = math.asin(0.5 * width / cap_radius)
    center = bottom + np.array([0.0, 0.0, cap_radius])
    ca, sa = math.cos(alpha), math.sin(alpha)
    sweep = np.array([[-sa, -ca], [0.0, -1.0 / ca], [sa, -ca]])
    profile = cap_radius * np.array([[-sa, ca], [0.0, 1.0 / ca], [sa, ca]])
    w = np.array([1.0, ca, 1.0])
    flat = 0.5 * width * np.array([-1.0, 0.0, 1.0])
    points = np.empty((3, 3, 2, 3))
    weights = np.empty((3, 3, 2))
    for i in range(3):
        for j in range(3):
            x, rho = profile[j]
            points[i, j, 0] = bottom + np.array([flat[j], flat[i], height])
            points[i, j, 1] = center + np.array([x, rho * sweep[i, 0], rho * sweep[i, 1]])
            weights[i, j, :] = w[i] * w[j]
    coarse = NurbsVolume((_quadratic_kv(), _quadratic_kv(), _linear_kv()), points, weights)
    vol = k_refine(coarse, degrees, elements)
    geo = Geometry("spherical_indentor", vol)
    _check_handedness(geo)
    _check_radius(geo, center, cap_radius, 1.0)
    return geo
