"""Newton-Raphson iteration on the Dirichlet-reduced system and the sparse direct solve."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from igacontact.solver.defs import LinearSolveError, NewtonDivergence
from igacontact.solver.system import GlobalSystem

_LOGGER = logging.getLogger(__name__)

LINEAR_SOLVE_TOL = 1e-10


@dataclass(frozen=True)
class NewtonSettings:
    """
    :var rel_tol: Free residual norm relative to the force reference
    :var abs_tol: Absolute floor of the force reference (N)
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_iterations: int = 30
    max_cutbacks: int = 6

    def __post_init__(self):
        if self.rel_tol <= 0.0 or self.abs_tol <= 0.0:
            raise ValueError("Newton tolerances must be positive")
        if self.max_iterations < 1 or self.max_cutbacks < 0:
            raise ValueError("invalid Newton iteration or cutback limits")


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    residual: float
    reference: float
    active: int
    stick: int
    slip: int


@dataclass
class NewtonResult:
    u: np.ndarray
    system: GlobalSystem
    iterations: List[IterationRecord] = field(default_factory=list)

    @property
    def n_iterations(self) -> int:
        return len(self.iterations) - 1


def linear_solve(matrix: sp.spmatrix, rhs: np.ndarray) -> np.ndarray:
    """Direct LU solve of a general sparse system.

    :raises LinearSolveError: Singular factorisation or an inaccurate solution
    """
    matrix = sp.csc_matrix(matrix)
    try:
        lu = splu(matrix)
    except RuntimeError as e:
        raise LinearSolveError(str(e)) from e
    x = lu.solve(rhs)
    if not np.all(np.isfinite(x)):
        raise LinearSolveError("non-finite solution")
    scale = max(float(np.linalg.norm(rhs)), 1e-300)
    rel = float(np.linalg.norm(matrix @ x - rhs)) / scale
    if rel > LINEAR_SOLVE_TOL:
        raise LinearSolveError(f"relative residual {rel:.3e}")
    return x


def force_reference(system: GlobalSystem, dirichlet: np.ndarray, floor: float) -> float:
    """max(|f_ext|, |f_c|, |reactions|, floor). The Dirichlet reactions make displacement
    driven steps without contact forces converge relative to their support forces."""
    return max(
        float(np.linalg.norm(system.f_ext)),
        float(np.linalg.norm(system.f_c)),
        float(np.linalg.norm(system.residual[dirichlet])),
        floor,
    )


def newton_solve(
    build: Callable[[np.ndarray, bool], GlobalSystem],
    u0: np.ndarray,
    dirichlet: np.ndarray,
    settings: NewtonSettings,
    label: Optional[str] = None,
) -> NewtonResult:
    """Solve ``residual(u) = 0`` on the free dofs. ``u0`` already carries the prescribed
    values on the Dirichlet dofs.

    :param build: Returns the assembled system at ``u``, with tangent if the flag is set
    :raises NewtonDivergence: No convergence within the iteration limit
    :raises LinearSolveError: Singular tangent
    """
    u = np.array(u0, dtype=float)
    free = ~dirichlet
    prefix = f"{label}: " if label else ""
    result = NewtonResult(u=u, system=None)
    for it in range(settings.max_iterations + 1):
        system = build(u, True)
        r_free = system.residual[free]
        norm = float(np.linalg.norm(r_free))
        reference = force_reference(system, dirichlet, settings.abs_tol)
        result.iterations.append(
            IterationRecord(it, norm, reference, system.n_active, system.n_stick, system.n_slip)
        )
        _LOGGER.info(
            f"{prefix}iteration {it}: |r| = {norm:.4e} (ref {reference:.4e}), "
            f"active {system.n_active}, stick {system.n_stick}, slip {system.n_slip}"
        )
        if not np.isfinite(norm):
            raise NewtonDivergence(it, norm)
        if norm <= settings.rel_tol * reference or norm <= settings.abs_tol:
            result.u = u
            result.system = system
            return result
        if it == settings.max_iterations:
            break
        k_ff = system.matrix[free][:, free]
        u[free] += linear_solve(k_ff, -r_free)
    raise NewtonDivergence(settings.max_iterations, norm)
