"""Global residual ``f_int - f_ext + f_c`` and tangent assembly."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from igacontact.contact import ContactEvaluation, ContactPair, FrictionState
from igacontact.continuum import (
    ElementQuadData,
    MaterialParams,
    element_force_and_stiffness,
    element_internal_force,
    element_quad_data,
)
from igacontact.nurbs import VOBody
from igacontact.solver.dofmap import DofMap
from igacontact.solver.program import ConstraintSet, LoadProgram

_LOGGER = logging.getLogger(__name__)

# Elements evaluated per batch
ELEMENT_CHUNK = 2048


def _chunks(quad: ElementQuadData) -> List[ElementQuadData]:
    return [
        quad.subset(slice(s, s + ELEMENT_CHUNK))
        for s in range(0, quad.n_elements, ELEMENT_CHUNK)
    ]


@dataclass
class BodyModel:
    """A body with its material, quadrature data and reference external load (N, 3) at load
    factor one."""

    body: VOBody
    material: MaterialParams
    quad: List[ElementQuadData]
    external: np.ndarray

    @classmethod
    def build(
        cls,
        body: VOBody,
        material: MaterialParams,
        external: Optional[np.ndarray] = None,
    ) -> BodyModel:
        quad = [
            element_quad_data(body, group) for group in body.groups if group.size > 0
        ]
        if external is None:
            external = np.zeros((body.control_count, 3))
        return cls(body=body, material=material, quad=quad, external=external)


class SparsityPattern:
    """Precomputed scatter of element stiffness blocks into unique (row, col) pairs.

    Blocks are accumulated with ``np.bincount`` in a fixed order, so assembly does not depend
    on thread scheduling.
    """

    def __init__(self, element_dofs: Sequence[np.ndarray], n_dofs: int):
        rows = [np.repeat(d, d.shape[1], axis=1).ravel() for d in element_dofs]
        cols = [np.tile(d, (1, d.shape[1])).ravel() for d in element_dofs]
        keys = np.concatenate(rows) * n_dofs + np.concatenate(cols)
        unique, inverse = np.unique(keys, return_inverse=True)
        self._inverse = inverse.ravel()
        self.rows = unique // n_dofs
        self.cols = unique % n_dofs
        self.n_dofs = n_dofs

    @property
    def nnz(self) -> int:
        return self.rows.size

    def accumulate(self, blocks: Sequence[np.ndarray]) -> np.ndarray:
        data = np.concatenate([b.ravel() for b in blocks])
        return np.bincount(self._inverse, weights=data, minlength=self.nnz)


@dataclass
class GlobalSystem:
    """Assembled residual and tangent of the whole model.

    :var matrix: Sparse tangent (CSR), None if only the residual was requested
    """

    residual: np.ndarray
    matrix: Optional[sp.csr_matrix]
    f_int: np.ndarray
    f_ext: np.ndarray
    f_c: np.ndarray
    contact: List[ContactEvaluation]

    @property
    def n_active(self) -> int:
        return sum(ev.n_active for ev in self.contact)

    @property
    def n_stick(self) -> int:
        return sum(ev.n_stick for ev in self.contact)

    @property
    def n_slip(self) -> int:
        return sum(ev.n_slip for ev in self.contact)


class Model:
    """Bodies, contact pairs and Dirichlet sets of one problem.

    :param parallel: Evaluate element batches in a thread pool
    """

    def __init__(
        self,
        bodies: Sequence[BodyModel],
        pairs: Sequence[ContactPair],
        constraints: Sequence[ConstraintSet],
        parallel: bool = False,
        max_workers: Optional[int] = None,
    ):
        self.bodies = list(bodies)
        self.pairs = list(pairs)
        self.constraints = list(constraints)
        self.parallel = parallel
        self.max_workers = max_workers
        self.dofs = DofMap([b.body for b in self.bodies])
        for pair in self.pairs:
            slave = self.dofs.body_index(pair.slave)
            master = 0
            if not pair.rigid_master:
                master = self.dofs.cp_offset(self.dofs.body_index(pair.master.body))
            pair.bind_dofs(self.dofs.cp_offset(slave), master)
        names = [c.name for c in self.constraints]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate constraint set names in {names}")
        self._constraint_dofs = {
            c.name: self.dofs.constrain(c.body, c.nodes, c.components)
            for c in self.constraints
        }
        self._chunks: List[Tuple[int, ElementQuadData]] = [
            (i, chunk)
            for i, b in enumerate(self.bodies)
            for q in b.quad
            for chunk in _chunks(q)
        ]
        self.pattern = SparsityPattern(
            [self._chunk_dofs(i, c) for i, c in self._chunks], self.dofs.n_dofs
        )
        self._f_ext = self.dofs.join([b.external for b in self.bodies])
        _LOGGER.info(
            f"model with {len(self.bodies)} bodies, {len(self.pairs)} contact pairs, "
            f"{self.dofs.n_dofs} dofs, {self.pattern.nnz} bulk stiffness entries"
        )

    @property
    def n_dofs(self) -> int:
        return self.dofs.n_dofs

    def constraint(self, name: str) -> ConstraintSet:
        for c in self.constraints:
            if c.name == name:
                return c
        raise KeyError(name)

    def _chunk_dofs(self, body: int, chunk: ElementQuadData) -> np.ndarray:
        return self.dofs.global_dofs(body, chunk.conn.ravel()).reshape(chunk.n_elements, -1)

    def new_histories(self) -> List[FrictionState]:
        return [pair.new_history() for pair in self.pairs]

    def external_force(self, load_factor: float) -> np.ndarray:
        return load_factor * self._f_ext

    def prescribed(self, program: LoadProgram, stage: int, s: float) -> np.ndarray:
        """Full displacement vector holding the prescribed values at the Dirichlet dofs (zero
        elsewhere). Later sets win on shared dofs."""
        u = np.zeros(self.n_dofs)
        for c in self.constraints:
            body = self.bodies[c.body].body
            motion = program.motion_at(c.name, stage, s)
            disp = motion.displacement(body.points[c.nodes])
            u[self._constraint_dofs[c.name]] = disp[:, list(c.components)].ravel()
        return u

    def _evaluate_chunk(self, item, u_bodies, tangent):
        body_idx, chunk = item
        mat = self.bodies[body_idx].material
        u_e = chunk.gather(u_bodies[body_idx])
        if tangent:
            force, k = element_force_and_stiffness(chunk, u_e, mat)
            n = chunk.n_local * 3
            return force, k.reshape(chunk.n_elements, n, n)
        return element_internal_force(chunk, u_e, mat), None

    def internal(self, u: np.ndarray, tangent: bool = True):
        """Internal force vector and, with ``tangent``, the bulk stiffness COO data aligned
        with :py:attr:`pattern`."""
        u_bodies = self.dofs.split(u)
        if self.parallel and len(self._chunks) > 1:
            with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
                results = list(
                    pool.map(lambda it: self._evaluate_chunk(it, u_bodies, tangent), self._chunks)
                )
        else:
            results = [self._evaluate_chunk(it, u_bodies, tangent) for it in self._chunks]
        f_int = np.zeros(self.n_dofs)
        for (body_idx, chunk), (force, _) in zip(self._chunks, results):
            dofs = self._chunk_dofs(body_idx, chunk)
            f_int += np.bincount(dofs.ravel(), weights=force.ravel(), minlength=self.n_dofs)
        data = None
        if tangent:
            data = self.pattern.accumulate([k for _, k in results])
        return f_int, data

    def contact(
        self,
        u: np.ndarray,
        histories: Sequence[FrictionState],
        friction: bool,
        tangent: bool = True,
    ) -> Tuple[np.ndarray, List[ContactEvaluation]]:
        u_bodies = self.dofs.split(u)
        f_c = np.zeros(self.n_dofs)
        evaluations = []
        for pair, history in zip(self.pairs, histories):
            s = self.dofs.body_index(pair.slave)
            u_master = None
            if not pair.rigid_master:
                m = self.dofs.body_index(pair.master.body)
                u_master = u_bodies[m]
            ev = pair.evaluate(u_bodies[s], u_master, history, friction, tangent)
            f_c[self.dofs.body_slice(s)] += ev.slave_force.ravel()
            if ev.master_force is not None:
                f_c[self.dofs.body_slice(m)] += ev.master_force.ravel()
            evaluations.append(ev)
        return f_c, evaluations

    def __repr__(self):
        return (
            f"{self.__class__.__name__}(bodies={[b.body.name for b in self.bodies]}, "
            f"pairs={len(self.pairs)}, dofs={self.n_dofs})"
        )


def assemble(
    model: Model,
    u: np.ndarray,
    histories: Sequence[FrictionState],
    load_factor: float = 1.0,
    friction: bool = False,
    tangent: bool = True,
) -> GlobalSystem:
    """Residual ``f_int - f_ext + f_c`` and, with ``tangent``, the sparse tangent.

    :raises ElementInversionError: A quadrature point with det F <= 0
    """
    f_int, bulk = model.internal(u, tangent)
    f_ext = model.external_force(load_factor)
    f_c, evaluations = model.contact(u, histories, friction, tangent)
    matrix = None
    if tangent:
        rows = [model.pattern.rows]
        cols = [model.pattern.cols]
        data = [bulk]
        for ev in evaluations:
            r, c, d = ev.tangent
            rows.append(r)
            cols.append(c)
            data.append(d)
        n = model.n_dofs
        matrix = sp.coo_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n, n),
        ).tocsr()
    return GlobalSystem(
        residual=f_int - f_ext + f_c,
        matrix=matrix,
        f_int=f_int,
        f_ext=f_ext,
        f_c=f_c,
        contact=evaluations,
    )


def reaction_forces(model: Model, system: GlobalSystem) -> np.ndarray:
    """Reactions at the Dirichlet dofs (residual there, zero elsewhere)."""
    return np.where(model.dofs.dirichlet, system.residual, 0.0)


def set_reaction(model: Model, system: GlobalSystem, name: str) -> np.ndarray:
    """Total reaction force (3,) of a constraint set, summed over all three components of its
    control points."""
    c = model.constraint(name)
    dofs = model.dofs.global_dofs(c.body, c.nodes)
    return system.residual[dofs].sum(axis=0)


def set_torque(
    model: Model,
    system: GlobalSystem,
    u: np.ndarray,
    name: str,
    center: Sequence[float],
) -> np.ndarray:
    """Moment (3,) of the reactions of a set about ``center`` in the current configuration."""
    c = model.constraint(name)
    body = model.bodies[c.body].body
    dofs = model.dofs.global_dofs(c.body, c.nodes)
    x = body.points[c.nodes] + u[dofs]
    return np.cross(x - np.asarray(center, dtype=float), system.residual[dofs]).sum(axis=0)
