"""Turn a :py:class:`ProblemConfig` into solver objects."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from igacontact.config import BodySpec, ConfigError, GeometryKind, ProblemConfig
from igacontact.contact import (
    ContactPair,
    NurbsMasterSurface,
    PenaltyScaling,
    RigidPlane,
    min_element_edge,
    scaled_penalty,
)
from igacontact.continuum import lame_from_engineering, pressure_force
from igacontact.nurbs import (
    Geometry,
    Grading,
    VOBody,
    block,
    build_vo_body,
    hollow_hemisphere,
    sphere_octant,
    spherical_indentor,
)
from igacontact.solver import (
    BodyModel,
    ConstraintSet,
    LoadProgram,
    Model,
    Motion,
    NewtonSettings,
    Stage,
)

_LOGGER = logging.getLogger(__name__)

_BUILDERS = {
    GeometryKind.BLOCK: block,
    GeometryKind.SPHERE_OCTANT: sphere_octant,
    GeometryKind.HOLLOW_HEMISPHERE: hollow_hemisphere,
    GeometryKind.SPHERICAL_INDENTOR: spherical_indentor,
}


@dataclass
class BuiltProblem:
    """Solver side objects of one configuration.

    :var torque_centers: Reference point per constraint set whose moment is recorded
    :var penalties: Effective penalty parameters per contact pair, after scaling
    """

    model: Model
    program: LoadProgram
    settings: NewtonSettings
    bodies: Dict[str, VOBody]
    torque_centers: Dict[str, Sequence[float]]
    penalties: List[Dict[str, float]]


def build_geometry(spec: BodySpec) -> Geometry:
    kwargs = dict(spec.params)
    kwargs["elements"] = spec.elements
    kwargs["degrees"] = spec.volume_degrees()
    if spec.grading is not None:
        kwargs["grading"] = Grading(*spec.grading)
    try:
        return _BUILDERS[spec.geometry](**kwargs)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"bodies.{spec.name}", str(e)) from e


def build_body(spec: BodySpec) -> VOBody:
    geo = build_geometry(spec)
    return build_vo_body(
        geo.volume, spec.contact_face, spec.discretization.steps, name=spec.name
    )


def build_program(cfg: ProblemConfig) -> LoadProgram:
    return LoadProgram(
        [
            Stage(
                name=s.name,
                steps=s.steps,
                motions={
                    m.set: Motion(
                        translation=m.translation,
                        angle_deg=m.angle_deg,
                        axis=m.axis,
                        center=m.center,
                    )
                    for m in s.motions
                },
                load_factor=s.load_factor,
                friction=s.friction,
            )
            for s in cfg.stages
        ]
    )


def build_model(cfg: ProblemConfig) -> BuiltProblem:
    """Geometry, varying-order bodies, loads, contact pairs, constraint sets and the load
    program of ``cfg``.

    :raises ConfigError: Invalid geometry parameters or references
    """
    cfg.validate()
    bodies: Dict[str, VOBody] = {}
    index: Dict[str, int] = {}
    for i, spec in enumerate(cfg.bodies):
        bodies[spec.name] = build_body(spec)
        index[spec.name] = i
        _LOGGER.info(f"{bodies[spec.name]}")
    external = {name: np.zeros((b.control_count, 3)) for name, b in bodies.items()}
    for p in cfg.pressures:
        external[p.body] += pressure_force(bodies[p.body], p.face, p.pressure)
    body_models = [
        BodyModel.build(
            bodies[spec.name],
            lame_from_engineering(spec.material.E, spec.material.nu),
            external[spec.name],
        )
        for spec in cfg.bodies
    ]
    pairs = []
    penalties = []
    for c in cfg.contacts:
        slave = bodies[c.slave]
        if c.master == "plane":
            master = RigidPlane(c.plane.point, c.plane.normal)
        else:
            master = NurbsMasterSurface(bodies[c.master])
        h_min = min_element_edge(slave)
        penalty = scaled_penalty(c.eps_N, c.eps_T, c.mu_f, c.penalty_scaling, h_min)
        if c.penalty_scaling != PenaltyScaling.NONE:
            _LOGGER.info(
                f"{c.slave}: penalties scaled by minimum element size {h_min:.4g}: "
                f"eps_N {penalty.eps_N:.4g}, eps_T {penalty.eps_T:.4g}"
            )
        penalties.append(
            {"eps_N": penalty.eps_N, "eps_T": penalty.eps_T, "mu_f": penalty.mu_f, "h_min": h_min}
        )
        pairs.append(
            ContactPair(
                slave,
                master,
                penalty,
                n_gp=c.n_gp,
                area_measure=c.area_measure,
                name=f"{c.slave}->{c.master}",
            )
        )
    constraints = []
    for c in cfg.constraints:
        body = bodies[c.body]
        nodes = np.unique(np.concatenate([body.face_nodes(f) for f in c.faces]))
        constraints.append(
            ConstraintSet(c.name, index[c.body], nodes, tuple(c.components))
        )
    model = Model(body_models, pairs, constraints, parallel=cfg.solver.parallel)
    settings = NewtonSettings(
        rel_tol=cfg.solver.rel_tol,
        abs_tol=cfg.solver.abs_tol,
        max_iterations=cfg.solver.max_iterations,
        max_cutbacks=cfg.solver.max_cutbacks,
    )
    torque_centers = {}
    if cfg.analysis.torque_set is not None:
        torque_centers[cfg.analysis.torque_set] = cfg.analysis.torque_center
    return BuiltProblem(
        model=model,
        program=build_program(cfg),
        settings=settings,
        bodies=bodies,
        torque_centers=torque_centers,
        penalties=penalties,
    )
