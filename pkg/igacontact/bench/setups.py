"""Benchmark problem definitions.

Every setup returns a complete :py:class:`ProblemConfig`; the geometry, material, mesh and
load data follow the published benchmark descriptions. Values the descriptions leave open are
module constants so they show up in the echoed configuration of every run.
"""
from __future__ import annotations

import copy
import logging
from typing import Optional

from igacontact.config import (
    AnalysisSpec,
    BenchmarkKind,
    BodySpec,
    ConfigError,
    ConstraintSpec,
    ContactSpec,
    Discretization,
    GeometryKind,
    MaterialSpec,
    MotionSpec,
    OutputSpec,
    PressureSpec,
    ProblemConfig,
    RigidPlaneSpec,
    RunMeta,
    StageSpec,
)
from igacontact.contact import PenaltyScaling
from igacontact.nurbs import Face

_LOGGER = logging.getLogger(__name__)

PATCH_LOWER_ELEMENTS = (3, 6, 12)
PATCH_UPPER_ELEMENTS = (2, 5, 11)
PATCH_PENALTY_FACTOR = 100.0
PATCH_PRESSURE = 1.0
PATCH_STEPS = 10

HERTZ_MESH_FACTORS = (1, 2, 4, 8, 16)
HERTZ_ANGULAR = 12
HERTZ_RADIAL = 24
HERTZ_R_OUTER = 1.0
HERTZ_R_INNER = 0.8
HERTZ_EPS_N = 5.0e3
# Small indentation keeping penetration over radius well below 2 percent
HERTZ_DISPLACEMENT = -0.03
HERTZ_STEPS = 10

IRONING_MESHES = {
    1: ((5, 5, 3), (12, 4, 3)),
    2: ((10, 10, 4), (24, 8, 6)),
    3: ((20, 20, 5), (48, 16, 12)),
}
IRONING_SLAB = (80.0, 28.0, 21.0)
IRONING_INDENTOR = (20.0, 20.0, 16.0)
IRONING_CAP_RADIUS = 20.0
IRONING_START_X = 13.0
IRONING_PRESS = -7.0
IRONING_DRAG = 54.0
IRONING_PRESS_STEPS = 70
IRONING_DRAG_STEPS = 540
IRONING_PENALTY = 100.0
IRONING_MU = 0.1

TWISTING_MESHES = {
    1: ((4, 4, 2), (2, 2, 2), 100.0),
    2: ((8, 8, 3), (4, 4, 4), 200.0),
    3: ((16, 16, 4), (8, 8, 8), 400.0),
}
TWISTING_L = 2.0
TWISTING_MU = 0.5
TWISTING_PRESS_STEPS = 20
# 1 degree per step
TWISTING_ROTATION_STEPS = 180
TWISTING_ANGLE = 180.0


def _scaled(steps: int, scale: float) -> int:
    return max(1, int(round(steps * scale)))


def _check_level(level: int, available) -> int:
    if level not in available:
        raise ConfigError("mesh_level", f"mesh level {level} not in {sorted(available)}")
    return level


def setup_patch_test(
    mesh_index: int = 1, n_gp: Optional[int] = None, p: int = 2, step_scale: float = 1.0
) -> ProblemConfig:
    """Two stacked unit cubes with non-matching meshes under a uniform pressure of 1 on the
    top. The upper cube is the slave. Symmetry planes x = 0 and y = 0 remove the in-plane
    rigid body modes without disturbing the homogeneous stress state.

    :param n_gp: Slave Gauss points per direction, default ``4 (p + 1)``
    :param step_scale: Multiplies the number of load steps
    """
    _check_level(mesh_index, range(1, len(PATCH_LOWER_ELEMENTS) + 1))
    n_lower = PATCH_LOWER_ELEMENTS[mesh_index - 1]
    n_upper = PATCH_UPPER_ELEMENTS[mesh_index - 1]
    material = MaterialSpec(E=1.0, nu=0.3)
    disc = Discretization(p)
    eps_n = PATCH_PENALTY_FACTOR * material.E
    # start at the penetration of the fully loaded state so the upper cube is supported
    overlap = PATCH_PRESSURE / eps_n
    bodies = [
        BodySpec(
            name="lower",
            geometry=GeometryKind.BLOCK,
            params={"dimensions": [1.0, 1.0, 1.0], "origin": [0.0, 0.0, 0.0]},
            elements=(n_lower,) * 3,
            material=material,
            discretization=disc,
            degrees=(p, p, p),
            contact_face=Face.XI3_MAX,
        ),
        BodySpec(
            name="upper",
            geometry=GeometryKind.BLOCK,
            params={"dimensions": [1.0, 1.0, 1.0], "origin": [0.0, 0.0, 1.0 - overlap]},
            elements=(n_upper,) * 3,
            material=copy.deepcopy(material),
            discretization=disc,
            degrees=(p, p, p),
            contact_face=Face.XI3_MIN,
        ),
    ]
    constraints = [
        ConstraintSpec("base", "lower", [Face.XI3_MIN], [2]),
        ConstraintSpec("lower_sym_x", "lower", [Face.XI1_MIN], [0]),
        ConstraintSpec("lower_sym_y", "lower", [Face.XI2_MIN], [1]),
        ConstraintSpec("upper_sym_x", "upper", [Face.XI1_MIN], [0]),
        ConstraintSpec("upper_sym_y", "upper", [Face.XI2_MIN], [1]),
    ]
    return ProblemConfig(
        bodies=bodies,
        contacts=[
            ContactSpec(
                slave="upper",
                master="lower",
                eps_N=eps_n,
                n_gp=n_gp or 0,
            )
        ],
        constraints=constraints,
        stages=[
            StageSpec(name="load", steps=_scaled(PATCH_STEPS, step_scale), load_factor=1.0)
        ],
        pressures=[PressureSpec(body="upper", face=Face.XI3_MAX, pressure=PATCH_PRESSURE)],
        analysis=AnalysisSpec(reaction_set="base"),
        meta=RunMeta(
            benchmark=BenchmarkKind.PATCH_TEST,
            mesh_level=mesh_index,
            step_scale=step_scale,
            description=f"contact patch test, mesh {mesh_index}, p = {p}",
        ),
    )


def setup_hertz(
    mesh_index: int = 1,
    disc: Discretization = Discretization(2),
    n_gp: Optional[int] = None,
    step_scale: float = 1.0,
) -> ProblemConfig:
    """Graded octant of a thick sphere pressed onto a rigid plane by a uniform vertical
    displacement of its equatorial face. The plane z = 0 touches the lowest point."""
    _check_level(mesh_index, range(1, len(HERTZ_MESH_FACTORS) + 1))
    n = HERTZ_ANGULAR * HERTZ_MESH_FACTORS[mesh_index - 1]
    center = [0.0, 0.0, HERTZ_R_OUTER]
    body = BodySpec(
        name="sphere",
        geometry=GeometryKind.SPHERE_OCTANT,
        params={"r_inner": HERTZ_R_INNER, "r_outer": HERTZ_R_OUTER, "center": center},
        elements=(n, n, HERTZ_RADIAL),
        material=MaterialSpec(E=1.0, nu=0.3),
        discretization=disc,
        grading=(0.75, 0.1),
        contact_face=Face.XI3_MAX,
    )
    constraints = [
        ConstraintSpec("sym_y", "sphere", [Face.XI1_MIN], [1]),
        ConstraintSpec("sym_x", "sphere", [Face.XI2_MIN], [0]),
        ConstraintSpec("top", "sphere", [Face.XI1_MAX], [2]),
    ]
    return ProblemConfig(
        bodies=[body],
        contacts=[
            ContactSpec(
                slave="sphere",
                master="plane",
                eps_N=HERTZ_EPS_N,
                n_gp=n_gp or 0,
                plane=RigidPlaneSpec(point=(0.0, 0.0, 0.0), normal=(0.0, 0.0, 1.0)),
            )
        ],
        constraints=constraints,
        stages=[
            StageSpec(
                name="press",
                steps=_scaled(HERTZ_STEPS, step_scale),
                motions=[MotionSpec("top", translation=(0.0, 0.0, HERTZ_DISPLACEMENT))],
            )
        ],
        analysis=AnalysisSpec(driven_set="top", reaction_set="top", load_multiplier=4.0),
        output=OutputSpec(contact_every=1),
        meta=RunMeta(
            benchmark=BenchmarkKind.HERTZ,
            mesh_level=mesh_index,
            step_scale=step_scale,
            description=f"Hertz sphere on rigid plane, mesh m{mesh_index}, {disc}",
        ),
    )


def setup_ironing(
    mesh_index: int = 1,
    disc: Discretization = Discretization(2),
    step_scale: float = 1.0,
    n_gp: Optional[int] = None,
) -> ProblemConfig:
    """Spherical-faced indentor pressed into an elastic slab and dragged along it. Element
    counts follow the published mesh table literally, the load step counts of m1 are used at
    every level."""
    _check_level(mesh_index, IRONING_MESHES)
    indentor_elements, slab_elements = IRONING_MESHES[mesh_index]
    lx, ly, lz = IRONING_SLAB
    width, _, height = IRONING_INDENTOR
    bottom = [IRONING_START_X, 0.5 * ly, lz]
    bodies = [
        BodySpec(
            name="indentor",
            geometry=GeometryKind.SPHERICAL_INDENTOR,
            params={
                "width": width,
                "height": height,
                "cap_radius": IRONING_CAP_RADIUS,
                "bottom": bottom,
            },
            elements=indentor_elements,
            material=MaterialSpec(E=100.0, nu=0.3),
            discretization=disc,
            contact_face=Face.XI3_MAX,
        ),
        BodySpec(
            name="slab",
            geometry=GeometryKind.BLOCK,
            params={"dimensions": [lx, ly, lz], "origin": [0.0, 0.0, 0.0]},
            elements=slab_elements,
            material=MaterialSpec(E=1.0, nu=0.3),
            discretization=disc,
            contact_face=Face.XI3_MAX,
        ),
    ]
    return ProblemConfig(
        bodies=bodies,
        contacts=[
            ContactSpec(
                slave="indentor",
                master="slab",
                eps_N=IRONING_PENALTY,
                eps_T=IRONING_PENALTY,
                mu_f=IRONING_MU,
                n_gp=n_gp or 0,
                penalty_scaling=PenaltyScaling.MIN_ELEMENT_SIZE,
            )
        ],
        constraints=[
            ConstraintSpec("base", "slab", [Face.XI3_MIN]),
            ConstraintSpec("top", "indentor", [Face.XI3_MIN]),
        ],
        stages=[
            StageSpec(
                name="press",
                steps=_scaled(IRONING_PRESS_STEPS, step_scale),
                motions=[MotionSpec("top", translation=(0.0, 0.0, IRONING_PRESS))],
                friction=True,
            ),
            StageSpec(
                name="drag",
                steps=_scaled(IRONING_DRAG_STEPS, step_scale),
                motions=[MotionSpec("top", translation=(IRONING_DRAG, 0.0, IRONING_PRESS))],
                friction=True,
            ),
        ],
        analysis=AnalysisSpec(driven_set="top", reaction_set="top", window_stage="drag"),
        meta=RunMeta(
            benchmark=BenchmarkKind.IRONING,
            mesh_level=mesh_index,
            step_scale=step_scale,
            description=f"frictional ironing, mesh m{mesh_index}, {disc}",
        ),
    )


def setup_twisting(
    mesh_index: int = 1,
    disc: Discretization = Discretization(2),
    friction: bool = False,
    step_scale: float = 1.0,
    n_gp: Optional[int] = None,
) -> ProblemConfig:
    """Hollow hemisphere pressed into a cube by half its diameter, then rotated by 180
    degrees about the vertical axis. The compression is always frictionless; the frictional
    variant switches friction on for the rotation, where every active point starts sticking."""
    _check_level(mesh_index, TWISTING_MESHES)
    hemi_elements, cube_elements, eps_n = TWISTING_MESHES[mesh_index]
    length = TWISTING_L
    center = [0.5 * length, 0.5 * length, 1.5 * length]
    bodies = [
        BodySpec(
            name="hemisphere",
            geometry=GeometryKind.HOLLOW_HEMISPHERE,
            params={"r_inner": length / 3.0, "r_outer": 0.5 * length, "center": center},
            elements=hemi_elements,
            material=MaterialSpec(E=5.0, nu=0.3),
            discretization=disc,
            contact_face=Face.XI3_MAX,
        ),
        BodySpec(
            name="cube",
            geometry=GeometryKind.BLOCK,
            params={"dimensions": [length] * 3, "origin": [0.0, 0.0, 0.0]},
            elements=cube_elements,
            material=MaterialSpec(E=1.0, nu=0.3),
            discretization=disc,
            contact_face=Face.XI3_MAX,
        ),
    ]
    press = (0.0, 0.0, -0.5 * length)
    return ProblemConfig(
        bodies=bodies,
        contacts=[
            ContactSpec(
                slave="hemisphere",
                master="cube",
                eps_N=eps_n,
                eps_T=eps_n if friction else 0.0,
                mu_f=TWISTING_MU if friction else 0.0,
                n_gp=n_gp or 0,
            )
        ],
        constraints=[
            ConstraintSpec("base", "cube", [Face.XI3_MIN]),
            ConstraintSpec("ring", "hemisphere", [Face.XI1_MIN, Face.XI1_MAX]),
        ],
        stages=[
            StageSpec(
                name="press",
                steps=_scaled(TWISTING_PRESS_STEPS, step_scale),
                motions=[MotionSpec("ring", translation=press, center=tuple(center))],
            ),
            StageSpec(
                name="twist",
                steps=_scaled(TWISTING_ROTATION_STEPS, step_scale),
                motions=[
                    MotionSpec(
                        "ring",
                        translation=press,
                        angle_deg=TWISTING_ANGLE,
                        axis=(0.0, 0.0, 1.0),
                        center=tuple(center),
                    )
                ],
                friction=friction,
            ),
        ],
        analysis=AnalysisSpec(
            driven_set="ring",
            reaction_set="ring",
            torque_set="ring",
            torque_center=tuple(center),
            torque_axis=(0.0, 0.0, 1.0),
            window_stage="twist",
        ),
        meta=RunMeta(
            benchmark=BenchmarkKind.TWISTING,
            mesh_level=mesh_index,
            step_scale=step_scale,
            description=(
                f"{'frictional' if friction else 'frictionless'} twisting, "
                f"mesh m{mesh_index}, {disc}"
            ),
        ),
    )


def setup_benchmark(
    kind: BenchmarkKind,
    mesh_level: int = 1,
    disc: Optional[Discretization] = None,
    friction: bool = False,
    n_gp: Optional[int] = None,
    step_scale: Optional[float] = None,
) -> ProblemConfig:
    kind = BenchmarkKind(kind)
    scale = 1.0 if step_scale is None else step_scale
    if kind == BenchmarkKind.PATCH_TEST:
        p = 2 if disc is None else disc.degree
        if disc is not None and disc.steps:
            raise ConfigError("discretization", "the patch test uses uniform degrees N<p>")
        return setup_patch_test(mesh_level, n_gp, p, scale)
    disc = disc or Discretization(2)
    if kind == BenchmarkKind.HERTZ:
        return setup_hertz(mesh_level, disc, n_gp, scale)
    if kind == BenchmarkKind.IRONING:
        return setup_ironing(mesh_level, disc, scale, n_gp)
    if kind == BenchmarkKind.TWISTING:
        return setup_twisting(mesh_level, disc, friction, scale, n_gp)
    raise ConfigError("benchmark", f"no setup for {kind.value}")


def apply_overrides(
    cfg: ProblemConfig,
    mesh_level: Optional[int] = None,
    disc: Optional[Discretization] = None,
    n_gp: Optional[int] = None,
    step_scale: Optional[float] = None,
    serial: bool = False,
) -> ProblemConfig:
    """Return a copy of ``cfg`` with command line overrides applied.

    Benchmark configurations are rebuilt from their setup so mesh level, discretization and
    step scale stay consistent; ``step_scale`` then replaces the stored scale. Custom
    configurations get the discretization of every body replaced and their step counts
    multiplied by ``step_scale``.
    """
    kind = cfg.meta.benchmark
    if kind != BenchmarkKind.CUSTOM:
        contact = cfg.contacts[0] if cfg.contacts else None
        out = setup_benchmark(
            kind,
            mesh_level=mesh_level or cfg.meta.mesh_level,
            disc=disc or cfg.bodies[0].discretization,
            friction=bool(contact and contact.mu_f > 0.0),
            n_gp=n_gp if n_gp is not None else (contact.n_gp if contact else None) or None,
            step_scale=step_scale if step_scale is not None else cfg.meta.step_scale,
        )
        out.solver = copy.deepcopy(cfg.solver)
        out.output = copy.deepcopy(cfg.output)
    else:
        if mesh_level is not None:
            raise ConfigError("mesh_level", "custom configurations have no mesh levels")
        out = copy.deepcopy(cfg)
        if disc is not None:
            for body in out.bodies:
                body.discretization = disc
                if body.degrees is not None:
                    body.degrees = (disc.degree, disc.degree, body.degrees[2])
        if n_gp is not None:
            for contact in out.contacts:
                contact.n_gp = n_gp
        if step_scale is not None:
            for stage in out.stages:
                stage.steps = _scaled(stage.steps, step_scale)
            out.meta.step_scale = out.meta.step_scale * step_scale
    if serial:
        out.solver.parallel = False
    out.validate()
    _LOGGER.debug(f"Effective configuration: {out.meta.description or out.meta.benchmark.value}")
    return out
