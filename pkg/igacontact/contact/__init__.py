"""Gauss point to surface penalty contact with Coulomb friction."""
from .defs import (
    AreaMeasure,
    ContactTraction,
    FrictionStatus,
    PenaltyScaling,
    ProjectionFailure,
    ProjectionResult,
    SlipDirectionUndefined,
)
from .master import MasterSurface, NurbsMasterSurface, RigidPlane
from .projection import (
    ProjectionBatch,
    normal_gap,
    project_closest_point,
    project_points,
)
from .traction import (
    FrictionState,
    commit_history,
    friction_return_map,
    normal_traction,
    return_map_batch,
    tangential_trial,
)
from .kernel import (
    KernelInput,
    KernelOutput,
    PenaltyParams,
    contact_force_vectors,
    contact_tangents,
    evaluate_kernel,
)
from .pair import (
    ContactEvaluation,
    ContactPair,
    SlaveQuadrature,
    min_element_edge,
    scaled_penalty,
    slave_quadrature,
)
