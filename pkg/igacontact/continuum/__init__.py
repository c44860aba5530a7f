"""Neo-Hookean hyperelastic bulk: material law, element quadrature data and loads."""
from .defs import IncompressibilityError, ElementInversionError, LoadFaceError
from .material import (
    MaterialParams,
    DeformationState,
    lame_from_engineering,
    deformation_state,
    strain_energy,
    cauchy_stress,
    material_tangent,
    tangent_moduli,
)
from .element import (
    ElementQuadData,
    element_quad_data,
    tensor_rule,
    deformation_gradient,
    spatial_gradients,
    element_strain_energy,
    element_internal_force,
    element_stiffness,
    element_force_and_stiffness,
)
from .loads import pressure_force, body_force, element_external_force
