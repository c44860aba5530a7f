"""NURBS solids, contact surfaces and varying-order bodies."""
from .defs import (
    MeshQualityError,
    KinematicsError,
    VOConstructionError,
    VOMisuseError,
    GeometrySelfCheckError,
)
from .faces import Face, Orientation, orientation_to_top
from .basis import TensorBasis, rational_basis
from .surface import (
    NurbsSurface,
    SurfaceKinematics,
    kinematics_from_basis,
    surface_basis_batch,
    surface_kinematics,
)
from .volume import (
    NurbsVolume,
    eval_volume,
    extract_face_surface,
    orient_to_face,
    refine_h,
)
from .vo import (
    ElementGroup,
    ElementKind,
    VOBasisEval,
    VOBody,
    build_vo_body,
    eval_vo_basis,
)
from .geometry import (
    Geometry,
    Grading,
    block,
    hollow_hemisphere,
    k_refine,
    sphere_octant,
    spherical_indentor,
)
from .dofs import DofSummary, dof_summary, format_dof_table
