"""Moving-frame analysis of surfaces in the unit 3-sphere.

Builds adapted orthonormal frames along parametrized surfaces, evaluates
connection forms and curvature, checks the structure equations numerically,
and classifies surfaces with constant principal curvatures as round spheres
or flat tori.
"""

from .classify import (
    FlatTorus,
    GreatSphere,
    NonConstant,
    RoundSphere,
    classify,
    homogeneity_witness,
    invariance_suite,
)
from .config import RunConfig, Tolerances, config_from_dict, load_config
from .curvature import (
    codazzi_residuals,
    curvature_report,
    gaussian_extrinsic,
    gaussian_intrinsic,
    principal_curvatures,
    second_fundamental,
)
from .errors import (
    BadParameter,
    ClassificationError,
    DegenerateInput,
    FrameForgeError,
    InconsistentConstants,
    NotConstantCenter,
    NotImmersed,
    NotPrincipalChart,
    OutOfDomain,
    PlaneDrift,
    PoleCollisionWarning,
    SingularCoframe,
    UnsupportedSpec,
)
from .forms import Form1, Form2, GridSpec, d1, wedge11
from .frames import (
    adapted_frame,
    cartan_connection,
    cartan_solve,
    coframe,
    connection_forms,
    frame_field,
    pullback_check,
    structural_residuals,
)
from .linalg import SymMat2, eig_sym2, gram_schmidt4, random_so4
from .patch import (
    PerturbedTorus,
    SphereCap,
    SurfacePatch,
    TorusAB,
    Transformed,
    apply_isometry,
    finite_difference_patch,
    implicit_residual,
    make_patch,
    make_perturbed_torus,
    make_sphere_family,
    make_torus_family,
)

__version__ = "0.1.0"

__all__ = [
    "adapted_frame",
    "apply_isometry",
    "BadParameter",
    "cartan_connection",
    "cartan_solve",
    "ClassificationError",
    "classify",
    "codazzi_residuals",
    "coframe",
    "config_from_dict",
    "connection_forms",
    "curvature_report",
    "d1",
    "DegenerateInput",
    "eig_sym2",
    "finite_difference_patch",
    "FlatTorus",
    "Form1",
    "Form2",
    "frame_field",
    "FrameForgeError",
    "gaussian_extrinsic",
    "gaussian_intrinsic",
    "gram_schmidt4",
    "GreatSphere",
    "GridSpec",
    "homogeneity_witness",
    "implicit_residual",
    "InconsistentConstants",
    "invariance_suite",
    "load_config",
    "make_patch",
    "make_perturbed_torus",
    "make_sphere_family",
    "make_torus_family",
    "NonConstant",
    "NotConstantCenter",
    "NotImmersed",
    "NotPrincipalChart",
    "OutOfDomain",
    "PerturbedTorus",
    "PlaneDrift",
    "PoleCollisionWarning",
    "principal_curvatures",
    "pullback_check",
    "random_so4",
    "RoundSphere",
    "RunConfig",
    "second_fundamental",
    "SingularCoframe",
    "SphereCap",
    "structural_residuals",
    "SurfacePatch",
    "SymMat2",
    "Tolerances",
    "TorusAB",
    "Transformed",
    "UnsupportedSpec",
    "wedge11",
]
