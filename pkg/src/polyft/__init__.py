"""Fermat-Torricelli solving and uniqueness auditing in polyhedral norms."""

from .consistency import (
    ConsistentFaceSet,
    UniquenessReport,
    enumerate_consistent_sets,
    is_consistent,
    is_strictly_convex,
    plane_criterion_check,
    space3d_criterion_check,
    uniqueness_audit,
)
from .geometry import (
    DEFAULT_TOLERANCE,
    Face,
    Functional,
    PolytopeBall,
    Subspace,
    build_ball,
    dual_norm,
    norm,
    norming_functionals,
    span,
)
from .oracle import GridSpec, confirm_ft_set, grid_minimize
from .scenarios import (
    BUILTIN_NAMES,
    CaseReport,
    DodecahedronSection,
    builtin_ball,
    dodecahedron_constants,
    reproduce_case,
)
from .solver import (
    Cone,
    FTCertificate,
    FTSet,
    Instance,
    Refutation,
    collinear_ft,
    cone,
    find_ft_point,
    ft_locus,
    intersect_cones,
    verify_ft_point,
)
from .svgout import render_svg

__version__ = "0.1.0"
