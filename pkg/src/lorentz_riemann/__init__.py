"""Riemann-type zero mean curvature surfaces in Lorentz-Minkowski 3-space."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    DegeneratePoint,
    Divergent,
    DomainError,
    LorentzRiemannError,
    NoConelikePoint,
    NoLimitLine,
    SingularPoint,
    ToleranceNotMet,
)
from .minkowski import (  # noqa: E402
    CausalClass,
    IsometryL3,
    apply_isometry,
    causal_class,
    lorentz_cross,
    lorentz_inner,
)
from .families import (  # noqa: E402
    CaseReport,
    FamilyId,
    Profile,
    RootPair,
    classify_case,
    constant_radius_solution,
    cubic_roots,
    first_integral_residual,
    make_profile,
    ode_residual,
    radicand,
)
from .quadrature import (  # noqa: E402
    LimitData,
    ProfileEval,
    asymptotic_limits,
    closed_form,
    profile_integrals,
)
from .surface import (  # noqa: E402
    SurfacePatch,
    SurfaceVertex,
    causal_map,
    implicit_zmc_residual,
    lightlike_locus,
    mean_curvature_numerator,
    parametrize,
    tangents,
    weight_W,
)
from .extension import (  # noqa: E402
    LimitLine,
    detect_boundary_line,
    periodic_extend,
    schwarz_reflect,
)
