"""Return-probability spectra of finitely supported random walks on the integers."""
from .errors import *  # noqa: F401,F403
from .walk_core import (  # noqa: F401
    Equivalence,
    MomentVector,
    WalkShape,
    equivalent,
    lazy_walk,
    moments,
    new_shape,
    reindex,
    scale_equivalents,
    shape_from_json,
    simple_walk,
    support_gcd,
)
from .spectrum import (  # noqa: F401
    EmpiricalSpectrum,
    Spectrum,
    bias_diagnostic,
    isospectral_through,
    return_probabilities,
    simulate,
    u1_invariant_dims,
)
from .asymptotics import (  # noqa: F401
    AsymptoticExpansion,
    NormalizedMomentPolynomial,
    evaluate_L,
    evaluate_L_tilde,
    expansion,
    symbolic_A,
    verify_expansion,
)
from .puiseux import (  # noqa: F401
    BranchPair,
    PuiseuxSeries,
    gamma_branches,
    gamma_branches_at_zero,
    gamma_diff_at_infinity,
    gamma_diff_at_zero,
    laplace_coefficients,
    series_compose,
    series_invert,
)
from .reconstruct import (  # noqa: F401
    GuaranteeReport,
    fix_scales,
    guarantee,
    guarantee_for_shape,
    half_shape_from_series,
    reconstruct_e1,
    reconstruct_from_branches,
    reconstruct_from_diff,
)
from .muller_tables import MullerTableRow, muller_tables, rows_for_n  # noqa: F401
from .moment_map import (  # noqa: F401
    MorseCertificate,
    ParameterPoint,
    moment_jacobian,
    morse_certificate,
    sample,
    search_isospectral,
)

__version__ = "0.1.0"
