"""Border bases for zero-dimensional polynomial systems, order-by-order
lifting of their rewriting rules along truncated-power-series coefficient
deformations, and numeric experiments certifying that the multiplicity of
an isolated zero is conserved (as a sum over nearby zeros) under
perturbation.
"""

from .borderbasis import (
    BorderBasis,
    MultiplicationMatrices,
    commutation_check,
    from_groebner,
)
from .continuity import (
    CountReport,
    PerturbationExperiment,
    cluster_charpoly_bound,
    local_bezout_count,
    numeric_border_basis,
    univariate_continuity,
)
from .errors import (
    AmbiguousClusters,
    DegenerateSystem,
    DiscsOverlap,
    HenselbezError,
    NotAUnit,
    NotIsolated,
    NotSimpleZero,
    NotZeroDimensional,
    OriginNotAZero,
    ParseError,
    RequiresCertifiedBasis,
    ResidualMismatch,
    ShapeError,
    UnsupportedScalar,
)
from .groebner import (
    GroebnerBasis,
    StaircaseBasis,
    buchberger,
    local_multiplicity_truncation,
    membership_certificate,
    quotient_staircase,
)
from .hensel import (
    DeformedSystem,
    DivisionResult,
    LiftedBorderBasis,
    LocalizationData,
    VerificationReport,
    build_h,
    char_poly_diagnostics,
    divide_by_candidate,
    lift_border_basis,
    localize_residual,
    verify_lift,
)
from .localzero import (
    LocalFactorReport,
    ZeroWithMultiplicity,
    multiplicity_at_origin,
    split_idempotent,
    stickelberger_decompose,
)
from .polynomials import Monomial, OrderIdeal, Polynomial, is_closed_by_division
from .scalars import QQ, AtLeast, ComplexField, PrimeField, SeriesRing, TruncatedSeries

__version__ = "0.1.0"
