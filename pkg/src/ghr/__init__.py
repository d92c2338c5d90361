"""Generalized Heisenberg uncertainty bounds from central moments."""
from .bound import (
    BoundSeries,
    BoundTerm,
    Status,
    bound_series,
    closed_form_term,
    gamma_second_order,
    hankel_determinant,
    numerator_U,
    orthogonal_norm,
    projection_coefficient,
    series_term,
)
from .errors import (
    DegenerateDenominator,
    DegenerateFrame,
    GhrError,
    InsufficientMoments,
    InsufficientOrder,
    InvalidMoments,
    InvalidSpec,
    NonHermitian,
)
from .moments import (
    CumulantSequence,
    Exponential,
    ExplicitCumulants,
    ExplicitMoments,
    Gamma,
    Gaussian,
    MomentSequence,
    Spectrum,
    central_to_cumulants,
    cumulants_to_central,
    moments_of,
    raw_to_central,
    validate,
)

__version__ = "0.1.0"
