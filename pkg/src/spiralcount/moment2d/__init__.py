"""Second moment of the primitive Siegel transform of P_{T,c} on the space of planar lattices."""

from .segments import (
    IntersectionProfile,
    RootsY,
    SegmentQuery,
    classify_intersection,
    roots_y,
    segment_length,
)
from .integrals import (
    ALPHAS,
    IntegralBreakdown,
    SubregionIntegral,
    band_limits,
    closed_form_A,
    engine_A,
    full_integral,
    n_max,
    classical_A,
    leading_term,
    quadrature_A,
    quadrature_full_integral,
)
from .second import (
    KYResult,
    PhiSum,
    centered_second_moment,
    ky_report,
    ky_second_norm,
    phi_weighted_sum,
)
from .series import EXPANSIONS, LISTED, SeriesSpec, series_eval, series_terms
