"""Non-stationary subdivision schemes with masks of growing support."""

__version__ = "0.1.0"

from .dyadic import DyadicRational, format_rational, parse_rational
from .errors import (
    AssumptionSViolation,
    CapExceeded,
    DimensionMismatch,
    DyadicOverflowError,
    MissingFullFactor,
    NotContractiveWithin,
    NotDivisible,
    SpecError,
    UplikeError,
)
from .geometry import (
    ConvexPolytope,
    closed_form_support,
    empirical_support,
    esupp,
    hausdorff_distance,
    minkowski_sum,
    predicted_support,
    scale,
)
from .lattice import LatticeData, apply_subdivision, delta, directional_difference
from .masks import (
    Basis,
    Mask,
    box3_mask,
    bspline_mask,
    directional_product,
    divide_exact,
    full_smoothing_factor,
    is_nonnegative,
    product,
    satisfies_eq5,
    smoothing_factor,
    submask_sums,
)
from .operators import (
    ContractivityReport,
    DiagonalDifferenceScheme,
    FactoredSymbol,
    contractivity,
    difference_scheme,
    divided_difference_symbols,
    iterated_norm,
    operator_norm,
)
from .runner import CascadeResult, cascade, cauchy_gap, phi_k, smoothness_probe, stationary_blf
from .sequences import MaskSequence
from .smoothness import BasisSequence, ClassReport, classify, extract_full_factors, sequence_smoothness_report
