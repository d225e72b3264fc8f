"""Closed-form association measures for checkerboard-type, Bernstein and
shuffle-of-min copulas, and checkerboard estimators of Chatterjee's xi."""

from .bernstein import (
    BernsteinCoefficients,
    bernstein_coefficients,
    eval_bernstein_cdf,
    eval_bernstein_partial1,
    rho_bernstein,
    tau_bernstein,
    xi_bernstein,
)
from .checkerboard import (
    eval_cdf,
    rho_checkerboard,
    tail_coefficients,
    tau_checkerboard,
    xi_checkerboard,
    xi_gap_bound,
)
from .core import (
    CheckerboardFamily,
    CheckerboardMatrix,
    Family,
    GridCopulaMatrix,
    MeasureReport,
    Permutation,
    SampleSet,
    Source,
    XiFamily,
    aggregate,
    cumulate,
    delta_from_grid,
    random_checkerboard,
    validate_checkerboard,
)
from .estimators import (
    EstimatorConfig,
    Variant,
    empirical_checkerboard,
    ranks,
    xi_checkerboard_estimate,
    xi_classical,
)
from .shuffle import displacement_sumsq, eval_shuffle_cdf, inversions, sample_shuffle, shuffle_measures

__version__ = "0.1.0"
