"""Search for a treasure on the half-line when every pass detects it only
with probability p.

The package evaluates search trajectories (expected detection time and
competitive ratio), builds the optimal monotone strategy and certifies its
optimality numerically, and constructs t-sub-monotone strategies that beat
it.  A Monte Carlo simulator cross-checks the series.
"""
from .errors import (
    CensoredError,
    ConvergenceError,
    DivergenceError,
    DomainError,
    FaultySearchError,
    InfeasiblePairError,
    NoRootError,
    ResidualError,
    SingularMatrixError,
    TurningPointError,
)
from .monotone import (
    lower_bound_roots,
    lower_bound_system,
    lower_bound_threshold,
    lower_bound_verdict,
    monotone_cr_formula,
    optimal_base,
    optimal_monotone_cr,
    worst_case_cr_interval,
)
from .montecarlo import SimConfig, SimResult, simulate_detection_time
from .submonotone import (
    CharPoly,
    RatioReport,
    Solution,
    SubMonotoneParams,
    char_poly,
    check_feasible,
    heuristic_t1,
    heuristic_t2,
    interval_ratios,
    limit_ratio,
    solve_optimal,
)
from .trajectory import (
    CrSample,
    ExplicitMonotone,
    GapSchedule,
    GeometricMonotone,
    SubMonotone,
    SupReport,
    competitive_ratio_at,
    competitive_ratio_sup,
    expected_detection_time,
    gap_schedule,
    turning_points,
)

__version__ = "0.1.0"
