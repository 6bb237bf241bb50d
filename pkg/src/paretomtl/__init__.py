"""Pareto multi-task learning: preference-vector decomposition with min-norm descent.

The main entry points are re-exported here; see the submodules for details.
"""

from .decomposition import (
    PreferenceVectorSet,
    activated_set,
    constraint_gradient_coeffs,
    constraint_values,
    even_preference_vectors,
    load_preference_vectors,
    sector_index,
)
from .metrics import dominates, hypervolume_2d, pareto_filter, sector_coverage, spacing
from .minnorm import (
    DescentStep,
    DualWeights,
    NumericDomainError,
    assemble_direction,
    build_gram,
    descent_direction,
    min_norm_pair,
    solve_simplex_min_norm,
)
from .problems import (
    Logistic3Problem,
    MultiObjectiveProblem,
    ShiftedProblem,
    SyntheticProblem,
    finite_diff_check,
)
from .solvers import (
    SolutionSet,
    SolverConfig,
    Trajectory,
    effective_weights,
    find_initial,
    linear_run,
    mgda_run,
    mgda_step,
    pareto_mtl_step,
    run_all,
    run_subproblem,
)

__version__ = "0.1.0"
