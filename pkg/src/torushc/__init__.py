"""Hard-core model on the even discrete torus: exact small-instance
analysis, Glauber-dynamics simulation, and the contour/flow machinery."""

from .errors import BudgetExceededError, PreconditionError
from .torus import TorusGraph, build_torus, k_components
from .hardcore import (
    BALANCED,
    EVEN_HEAVY,
    ODD_HEAVY,
    OccupancySet,
    balance_statistic,
    classify,
    is_independent,
    weight,
)
from .glauber import ChainParams, Trajectory, simulate, step, transition_probability
from .exact import (
    ExactModel,
    build_exact_model,
    conductance_lower_bound,
    entropy_H,
    enumerate_independent_sets,
    exact_mixing_time,
    partition_function,
    total_variation,
    weighted_binomial_bound_check,
)
from .cutsets import (
    ContourFamily,
    Cutset,
    classify_even_odd,
    cutsets_of_region,
    dual_graph,
    gamma_family,
    isoperimetry_check,
    occupied_regions,
    profile_of,
    size_buckets,
    size_identity,
    two_component_structure,
    verify_contour_properties,
)
from .peierls import (
    Approximation,
    beta,
    choose_direction,
    coarse_witness_U,
    flow_nu,
    flow_out_sum,
    free_sites,
    interior_shift,
    is_approximation,
    q_sets,
)

__version__ = "0.1.0"
