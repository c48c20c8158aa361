"""Majority-based imitation dynamics on graphs: simulation and exact analysis."""
from ._jit import USING_NUMBA
from .dynamics import (
    RunRecord,
    StepOutcome,
    format_opinions,
    init_opinions,
    is_absorbing,
    is_consensus,
    opinion_counts,
    parse_opinions,
    potential_Z,
    potential_floor,
    run_to_absorption,
    step,
    would_flip,
)
from .exact import (
    ExactAnalysis,
    can_reach_consensus,
    consensus_hit_probabilities,
    enumerate_absorbing,
    exact_consensus_probability,
    transitions,
)
from .graph import (
    Graph,
    GraphSpec,
    from_edge_list,
    make_complete,
    make_cycle,
    make_path,
    make_random_connected,
    make_star,
    to_edge_list,
)
from .montecarlo import EstimateReport, ExperimentConfig, estimate, sweep
from .theory import (
    BlockedPath,
    BoundReport,
    consensus_bound,
    corollary_holds,
    find_blocked_path,
    validate_absorbed_state,
    verify_frozen,
)

__version__ = "0.1.0"
