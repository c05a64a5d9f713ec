"""gramdyn: learning dynamics of competing grammars.

Advantage-matrix algebra, the reliable-learner inter-generational map,
stochastic reward-penalty learners, rest-point stability analysis,
bifurcation sweeps, and naive parameter learning on toy grammar spaces.
"""

__version__ = "0.1.0"

from .simplex import PopulationState, as_state, sample_interior, spacings_to_simplex
from .advantage import (
    AdvantageMatrix,
    PenaltyVector,
    RegionMeasure,
    ValidationReport,
    babelian,
    from_regions,
    matrix_from_dict,
    penalties,
    quasi_babelian,
    symmetric,
    two_grammar,
    validate,
)
from .dynamics import (
    LearnerState,
    Trajectory,
    generational_simulation,
    increment,
    map_formula,
    lrp_update,
    reliable_map,
    simulate_lrp_ensemble,
    simulate_lrp_learner,
    trajectory,
)
from .stability import (
    ConjectureReport,
    OrbitDiagram,
    RestPointReport,
    analytic_rest_point,
    bifurcation_sweep,
    chart_jacobian,
    classify_moduli,
    conjecture_explore,
    eigen_moduli,
    find_rest_points,
)
from .npl import (
    PRESETS,
    ParamState,
    ToyUGSpec,
    det_noun_spec,
    grammar_distribution,
    grammar_label,
    grammar_order,
    npl_generations,
    npl_penalties,
    npl_update,
    simulate_npl_ensemble,
    simulate_npl_learner,
    string_distribution,
)

__all__ = [
    "as_state",
    "AdvantageMatrix",
    "ConjectureReport",
    "LearnerState",
    "OrbitDiagram",
    "ParamState",
    "PenaltyVector",
    "PopulationState",
    "PRESETS",
    "RegionMeasure",
    "RestPointReport",
    "ToyUGSpec",
    "Trajectory",
    "ValidationReport",
    "analytic_rest_point",
    "babelian",
    "bifurcation_sweep",
    "chart_jacobian",
    "classify_moduli",
    "conjecture_explore",
    "det_noun_spec",
    "eigen_moduli",
    "find_rest_points",
    "from_regions",
    "generational_simulation",
    "grammar_distribution",
    "grammar_label",
    "grammar_order",
    "increment",
    "map_formula",
    "lrp_update",
    "matrix_from_dict",
    "npl_generations",
    "npl_penalties",
    "npl_update",
    "penalties",
    "quasi_babelian",
    "reliable_map",
    "sample_interior",
    "simulate_lrp_ensemble",
    "simulate_lrp_learner",
    "simulate_npl_ensemble",
    "simulate_npl_learner",
    "spacings_to_simplex",
    "string_distribution",
    "symmetric",
    "trajectory",
    "two_grammar",
    "validate",
]
