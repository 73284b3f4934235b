"""Machinery of the geometric zero-one law.

Gaifman-graph geometry on finite relational structures, a first-order
parser/evaluator, Ehrenfeucht-Fraisse games with the explicit 5^(n-i)
duplicator strategy, ambient-structure generators with local ball access,
the extension-axiom scheme, percolation-style substructure fractions, and
the k-ary-tree / unary-forest asymptotics.
"""

from .ambient import (
    AmbientGenerator,
    BallPatch,
    FreeMonoid,
    GridZ2,
    KaryTree,
    SigmaAxiom,
    UniversalUnaryTree,
    ZLine,
    ball_of,
    ball_of_set,
    ball_representatives,
    embeds_in_ambient,
    make_generator,
    patch_from_json,
    patch_to_json,
    pointed_isomorphic,
    sigma_axioms,
)
from .asymptotics import (
    FixpointParams,
    FixpointResult,
    ForestCount,
    InfinitePathResult,
    McEstimate,
    RadiusReport,
    count_labeled_forests,
    count_unlabeled_forests,
    descending_path_mc,
    forest_bounds,
    forest_count_table,
    infinite_path_prob,
    iterate_pn,
    least_fixed_point,
    radius_probe,
)
from .errors import (
    BudgetError,
    EvaluationError,
    GuardError,
    ParseError,
    ValidationError,
    ZolError,
)
from .formulas import (
    Formula,
    eval_formula,
    format_formula,
    free_vars,
    is_sentence,
    parse,
    quantifier_rank,
    validate,
)
from .kernels import CompiledEval, available_impls, compile_eval
from .morphisms import (
    Embedding,
    PartialMap,
    are_disjoint,
    check_ball_iso_props,
    ef_equivalent,
    find_disjoint_copy,
    find_embeddings,
    has_closed_copy,
    is_closed,
    is_isomorphic,
    is_partial_isomorphism,
    iter_embeddings,
)
from .rng import generator, sample_masks
from .stochastics import (
    ConeSpec,
    DensityReport,
    FractionResult,
    TrajectoryResult,
    closed_copy_prob,
    cone_measure,
    fraction_exact,
    fraction_mc,
    generic_density_check,
    sample_substructure,
    trajectory,
)
from .strategy import (
    StrategyState,
    duplicator_strategy_move,
    initial_state,
    play_game,
    verify_state,
)
from .structures import (
    INFINITE,
    GaifmanGraph,
    Structure,
    SubsetMask,
    Vocabulary,
    ball,
    bfs_distances,
    components,
    disjoint_union,
    distance,
    gaifman,
    induced,
    load_structure,
    max_degree,
    structure_from_json,
    structure_to_json,
)

__version__ = "0.1.0"

__all__ = [
    "AmbientGenerator",
    "BallPatch",
    "BudgetError",
    "CompiledEval",
    "ConeSpec",
    "DensityReport",
    "Embedding",
    "EvaluationError",
    "FixpointParams",
    "FixpointResult",
    "ForestCount",
    "Formula",
    "FractionResult",
    "FreeMonoid",
    "GaifmanGraph",
    "GridZ2",
    "GuardError",
    "INFINITE",
    "InfinitePathResult",
    "KaryTree",
    "McEstimate",
    "ParseError",
    "PartialMap",
    "RadiusReport",
    "SigmaAxiom",
    "StrategyState",
    "Structure",
    "SubsetMask",
    "TrajectoryResult",
    "UniversalUnaryTree",
    "ValidationError",
    "Vocabulary",
    "ZLine",
    "ZolError",
    "are_disjoint",
    "available_impls",
    "ball",
    "ball_of",
    "ball_of_set",
    "ball_representatives",
    "bfs_distances",
    "check_ball_iso_props",
    "closed_copy_prob",
    "compile_eval",
    "components",
    "cone_measure",
    "count_labeled_forests",
    "count_unlabeled_forests",
    "descending_path_mc",
    "disjoint_union",
    "distance",
    "duplicator_strategy_move",
    "ef_equivalent",
    "embeds_in_ambient",
    "eval_formula",
    "find_disjoint_copy",
    "find_embeddings",
    "forest_bounds",
    "forest_count_table",
    "format_formula",
    "fraction_exact",
    "fraction_mc",
    "free_vars",
    "gaifman",
    "generator",
    "generic_density_check",
    "has_closed_copy",
    "induced",
    "infinite_path_prob",
    "initial_state",
    "is_closed",
    "is_isomorphic",
    "is_partial_isomorphism",
    "is_sentence",
    "iter_embeddings",
    "iterate_pn",
    "least_fixed_point",
    "load_structure",
    "make_generator",
    "max_degree",
    "parse",
    "patch_from_json",
    "patch_to_json",
    "play_game",
    "pointed_isomorphic",
    "quantifier_rank",
    "radius_probe",
    "sample_masks",
    "sample_substructure",
    "sigma_axioms",
    "structure_from_json",
    "structure_to_json",
    "trajectory",
    "validate",
    "verify_state",
]
