"""Coefficient fitting: objectives, search spaces, and optimizers."""

from .engines import (
    GRID_EVAL_CAP,
    FitResult,
    TraceEntry,
    fit_result_from_doc,
    fit_result_to_doc,
    fit_sparsity_factor,
    grid_search,
    local_refine,
    random_search,
    smbo_fit,
)
from .objective import DEFAULT_OBJECTIVE, FitObjectiveConfig, bind_objective, objective
from .spaces import (
    SearchSpace,
    SpaceAxis,
    default_search_space,
    space_from_doc,
    space_from_json,
    space_to_doc,
)

__all__ = [
    "DEFAULT_OBJECTIVE",
    "GRID_EVAL_CAP",
    "FitObjectiveConfig",
    "FitResult",
    "SearchSpace",
    "SpaceAxis",
    "TraceEntry",
    "bind_objective",
    "default_search_space",
    "fit_result_from_doc",
    "fit_result_to_doc",
    "fit_sparsity_factor",
    "grid_search",
    "local_refine",
    "objective",
    "random_search",
    "smbo_fit",
    "space_from_doc",
    "space_from_json",
    "space_to_doc",
]
