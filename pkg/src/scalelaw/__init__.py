"""Scaling-law toolkit: evaluate, fit, and plan with dense and sparse laws.

Six loss laws share one interface: a frozen coefficient dataclass, a
vectorized evaluator, and published coefficient tables.  On top of that sit
dataset handling (CSV records, reference grids, synthesis), coefficient
fitting (grid/random/model-guided search plus local refinement),
compute-optimal planning, and IsoFLOP curve analysis.  The same operations
are exposed through the ``scalelaw`` CLI and an HTTP service
(``scalelaw.service``).
"""

from .data import (
    GRID_NAMES,
    ExperimentRecord,
    ModelScale,
    derive_tokens_from_compute,
    parse_records,
    records_to_arrays,
    reference_grid,
    serialize_grid,
    serialize_records,
    synthesize_dataset,
)
from .errors import DomainError, InputError, ScalelawError
from .fit import (
    DEFAULT_OBJECTIVE,
    FitObjectiveConfig,
    FitResult,
    SearchSpace,
    SpaceAxis,
    TraceEntry,
    default_search_space,
    fit_result_from_doc,
    fit_result_to_doc,
    fit_sparsity_factor,
    grid_search,
    local_refine,
    objective,
    random_search,
    smbo_fit,
    space_from_doc,
    space_from_json,
    space_to_doc,
)
from .isoflop import (
    DEFAULT_SAMPLES,
    DEFAULT_SPIKE_THRESHOLD,
    DivergenceReport,
    IsoflopCurve,
    SpikeReport,
    compare_laws,
    curve_minimum,
    curve_to_csv,
    curves_to_csv,
    curves_to_svg,
    detect_spike,
    divergence_to_csv,
    divergence_to_svg,
    isoflop_curve,
)
from .laws import (
    LAW_IDS,
    MAX_COUNT,
    MAX_SPARSITY,
    AbnarCoeffs,
    CoefficientSet,
    ComputeBudget,
    FrantarCoeffs,
    FrantarReformCoeffs,
    GeneralizedCoeffs,
    HoffmannCoeffs,
    KaplanCoeffs,
    as_budget,
    as_flops,
    coeff_names,
    coeffs_from_doc,
    coeffs_from_json,
    coeffs_from_values,
    coeffs_to_doc,
    coeffs_to_json,
    compute_flops,
    eval_abnar,
    eval_frantar,
    eval_frantar_reform,
    eval_generalized,
    eval_hoffmann,
    eval_kaplan,
    evaluate,
    is_sparse_law,
    law_of,
    published,
    published_tables_doc,
    reformat_frantar,
    scale_coeff_names,
    sparsity_from_counts,
    sparsity_from_experts,
    values_of,
)
from .plan import (
    AllocationPlan,
    kaplan_guidance,
    optimal_allocation_dense,
    optimal_allocation_sparse,
    optimal_sparsity,
    plan_from_doc,
    plan_to_doc,
)
from .svg import render_line_chart

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "DomainError",
    "InputError",
    "ScalelawError",
    # laws
    "LAW_IDS",
    "MAX_COUNT",
    "MAX_SPARSITY",
    "AbnarCoeffs",
    "CoefficientSet",
    "ComputeBudget",
    "FrantarCoeffs",
    "FrantarReformCoeffs",
    "GeneralizedCoeffs",
    "HoffmannCoeffs",
    "KaplanCoeffs",
    "as_budget",
    "as_flops",
    "coeff_names",
    "coeffs_from_doc",
    "coeffs_from_json",
    "coeffs_from_values",
    "coeffs_to_doc",
    "coeffs_to_json",
    "compute_flops",
    "eval_abnar",
    "eval_frantar",
    "eval_frantar_reform",
    "eval_generalized",
    "eval_hoffmann",
    "eval_kaplan",
    "evaluate",
    "is_sparse_law",
    "law_of",
    "published",
    "published_tables_doc",
    "reformat_frantar",
    "scale_coeff_names",
    "sparsity_from_counts",
    "sparsity_from_experts",
    "values_of",
    # data
    "GRID_NAMES",
    "ExperimentRecord",
    "ModelScale",
    "derive_tokens_from_compute",
    "parse_records",
    "records_to_arrays",
    "reference_grid",
    "serialize_grid",
    "serialize_records",
    "synthesize_dataset",
    # fit
    "DEFAULT_OBJECTIVE",
    "FitObjectiveConfig",
    "FitResult",
    "SearchSpace",
    "SpaceAxis",
    "TraceEntry",
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
    # plan
    "AllocationPlan",
    "kaplan_guidance",
    "optimal_allocation_dense",
    "optimal_allocation_sparse",
    "optimal_sparsity",
    "plan_from_doc",
    "plan_to_doc",
    # isoflop
    "DEFAULT_SAMPLES",
    "DEFAULT_SPIKE_THRESHOLD",
    "DivergenceReport",
    "IsoflopCurve",
    "SpikeReport",
    "compare_laws",
    "curve_minimum",
    "curve_to_csv",
    "curves_to_csv",
    "curves_to_svg",
    "detect_spike",
    "divergence_to_csv",
    "divergence_to_svg",
    "isoflop_curve",
    # svg
    "render_line_chart",
]
