"""Coefficient optimizers: grid, random, model-guided search, local refinement.

All optimizers share a contract: they evaluate candidates through the same
objective a caller would, record every evaluation in an ordered trace, and
return the best candidate seen (first index wins ties).  Given identical
inputs and seed they are bit-deterministic, including under ``workers > 1``
(results are merged in candidate order; threads only parallelize batches).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import minimize

from ..data import ExperimentRecord, records_to_arrays
from ..errors import DomainError, InputError
from ..laws import (
    CoefficientSet,
    HoffmannCoeffs,
    coeff_names,
    coeffs_from_values,
    law_of,
    scale_coeff_names,
    values_of,
)
from .objective import DEFAULT_OBJECTIVE, FitObjectiveConfig, bind_objective
from .spaces import SearchSpace

__all__ = [
    "GRID_EVAL_CAP",
    "FitResult",
    "TraceEntry",
    "fit_result_from_doc",
    "fit_result_to_doc",
    "fit_sparsity_factor",
    "grid_search",
    "local_refine",
    "random_search",
    "smbo_fit",
]

#: Hard ceiling on full-grid evaluations.
GRID_EVAL_CAP = 10_000_000


@dataclass(frozen=True)
class TraceEntry:
    """One objective evaluation: candidate values in canonical order."""

    index: int
    values: tuple[float, ...]
    objective: float


@dataclass(frozen=True)
class FitResult:
    """Outcome of one optimizer run."""

    law: str
    coefficients: CoefficientSet
    objective: float
    evaluations: int
    trace: tuple[TraceEntry, ...]
    seed: int | None = None
    method: str = ""


def fit_result_to_doc(result: FitResult) -> dict:
    """JSON-ready document including the full evaluation trace."""

    def coeff_map(values):
        from ..laws import coeffs_to_doc

        return coeffs_to_doc(coeffs_from_values(result.law, values))["coefficients"]

    return {
        "law": result.law,
        "method": result.method,
        "seed": result.seed,
        "objective": result.objective,
        "evaluations": result.evaluations,
        "coefficients": coeff_map(values_of(result.coefficients)),
        "trace": [
            {"index": t.index, "objective": t.objective, "coefficients": coeff_map(t.values)}
            for t in result.trace
        ],
    }


def fit_result_from_doc(doc: Mapping) -> FitResult:
    """Inverse of :func:`fit_result_to_doc`."""
    from ..laws import coeffs_from_doc, values_of as _values

    try:
        law = doc["law"]
        coeffs = coeffs_from_doc({"law": law, "coefficients": doc["coefficients"]})
        trace = tuple(
            TraceEntry(
                index=int(t["index"]),
                values=_values(coeffs_from_doc({"law": law, "coefficients": t["coefficients"]})),
                objective=float(t["objective"]),
            )
            for t in doc.get("trace", [])
        )
        return FitResult(
            law=law,
            coefficients=coeffs,
            objective=float(doc["objective"]),
            evaluations=int(doc["evaluations"]),
            trace=trace,
            seed=doc.get("seed"),
            method=doc.get("method", ""),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed fit-result document: {exc}") from None


# ---------------------------------------------------------------------------
# shared plumbing
# ---------------------------------------------------------------------------


def _evaluate_batch(fn, candidates, workers: int) -> list[float]:
    """Evaluate candidates, preserving order; threads never change results."""
    if workers > 1 and len(candidates) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, candidates))
    return [fn(c) for c in candidates]


def _finish(law, method, seed, values_list, objectives) -> FitResult:
    trace = tuple(
        TraceEntry(index=i, values=tuple(float(x) for x in v), objective=float(o))
        for i, (v, o) in enumerate(zip(values_list, objectives))
    )
    best = min(range(len(trace)), key=lambda i: (trace[i].objective, i))
    return FitResult(
        law=law,
        coefficients=coeffs_from_values(law, trace[best].values),
        objective=trace[best].objective,
        evaluations=len(trace),
        trace=trace,
        seed=seed,
        method=method,
    )


# ---------------------------------------------------------------------------
# optimizers
# ---------------------------------------------------------------------------


def grid_search(
    space: SearchSpace,
    records: Sequence[ExperimentRecord],
    points_per_dim: int,
    *,
    config: FitObjectiveConfig = DEFAULT_OBJECTIVE,
    workers: int = 1,
) -> FitResult:
    """Exhaustive Cartesian sweep; ties resolve to the first candidate in
    row-major axis order.  Refuses combinatorial budgets above
    ``GRID_EVAL_CAP`` evaluations."""
    if points_per_dim < 2:
        raise DomainError("points_per_dim must be >= 2")
    total = points_per_dim**space.ndim
    if total > GRID_EVAL_CAP:
        raise DomainError(
            f"grid of {points_per_dim}^{space.ndim} = {total} evaluations exceeds the cap of {GRID_EVAL_CAP}"
        )
    fn = bind_objective(space.law, records, config)
    candidates = [np.array(v) for v in product(*space.grid_points(points_per_dim))]
    objectives = _evaluate_batch(fn, candidates, workers)
    return _finish(space.law, "grid", None, candidates, objectives)


def random_search(
    space: SearchSpace,
    records: Sequence[ExperimentRecord],
    budget: int,
    *,
    seed: int = 0,
    config: FitObjectiveConfig = DEFAULT_OBJECTIVE,
    workers: int = 1,
) -> FitResult:
    """Seeded uniform sampling (uniform per axis in its linear/log scale)."""
    if budget < 1:
        raise DomainError("budget must be >= 1")
    rng = np.random.default_rng(int(seed))
    unit = rng.random((budget, space.ndim))
    candidates = [space.from_unit(u) for u in unit]
    fn = bind_objective(space.law, records, config)
    objectives = _evaluate_batch(fn, candidates, workers)
    return _finish(space.law, "random", int(seed), candidates, objectives)


# Model-guided search internals: pool sizes and the explore weight of the
# acquisition score.  Chosen empirically against seeded random search.
_SMBO_POOL_UNIFORM = 48
_SMBO_POOL_LOCAL = 48
_SMBO_KAPPA = 0.7


def _idw_predict(pool: np.ndarray, hist_z: np.ndarray, hist_g: np.ndarray):
    """Inverse-squared-distance interpolation plus nearest-neighbor distance."""
    d2 = np.maximum(((pool[:, None, :] - hist_z[None, :, :]) ** 2).sum(axis=2), 1e-300)
    w = 1.0 / (d2 + 1e-12)
    mu = (w * hist_g[None, :]).sum(axis=1) / w.sum(axis=1)
    dmin = np.sqrt(d2.min(axis=1))
    return mu, dmin


def smbo_fit(
    space: SearchSpace,
    records: Sequence[ExperimentRecord],
    budget: int,
    *,
    init_samples: int = 16,
    seed: int = 0,
    config: FitObjectiveConfig = DEFAULT_OBJECTIVE,
    workers: int = 1,
) -> FitResult:
    """Sequential model-based optimization over the unit-cube image of the space.

    Starts from a seeded initial design — the space's default point (the
    published baseline, when the axes carry defaults) plus uniform draws —
    then repeatedly fits a smooth inverse-distance surrogate to everything
    evaluated so far and picks the pool candidate with the best
    explore/exploit acquisition score (predicted objective minus a distance
    bonus).  If every observed objective is identical the surrogate is
    degenerate and that iteration falls back to a uniform random draw.
    Deterministic for a given seed.
    """
    init_samples = int(init_samples)
    budget = int(budget)
    if init_samples < 2:
        raise DomainError("init_samples must be >= 2")
    if budget <= init_samples:
        raise DomainError("budget must exceed init_samples")
    rng = np.random.default_rng(int(seed))
    ndim = space.ndim
    fn = bind_objective(space.law, records, config)

    # Initial design: the space's default point first — evaluated at its
    # exact coordinates, not through the unit-cube round trip — then seeded
    # uniform draws.  When axes carry published defaults this makes the
    # baseline configuration part of every run.
    defaults = space.default_values()
    if defaults is not None:
        first_unit = space.to_unit(defaults)
        first_candidate = np.array(defaults, dtype=float)
    else:
        first_unit = np.full(ndim, 0.5)
        first_candidate = space.from_unit(first_unit)
    unit_hist = [first_unit] + list(rng.random((init_samples - 1, ndim)))
    candidates = [first_candidate] + [space.from_unit(z) for z in unit_hist[1:]]
    objectives = _evaluate_batch(fn, candidates, workers)

    while len(objectives) < budget:
        ys = np.array(objectives)
        if np.all(ys == ys[0]):
            z_next = rng.random(ndim)  # degenerate surrogate: plain exploration
        else:
            progress = (len(objectives) - init_samples) / max(budget - init_samples, 1)
            sigma = max(0.02, 0.5 * (1.0 - progress))
            best_z = unit_hist[int(np.argmin(ys))]
            pool = np.vstack(
                [
                    rng.random((_SMBO_POOL_UNIFORM, ndim)),
                    np.clip(
                        best_z + rng.normal(0.0, sigma, (_SMBO_POOL_LOCAL, ndim)), 0.0, 1.0
                    ),
                ]
            )
            hist_z = np.vstack(unit_hist)
            finite = np.isfinite(ys)
            g = np.log(np.where(finite, ys, np.nanmax(np.where(finite, ys, np.nan)) * 10 + 1) + 1e-12)
            mu, dmin = _idw_predict(pool, hist_z, g)
            spread = float(g.std()) or 1.0
            score = (mu - g.mean()) / spread - _SMBO_KAPPA * dmin / (float(dmin.mean()) + 1e-12)
            z_next = pool[int(np.argmin(score))]
        unit_hist.append(z_next)
        candidates.append(space.from_unit(z_next))
        objectives.append(fn(candidates[-1]))

    return _finish(space.law, "smbo", int(seed), candidates, objectives)


# ---------------------------------------------------------------------------
# local refinement
# ---------------------------------------------------------------------------


def local_refine(
    start: CoefficientSet,
    records: Sequence[ExperimentRecord],
    *,
    max_iters: int = 2000,
    tolerance: float = 1e-10,
    config: FitObjectiveConfig = DEFAULT_OBJECTIVE,
) -> FitResult:
    """Derivative-free simplex descent from ``start``.

    Scale-constant coefficients are optimized in log coordinates so the
    simplex is well conditioned across decades.  The simplex stops when its
    diameter drops below ``tolerance`` or the iteration budget is spent, and
    restarts from the incumbent while iterations remain and progress is being
    made.  ``max_iters = 0`` returns ``start`` unchanged.  The result is
    never worse than ``start``.
    """
    if max_iters < 0:
        raise DomainError("max_iters must be >= 0")
    if not tolerance > 0:
        raise DomainError("tolerance must be positive")
    law = law_of(start)
    fn = bind_objective(law, records, config)
    names = coeff_names(law)
    start_values = np.array(values_of(start))
    # log-transform multiplicative coefficients (when positive at the start)
    take_log = np.array(
        [name in scale_coeff_names(law) and v > 0 for name, v in zip(names, start_values)]
    )
    def to_z(v):
        return np.where(take_log, np.log(np.where(take_log, v, 1.0)), v)

    def from_z(z):
        return np.where(take_log, np.exp(z), z)

    # The untransformed start anchors the trace, so the result is bitwise
    # `start` when nothing improves on it (and always when max_iters == 0).
    trace_values: list[np.ndarray] = [start_values]
    trace_objectives: list[float] = [fn(start_values)]

    def fz(z):
        v = from_z(np.asarray(z))
        o = fn(v)
        trace_values.append(v)
        trace_objectives.append(o)
        return o

    if max_iters == 0:
        return _finish(law, "refine", None, trace_values, trace_objectives)

    z = to_z(start_values)
    best_obj = math.inf
    remaining = int(max_iters)
    while remaining > 0:
        res = minimize(
            fz,
            z,
            method="Nelder-Mead",
            options={"maxiter": remaining, "xatol": tolerance, "fatol": np.inf},
        )
        remaining -= max(int(res.nit), 1)
        improved = res.fun < best_obj and (
            not math.isfinite(best_obj) or best_obj - res.fun > 1e-15 * max(abs(best_obj), 1.0)
        )
        if res.fun < best_obj:
            best_obj = float(res.fun)
            z = np.asarray(res.x)
        if not improved:
            break
    return _finish(law, "refine", None, trace_values, trace_objectives)


# ---------------------------------------------------------------------------
# sparsity-factor fit
# ---------------------------------------------------------------------------


def fit_sparsity_factor(
    records: Sequence[ExperimentRecord],
    base: HoffmannCoeffs,
    gamma: float,
) -> float:
    """Least-squares sparse-term weight ``c`` for the generalized law.

    Holds the dense coefficients ``e, a, b, alpha, beta`` and the entropy
    exponent ``gamma`` fixed; the generalized prediction is then linear in
    ``c`` (its term is ``c * s / n**alpha``), so the loss-space least-squares
    minimizer has the closed form ``c = sum(t*r) / sum(t*t)`` with
    ``t = s/n**alpha`` and ``r`` the residual of the c-free prediction.
    Every record must be sparse: dense rows carry no information about ``c``.
    """
    if not isinstance(base, HoffmannCoeffs):
        raise InputError("base must be Hoffmann-shaped dense coefficients")
    gamma = float(gamma)
    if not math.isfinite(gamma) or gamma <= 0:
        raise DomainError("gamma must be positive and finite")
    n, d, s, loss = records_to_arrays(records)
    if np.any(s <= 0.0):
        raise DomainError("fit_sparsity_factor requires every record to have sparsity > 0")
    density = 1.0 - s
    base_pred = (
        base.e * density**gamma
        + (base.a * density**base.alpha) / n**base.alpha
        + base.b / d**base.beta
    )
    t = s / n**base.alpha
    return float(np.sum(t * (loss - base_pred)) / np.sum(t * t))
