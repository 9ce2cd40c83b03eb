"""Compute-optimal planning: best n/d split for a budget, best sparsity.

For loss shapes ``e_eff + a_eff/n**alpha + b/d**beta`` under the constraint
``C = 6*n*d``, substituting ``d = C/(6n)`` and setting the n-derivative to
zero gives the closed form

    n_opt = (a_eff*alpha / (b*beta)) ** (1/(alpha+beta)) * (C/6) ** (beta/(alpha+beta))

Additive terms that do not depend on n or d shift the curve without moving
its argmin, which is why the sparse plan only needs the effective parameter
coefficient ``a_eff = a*(1-s)**alpha + c*s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import DomainError, InputError
from .laws import (
    MAX_SPARSITY,
    ComputeBudget,
    GeneralizedCoeffs,
    HoffmannCoeffs,
    as_budget,
    evaluate,
)

__all__ = [
    "AllocationPlan",
    "kaplan_guidance",
    "optimal_allocation_dense",
    "optimal_allocation_sparse",
    "optimal_sparsity",
    "plan_from_doc",
    "plan_to_doc",
]

_METHODS = ("closed_form", "numeric")

#: Parameter/data growth exponents behind the "10x compute -> 5.5x params,
#: 1.8x data" rule of thumb; the pair sums to ~1 because 5.5 * 1.8 ~= 10.
_GUIDANCE_P = math.log(5.5) / math.log(10.0)
_GUIDANCE_Q = math.log(1.8) / math.log(10.0)


@dataclass(frozen=True)
class AllocationPlan:
    """A compute-optimal (n, d) choice for one budget and sparsity."""

    law: str
    budget: ComputeBudget
    sparsity: float
    n_opt: float
    d_opt: float
    predicted_loss: float
    method: str = "closed_form"

    def __post_init__(self) -> None:
        if self.method not in _METHODS:
            raise InputError(f"method must be one of {_METHODS}")
        for name in ("sparsity", "n_opt", "d_opt", "predicted_loss"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if not self.predicted_loss > 0:
            raise DomainError("predicted_loss must be positive")
        budget = 6.0 * self.n_opt * self.d_opt
        if not math.isclose(budget, self.budget.flops, rel_tol=1e-9):
            raise DomainError(
                f"allocation violates its budget: 6*n*d = {budget!r} but the budget is {self.budget.flops!r}"
            )


def plan_to_doc(plan: AllocationPlan) -> dict:
    """JSON-ready document for an allocation plan."""
    return {
        "law": plan.law,
        "budget_flops": plan.budget.flops,
        "sparsity": plan.sparsity,
        "n_opt": plan.n_opt,
        "d_opt": plan.d_opt,
        "predicted_loss": plan.predicted_loss,
        "method": plan.method,
    }


def plan_from_doc(doc: Mapping) -> AllocationPlan:
    """Inverse of :func:`plan_to_doc`."""
    try:
        return AllocationPlan(
            law=doc["law"],
            budget=ComputeBudget(float(doc["budget_flops"])),
            sparsity=float(doc["sparsity"]),
            n_opt=float(doc["n_opt"]),
            d_opt=float(doc["d_opt"]),
            predicted_loss=float(doc["predicted_loss"]),
            method=doc.get("method", "closed_form"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed plan document: {exc}") from None


def _closed_form(law, coeffs, budget: ComputeBudget, sparsity, a_eff, alpha, b, beta):
    c_sixth = budget.flops / 6.0
    n_opt = (a_eff * alpha / (b * beta)) ** (1.0 / (alpha + beta)) * c_sixth ** (
        beta / (alpha + beta)
    )
    d_opt = c_sixth / n_opt
    loss = float(evaluate(coeffs, n_opt, d_opt, sparsity))
    return AllocationPlan(
        law=law,
        budget=budget,
        sparsity=float(sparsity),
        n_opt=float(n_opt),
        d_opt=float(d_opt),
        predicted_loss=loss,
        method="closed_form",
    )


def optimal_allocation_dense(coeffs: HoffmannCoeffs, budget) -> AllocationPlan:
    """Loss-minimizing (n, d) for a dense model under ``6*n*d = budget``."""
    if not isinstance(coeffs, HoffmannCoeffs):
        raise InputError("dense planning expects Hoffmann-shaped coefficients")
    budget = as_budget(budget)
    return _closed_form(
        "hoffmann", coeffs, budget, 0.0, coeffs.a, coeffs.alpha, coeffs.b, coeffs.beta
    )


def optimal_allocation_sparse(coeffs: GeneralizedCoeffs, budget, sparsity: float) -> AllocationPlan:
    """Loss-minimizing (n, d) at fixed sparsity, active-parameter accounting.

    The entropy term scales with ``(1-s)**gamma`` only, so it cannot move the
    argmin; sparsity enters the allocation purely through ``a_eff``.
    """
    if not isinstance(coeffs, GeneralizedCoeffs):
        raise InputError("sparse planning expects generalized-law coefficients")
    budget = as_budget(budget)
    sparsity = float(sparsity)
    if not (math.isfinite(sparsity) and 0.0 <= sparsity <= MAX_SPARSITY):
        raise DomainError(f"sparsity must be in [0, 1); got {sparsity!r}")
    density = 1.0 - sparsity
    a_eff = coeffs.a * density**coeffs.alpha + coeffs.c * sparsity
    return _closed_form(
        "generalized", coeffs, budget, sparsity, a_eff, coeffs.alpha, coeffs.b, coeffs.beta
    )


def optimal_sparsity(
    coeffs: GeneralizedCoeffs,
    budget,
    s_grid: Sequence[float],
) -> tuple[float, AllocationPlan]:
    """Best sparsity on a grid: the plan with the lowest predicted loss.

    Ties resolve to the smallest sparsity, independent of grid order.  The
    grid stays explicit rather than continuous because the loss can be
    monotone in sparsity, which would push a continuous optimum to the open
    boundary s -> 1.
    """
    if len(s_grid) == 0:
        raise InputError("s_grid must be non-empty")
    best: tuple[float, float, AllocationPlan] | None = None
    for s in s_grid:
        plan = optimal_allocation_sparse(coeffs, budget, s)
        key = (plan.predicted_loss, plan.sparsity)
        if best is None or key < (best[0], best[1]):
            best = (plan.predicted_loss, plan.sparsity, plan)
    return best[1], best[2]


def kaplan_guidance(compute_multiplier: float) -> tuple[float, float]:
    """Rule-of-thumb growth: scale compute by ``m`` -> scale params by
    ``m**p`` and data by ``m**q`` with ``10**p = 5.5`` and ``10**q = 1.8``."""
    compute_multiplier = float(compute_multiplier)
    if not (math.isfinite(compute_multiplier) and compute_multiplier > 0):
        raise DomainError(f"compute multiplier must be positive; got {compute_multiplier!r}")
    return compute_multiplier**_GUIDANCE_P, compute_multiplier**_GUIDANCE_Q
