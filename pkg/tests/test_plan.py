"""Compute-optimal allocation plans and the params/data growth guidance."""

import math

import pytest

from scalelaw import (
    AllocationPlan,
    ComputeBudget,
    DomainError,
    HoffmannCoeffs,
    InputError,
    evaluate,
    kaplan_guidance,
    optimal_allocation_dense,
    optimal_allocation_sparse,
    optimal_sparsity,
    plan_from_doc,
    plan_to_doc,
    published,
)

HOffMANN = published("hoffmann")
GENERALIZED = published("generalized")


def test_plan_satisfies_budget_exactly():
    for c in (1e18, 1e20, 3.7e22, 1e24):
        plan = optimal_allocation_dense(HOffMANN, c)
        assert math.isclose(6.0 * plan.n_opt * plan.d_opt, c, rel_tol=1e-9)
        assert plan.budget.flops == c
        assert plan.method == "closed_form" and plan.law == "hoffmann"
        assert plan.sparsity == 0.0


def test_doubling_compute_scales_n_by_known_exponent():
    a = optimal_allocation_dense(HOffMANN, 1e20)
    b = optimal_allocation_dense(HOffMANN, 2e20)
    expo = HOffMANN.beta / (HOffMANN.alpha + HOffMANN.beta)
    assert b.n_opt / a.n_opt == pytest.approx(2.0**expo, rel=1e-12)
    assert b.d_opt / a.d_opt == pytest.approx(2.0 ** (1.0 - expo), rel=1e-12)


def test_symmetric_coefficients_give_square_allocation():
    # with a == b and alpha == beta the optimum splits the budget evenly
    coeffs = HoffmannCoeffs(e=1.69, a=400.0, b=400.0, alpha=0.3, beta=0.3)
    plan = optimal_allocation_dense(coeffs, 6e20)
    assert plan.n_opt == pytest.approx(math.sqrt(1e20), rel=1e-12)
    assert plan.d_opt == pytest.approx(plan.n_opt, rel=1e-12)


def test_allocation_is_a_local_minimum():
    for c in (1e19, 1e21, 1e23):
        plan = optimal_allocation_dense(HOffMANN, c)
        for k in (0.5, 0.9, 1.1, 2.0):
            n = plan.n_opt * k
            d = c / (6.0 * n)
            assert float(evaluate(HOffMANN, n, d)) > plan.predicted_loss


def test_sparse_allocation_is_a_local_minimum():
    for s in (0.0, 0.5, 0.9, 0.98):
        plan = optimal_allocation_sparse(GENERALIZED, 1e21, s)
        for k in (0.5, 0.9, 1.1, 2.0):
            n = plan.n_opt * k
            d = 1e21 / (6.0 * n)
            assert float(evaluate(GENERALIZED, n, d, s)) > plan.predicted_loss


def test_sparse_plan_at_zero_sparsity_matches_dense():
    dense = optimal_allocation_dense(HOffMANN, 5e20)
    sparse = optimal_allocation_sparse(GENERALIZED, 5e20, 0.0)
    assert sparse.n_opt == pytest.approx(dense.n_opt, rel=1e-12)
    assert sparse.d_opt == pytest.approx(dense.d_opt, rel=1e-12)
    assert sparse.predicted_loss == pytest.approx(dense.predicted_loss, rel=1e-12)


def test_predicted_loss_decreases_with_compute_and_sparsity():
    losses_c = [optimal_allocation_dense(HOffMANN, c).predicted_loss for c in (1e18, 1e20, 1e22, 1e24)]
    assert losses_c == sorted(losses_c, reverse=True)
    losses_s = [optimal_allocation_sparse(GENERALIZED, 1e21, s).predicted_loss for s in (0.0, 0.5, 0.9, 0.98)]
    assert losses_s == sorted(losses_s, reverse=True)


def test_sparser_models_get_fewer_active_parameters():
    # a_eff = a*(1-s)**alpha + c*s shrinks with sparsity for these
    # coefficients, shifting the optimum toward tokens: each remaining active
    # parameter buys more loss reduction, so fewer of them are needed
    n_opts = [optimal_allocation_sparse(GENERALIZED, 1e21, s).n_opt for s in (0.0, 0.5, 0.9, 0.98)]
    assert n_opts == sorted(n_opts, reverse=True)


def test_optimal_sparsity_picks_lowest_loss():
    grid = (0.0, 0.5, 0.9, 0.98)
    s_best, plan = optimal_sparsity(GENERALIZED, 1e21, grid)
    assert s_best == 0.98 and plan.sparsity == 0.98
    assert plan.predicted_loss == min(
        optimal_allocation_sparse(GENERALIZED, 1e21, s).predicted_loss for s in grid
    )
    # grid order does not matter
    assert optimal_sparsity(GENERALIZED, 1e21, tuple(reversed(grid)))[0] == 0.98
    # singleton grid
    assert optimal_sparsity(GENERALIZED, 1e21, (0.5,))[0] == 0.5
    # duplicates tie; the tie resolves to that sparsity's single plan
    assert optimal_sparsity(GENERALIZED, 1e21, (0.5, 0.5))[0] == 0.5
    with pytest.raises(InputError, match="non-empty"):
        optimal_sparsity(GENERALIZED, 1e21, ())


def test_kaplan_guidance_anchor_values():
    p, q = kaplan_guidance(10.0)
    assert p == pytest.approx(5.5, abs=1e-9)
    assert q == pytest.approx(1.8, abs=1e-9)
    assert kaplan_guidance(1.0) == (1.0, 1.0)
    p2, q2 = kaplan_guidance(100.0)
    assert p2 == pytest.approx(5.5**2, rel=1e-12)
    assert q2 == pytest.approx(1.8**2, rel=1e-12)
    # multiplicativity: guidance(ab) = guidance(a) * guidance(b)
    a1, b1 = kaplan_guidance(3.0)
    a2, b2 = kaplan_guidance(7.0)
    a3, b3 = kaplan_guidance(21.0)
    assert a3 == pytest.approx(a1 * a2, rel=1e-12)
    assert b3 == pytest.approx(b1 * b2, rel=1e-12)


def test_kaplan_guidance_validation():
    with pytest.raises(DomainError):
        kaplan_guidance(0.0)
    with pytest.raises(DomainError):
        kaplan_guidance(-2.0)
    with pytest.raises(DomainError):
        kaplan_guidance(float("inf"))


def test_planning_validation():
    with pytest.raises(InputError, match="Hoffmann-shaped"):
        optimal_allocation_dense(GENERALIZED, 1e20)
    with pytest.raises(InputError, match="generalized-law"):
        optimal_allocation_sparse(HOffMANN, 1e20, 0.5)
    with pytest.raises(DomainError, match=r"sparsity must be in \[0, 1\)"):
        optimal_allocation_sparse(GENERALIZED, 1e20, 1.0)
    with pytest.raises(DomainError):
        optimal_allocation_dense(HOffMANN, 0.0)
    with pytest.raises(DomainError):
        optimal_allocation_dense(HOffMANN, -1e20)


def test_plan_doc_round_trip():
    plan = optimal_allocation_sparse(GENERALIZED, 2.5e21, 0.75)
    doc = plan_to_doc(plan)
    assert doc == {
        "law": "generalized",
        "budget_flops": 2.5e21,
        "sparsity": 0.75,
        "n_opt": plan.n_opt,
        "d_opt": plan.d_opt,
        "predicted_loss": plan.predicted_loss,
        "method": "closed_form",
    }
    assert plan_from_doc(doc) == plan
    with pytest.raises(InputError, match="malformed plan"):
        plan_from_doc({"law": "generalized"})


def test_allocation_plan_validation():
    budget = ComputeBudget(6e20)
    with pytest.raises(InputError, match="method"):
        AllocationPlan("hoffmann", budget, 0.0, 1e10, 1e10, 2.0, method="oracle")
    with pytest.raises(DomainError, match="violates its budget"):
        AllocationPlan("hoffmann", budget, 0.0, 1e10, 2e10, 2.0)
    with pytest.raises(DomainError, match="predicted_loss"):
        AllocationPlan("hoffmann", budget, 0.0, 1e10, 1e10, -2.0)
