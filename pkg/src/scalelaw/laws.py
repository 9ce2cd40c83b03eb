"""Parametric training-loss laws for dense and sparse language models.

Each law maps a model scale — nonzero (active) parameter count ``n``,
training tokens ``d`` and optional parameter sparsity ``s`` — to a predicted
pretraining loss.  Six published coefficient sets ship with the package:

=================  ======  =====================================================
law id             inputs  functional form
=================  ======  =====================================================
``kaplan``         n, d    ``[(n_c/n)**(alpha_n/alpha_d) + d_c/d]**alpha_d``
``hoffmann``       n, d    ``e + a/n**alpha + b/d**beta``
``frantar``        n, d, s ``(a_s*(1-s)**b_s + c_s)*(1/n)**b_n + (a_d/d)**b_d + c``
``frantar_reform`` n, d, s ``e + (a_s*(1-s)**b_s + c_s)/n**alpha + b/d**beta``
``abnar``          n, d, s ``e + a/n**alpha + b/d**beta + c/(1-s)**lambda
                           + d_coef/((1-s)**delta * n**gamma)``
``generalized``    n, d, s ``e*(1-s)**gamma + (a*(1-s)**alpha + c*s)/n**alpha
                           + b/d**beta``
=================  ======  =====================================================

Sparsity is the fraction of zero (inactive) parameters,
``s = (total - active) / total``; dense models have ``s = 0`` and ``s = 1``
is rejected because a model's active parameters cannot be zero.  The
``generalized`` law degenerates exactly to ``hoffmann`` at ``s = 0`` when the
shared coefficients agree.

Training compute is accounted as ``C = 6 * n * d`` FLOPs, with ``n`` the
*nonzero* parameter count throughout.

All evaluators accept scalars or numpy arrays (broadcast together) and are
deterministic: identical inputs produce bit-identical outputs.  Published
coefficients are written as exact decimal literals and never re-derived.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from typing import Callable, Mapping, Union

import numpy as np

from .errors import DomainError, InputError

__all__ = [
    "LAW_IDS",
    "MAX_COUNT",
    "MAX_SPARSITY",
    "ComputeBudget",
    "KaplanCoeffs",
    "HoffmannCoeffs",
    "FrantarCoeffs",
    "FrantarReformCoeffs",
    "AbnarCoeffs",
    "GeneralizedCoeffs",
    "CoefficientSet",
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
]

#: Largest parameter/token count handled; counts above 2**53 lose integer
#: precision in doubles and are rejected.
MAX_COUNT = float(2**53)

#: Largest admissible sparsity; s = 1 (no active parameters) is rejected.
MAX_SPARSITY = 1.0 - 1e-9

ArrayLike = Union[float, int, np.ndarray]


# ---------------------------------------------------------------------------
# coefficient sets
# ---------------------------------------------------------------------------


def _require_finite(obj) -> None:
    for f in fields(obj):
        v = getattr(obj, f.name)
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            raise DomainError(f"coefficient '{f.name}' must be a finite number, got {v!r}")
        object.__setattr__(obj, f.name, float(v))


@dataclass(frozen=True)
class KaplanCoeffs:
    """Dense law with a coupled parameter/data deficit raised to ``alpha_d``."""

    alpha_n: float
    alpha_d: float
    n_c: float
    d_c: float

    def __post_init__(self) -> None:
        _require_finite(self)


@dataclass(frozen=True)
class HoffmannCoeffs:
    """Dense law: irreducible loss plus separable parameter and data terms."""

    e: float
    a: float
    b: float
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        _require_finite(self)


@dataclass(frozen=True)
class FrantarCoeffs:
    """Sparse law with a sparsity-dependent capacity multiplier.

    The multiplier ``a_s*(1-s)**b_s + c_s`` scales the parameter term and is
    bounded below by ``c_s``, so even fully sparse models keep a capacity
    penalty floor.
    """

    a_s: float
    b_s: float
    c_s: float
    b_n: float
    a_d: float
    b_d: float
    c: float

    def __post_init__(self) -> None:
        _require_finite(self)


@dataclass(frozen=True)
class FrantarReformCoeffs:
    """`frantar` regrouped into irreducible-loss-plus-power-terms shape.

    Same curve family, written so the data term carries a single weight
    ``b = a_d**b_d`` and the exponents are named like ``hoffmann``'s.
    """

    a_s: float
    b_s: float
    c_s: float
    b: float
    alpha: float
    beta: float
    e: float

    def __post_init__(self) -> None:
        _require_finite(self)


@dataclass(frozen=True)
class AbnarCoeffs:
    """Sparse law with additive sparsity terms.

    ``d_coef`` weights the joint sparsity-parameter interaction term (named
    ``d_coef`` rather than ``d`` to avoid colliding with the token count
    argument).  ``lambda_`` may be negative; its published value is.
    """

    e: float
    a: float
    b: float
    c: float
    d_coef: float
    alpha: float
    beta: float
    lambda_: float
    delta: float
    gamma: float

    def __post_init__(self) -> None:
        _require_finite(self)


@dataclass(frozen=True)
class GeneralizedCoeffs:
    """Sparse generalization of ``hoffmann``.

    Sparsity discounts the irreducible loss through ``e*(1-s)**gamma`` and
    blends the parameter-term weight between the dense ``a`` and the sparse
    contribution ``c*s``.  At ``s = 0`` the law is exactly ``hoffmann`` with
    the shared coefficients.
    """

    e: float
    a: float
    b: float
    c: float
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self) -> None:
        _require_finite(self)


CoefficientSet = Union[
    KaplanCoeffs,
    HoffmannCoeffs,
    FrantarCoeffs,
    FrantarReformCoeffs,
    AbnarCoeffs,
    GeneralizedCoeffs,
]


# ---------------------------------------------------------------------------
# input validation
# ---------------------------------------------------------------------------


def _prepare(law: str, sparse: bool, n: ArrayLike, d: ArrayLike, s: ArrayLike):
    """Validate and broadcast evaluator inputs; return arrays plus scalar flag."""
    n = np.asarray(n, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    scalar = n.ndim == 0 and d.ndim == 0 and s.ndim == 0
    for name, x in (("n_active", n), ("d_tokens", d)):
        if not np.all(np.isfinite(x)):
            raise DomainError(f"{name} must be finite")
        if np.any(x < 1.0):
            raise DomainError(f"{name} must be >= 1")
        if np.any(x > MAX_COUNT):
            raise DomainError(f"{name} above 2**53 is out of range")
    if not np.all(np.isfinite(s)):
        raise DomainError("sparsity must be finite")
    if np.any((s < 0.0) | (s > MAX_SPARSITY)):
        raise DomainError("sparsity out of [0, 1)")
    if not sparse and np.any(s != 0.0):
        raise DomainError(f"law '{law}' is dense; sparsity must be 0")
    return n, d, s, scalar


def _out(x: np.ndarray, scalar: bool):
    return float(x) if scalar else x


# ---------------------------------------------------------------------------
# evaluators
# ---------------------------------------------------------------------------


def eval_kaplan(coeffs: KaplanCoeffs, n: ArrayLike, d: ArrayLike, s: ArrayLike = 0.0):
    """Loss under the coupled-deficit dense law."""
    n, d, s, scalar = _prepare("kaplan", False, n, d, s)
    inner = (coeffs.n_c / n) ** (coeffs.alpha_n / coeffs.alpha_d) + coeffs.d_c / d
    return _out(inner**coeffs.alpha_d, scalar)


def eval_hoffmann(coeffs: HoffmannCoeffs, n: ArrayLike, d: ArrayLike, s: ArrayLike = 0.0):
    """Loss under the separable dense law."""
    n, d, s, scalar = _prepare("hoffmann", False, n, d, s)
    return _out(coeffs.e + coeffs.a / n**coeffs.alpha + coeffs.b / d**coeffs.beta, scalar)


def eval_frantar(coeffs: FrantarCoeffs, n: ArrayLike, d: ArrayLike, s: ArrayLike = 0.0):
    """Loss under the multiplicative-capacity sparse law."""
    n, d, s, scalar = _prepare("frantar", True, n, d, s)
    capacity = coeffs.a_s * (1.0 - s) ** coeffs.b_s + coeffs.c_s
    loss = capacity * (1.0 / n) ** coeffs.b_n + (coeffs.a_d / d) ** coeffs.b_d + coeffs.c
    return _out(loss, scalar)


def eval_frantar_reform(
    coeffs: FrantarReformCoeffs, n: ArrayLike, d: ArrayLike, s: ArrayLike = 0.0
):
    """Loss under the regrouped multiplicative-capacity sparse law."""
    n, d, s, scalar = _prepare("frantar_reform", True, n, d, s)
    capacity = coeffs.a_s * (1.0 - s) ** coeffs.b_s + coeffs.c_s
    loss = coeffs.e + capacity / n**coeffs.alpha + coeffs.b / d**coeffs.beta
    return _out(loss, scalar)


def eval_abnar(coeffs: AbnarCoeffs, n: ArrayLike, d: ArrayLike, s: ArrayLike = 0.0):
    """Loss under the additive-sparsity law."""
    n, d, s, scalar = _prepare("abnar", True, n, d, s)
    density = 1.0 - s
    loss = (
        coeffs.e
        + coeffs.a / n**coeffs.alpha
        + coeffs.b / d**coeffs.beta
        + coeffs.c / density**coeffs.lambda_
        + coeffs.d_coef / (density**coeffs.delta * n**coeffs.gamma)
    )
    return _out(loss, scalar)


def eval_generalized(
    coeffs: GeneralizedCoeffs, n: ArrayLike, d: ArrayLike, s: ArrayLike = 0.0
):
    """Loss under the generalized dense+sparse law.

    Written so that at ``s = 0`` every sub-expression reduces to the
    corresponding ``hoffmann`` sub-expression bit-for-bit.
    """
    n, d, s, scalar = _prepare("generalized", True, n, d, s)
    density = 1.0 - s
    loss = (
        coeffs.e * density**coeffs.gamma
        + (coeffs.a * density**coeffs.alpha + coeffs.c * s) / n**coeffs.alpha
        + coeffs.b / d**coeffs.beta
    )
    return _out(loss, scalar)


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _LawInfo:
    law: str
    coeffs_cls: type
    evaluator: Callable
    sparse: bool
    published: CoefficientSet
    # Coefficients that live on a multiplicative scale (search spaces use a
    # log axis for these); the rest are exponents and use linear axes.
    scale_fields: frozenset


_LAWS: dict[str, _LawInfo] = {}


def _register(info: _LawInfo) -> None:
    _LAWS[info.law] = info


_register(
    _LawInfo(
        law="kaplan",
        coeffs_cls=KaplanCoeffs,
        evaluator=eval_kaplan,
        sparse=False,
        published=KaplanCoeffs(alpha_n=0.076, alpha_d=0.103, n_c=6.4e13, d_c=1.8e13),
        scale_fields=frozenset({"n_c", "d_c"}),
    )
)
_register(
    _LawInfo(
        law="hoffmann",
        coeffs_cls=HoffmannCoeffs,
        evaluator=eval_hoffmann,
        sparse=False,
        published=HoffmannCoeffs(e=1.69, a=406.4, b=410.7, alpha=0.34, beta=0.28),
        scale_fields=frozenset({"e", "a", "b"}),
    )
)
_register(
    _LawInfo(
        law="frantar",
        coeffs_cls=FrantarCoeffs,
        evaluator=eval_frantar,
        sparse=True,
        published=FrantarCoeffs(
            a_s=16.8, b_s=0.722, c_s=45.0, b_n=0.245, a_d=6.90e8, b_d=0.203, c=0.651
        ),
        scale_fields=frozenset({"a_s", "c_s", "a_d", "c"}),
    )
)
_register(
    _LawInfo(
        law="frantar_reform",
        coeffs_cls=FrantarReformCoeffs,
        evaluator=eval_frantar_reform,
        sparse=True,
        published=FrantarReformCoeffs(
            a_s=16.8, b_s=0.722, c_s=45.0, b=62.271, alpha=0.245, beta=0.203, e=0.651
        ),
        scale_fields=frozenset({"a_s", "c_s", "b", "e"}),
    )
)
_register(
    _LawInfo(
        law="abnar",
        coeffs_cls=AbnarCoeffs,
        evaluator=eval_abnar,
        sparse=True,
        published=AbnarCoeffs(
            e=0.94,
            a=16612.50,
            b=5455.67,
            c=0.4598,
            d_coef=17.26,
            alpha=0.5962,
            beta=0.3954,
            lambda_=-0.1666,
            delta=0.1603,
            gamma=0.1595,
        ),
        scale_fields=frozenset({"e", "a", "b", "c", "d_coef"}),
    )
)
_register(
    _LawInfo(
        law="generalized",
        coeffs_cls=GeneralizedCoeffs,
        evaluator=eval_generalized,
        sparse=True,
        published=GeneralizedCoeffs(
            e=1.69, a=406.4, b=410.7, c=93.45, alpha=0.34, beta=0.28, gamma=1e-2
        ),
        scale_fields=frozenset({"e", "a", "b", "c"}),
    )
)

LAW_IDS: tuple[str, ...] = tuple(_LAWS)

_CLS_TO_LAW = {info.coeffs_cls: law for law, info in _LAWS.items()}


def _info(law: str) -> _LawInfo:
    try:
        return _LAWS[law]
    except KeyError:
        raise InputError(f"unknown law '{law}'; expected one of {', '.join(LAW_IDS)}") from None


def is_sparse_law(law: str) -> bool:
    """True when the law models sparsity (accepts s > 0)."""
    return _info(law).sparse


def law_of(coeffs: CoefficientSet) -> str:
    """Law id for a coefficient set."""
    try:
        return _CLS_TO_LAW[type(coeffs)]
    except KeyError:
        raise InputError(f"not a coefficient set: {type(coeffs).__name__}") from None


def published(law: str) -> CoefficientSet:
    """The published coefficient set for ``law``."""
    return _info(law).published


def coeff_names(law: str) -> tuple[str, ...]:
    """Canonical coefficient order for ``law``."""
    return tuple(f.name for f in fields(_info(law).coeffs_cls))


def scale_coeff_names(law: str) -> frozenset:
    """Coefficients of ``law`` that live on a multiplicative scale."""
    return _info(law).scale_fields


def values_of(coeffs: CoefficientSet) -> tuple[float, ...]:
    """Coefficient values in canonical order."""
    return tuple(getattr(coeffs, f.name) for f in fields(coeffs))


def coeffs_from_values(law: str, values) -> CoefficientSet:
    """Build a coefficient set from values in canonical order."""
    names = coeff_names(law)
    values = tuple(float(v) for v in values)
    if len(values) != len(names):
        raise InputError(f"law '{law}' takes {len(names)} coefficients, got {len(values)}")
    return _info(law).coeffs_cls(*values)


def evaluate(coeffs: CoefficientSet, n: ArrayLike, d: ArrayLike, s: ArrayLike = 0.0):
    """Evaluate any law by its coefficient set.  Scalars in, scalar out."""
    return _info(law_of(coeffs)).evaluator(coeffs, n, d, s)


def reformat_frantar(coeffs: FrantarCoeffs) -> FrantarReformCoeffs:
    """Regroup ``frantar`` coefficients into the ``frantar_reform`` shape.

    The mapping is exact up to floating point: ``c -> e``, ``b_n -> alpha``,
    ``b_d -> beta`` and the derived data weight ``b = a_d**b_d``; the
    capacity multiplier coefficients carry over unchanged.
    """
    return FrantarReformCoeffs(
        a_s=coeffs.a_s,
        b_s=coeffs.b_s,
        c_s=coeffs.c_s,
        b=coeffs.a_d**coeffs.b_d,
        alpha=coeffs.b_n,
        beta=coeffs.b_d,
        e=coeffs.c,
    )


# ---------------------------------------------------------------------------
# sparsity and compute accounting
# ---------------------------------------------------------------------------


def sparsity_from_counts(total_params: float, active_params: float) -> float:
    """Sparsity ``(total - active) / total`` from parameter counts."""
    total = float(total_params)
    active = float(active_params)
    if not math.isfinite(total) or total <= 0:
        raise DomainError("total_params must be positive and finite")
    if not math.isfinite(active) or active <= 0:
        raise DomainError("active_params must be positive; a model cannot have zero active parameters")
    if active > total:
        raise DomainError("active_params cannot exceed total_params")
    s = (total - active) / total
    if s > MAX_SPARSITY:
        raise DomainError("sparsity out of [0, 1)")
    return s


def sparsity_from_experts(total_experts: int, active_experts: int) -> float:
    """Mixture-of-experts sparsity ``(E - K) / E`` for K-of-E routing."""
    e = int(total_experts)
    k = int(active_experts)
    if e < 1 or k < 1:
        raise DomainError("expert counts must be >= 1")
    if k > e:
        raise DomainError("active experts cannot exceed total experts")
    return (e - k) / e


@dataclass(frozen=True)
class ComputeBudget:
    """A training compute budget in FLOPs."""

    flops: float

    def __post_init__(self) -> None:
        if not isinstance(self.flops, (int, float)) or isinstance(self.flops, bool):
            raise DomainError("compute budget must be a number")
        object.__setattr__(self, "flops", float(self.flops))
        if not math.isfinite(self.flops) or self.flops <= 0:
            raise DomainError("compute budget must be positive and finite")


def as_flops(budget) -> float:
    """Coerce a ``ComputeBudget`` or bare number to validated FLOPs."""
    if isinstance(budget, ComputeBudget):
        return budget.flops
    return ComputeBudget(budget).flops


def as_budget(budget) -> "ComputeBudget":
    """Coerce a bare number to a ``ComputeBudget`` (validating it)."""
    if isinstance(budget, ComputeBudget):
        return budget
    return ComputeBudget(float(budget))


def compute_flops(n_active: ArrayLike, d_tokens: ArrayLike):
    """Training FLOPs ``6 * n * d`` with ``n`` the nonzero parameter count."""
    n, d, _, scalar = _prepare("compute", True, n_active, d_tokens, 0.0)
    return _out((6.0 * n) * d, scalar)


# ---------------------------------------------------------------------------
# JSON serialization
# ---------------------------------------------------------------------------


def _json_name(field_name: str) -> str:
    return "lambda" if field_name == "lambda_" else field_name


def _field_name(json_name: str) -> str:
    return "lambda_" if json_name == "lambda" else json_name


def _validate_strict(coeffs: CoefficientSet) -> None:
    """Structural checks applied at the JSON boundary.

    Scale constants and exponents must be positive, with the one documented
    exception: ``abnar``'s ``lambda_`` may be negative (its published value
    is) but must be nonzero.
    """
    law = law_of(coeffs)
    for name in coeff_names(law):
        v = getattr(coeffs, name)
        if name == "lambda_":
            if v == 0:
                raise DomainError("coefficient 'lambda' must be nonzero")
            continue
        if v <= 0:
            raise DomainError(f"coefficient '{_json_name(name)}' must be positive")


def coeffs_to_doc(coeffs: CoefficientSet) -> dict:
    """Plain-dict document: ``{"law": id, "coefficients": {name: value}}``."""
    law = law_of(coeffs)
    return {
        "law": law,
        "coefficients": {_json_name(name): getattr(coeffs, name) for name in coeff_names(law)},
    }


def coeffs_from_doc(doc: Mapping) -> CoefficientSet:
    """Parse a coefficient document produced by :func:`coeffs_to_doc`."""
    if not isinstance(doc, Mapping):
        raise InputError("coefficient document must be a JSON object")
    try:
        law = doc["law"]
        raw = doc["coefficients"]
    except KeyError as exc:
        raise InputError(f"coefficient document missing key {exc}") from None
    info = _info(law)
    if not isinstance(raw, Mapping):
        raise InputError("'coefficients' must be an object of name: value pairs")
    expected = coeff_names(law)
    got = {_field_name(k) for k in raw}
    missing = [n for n in expected if n not in got]
    extra = sorted(got - set(expected))
    if missing:
        raise InputError(f"law '{law}' missing coefficients: {', '.join(_json_name(m) for m in missing)}")
    if extra:
        raise InputError(f"law '{law}' has unknown coefficients: {', '.join(_json_name(x) for x in extra)}")
    kwargs = {}
    for key, value in raw.items():
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise InputError(f"coefficient '{key}' must be a number, got {value!r}")
        kwargs[_field_name(key)] = float(value)
    try:
        coeffs = info.coeffs_cls(**kwargs)
        _validate_strict(coeffs)
    except DomainError as exc:
        raise InputError(str(exc)) from None
    return coeffs


def coeffs_to_json(coeffs: CoefficientSet) -> str:
    """Serialize a coefficient set to a JSON string."""
    return json.dumps(coeffs_to_doc(coeffs), indent=2)


def coeffs_from_json(text: str) -> CoefficientSet:
    """Parse a coefficient set from a JSON string."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None
    return coeffs_from_doc(doc)


def published_tables_doc() -> dict:
    """All published coefficient sets keyed by law id (the `tables` dump)."""
    return {law: coeffs_to_doc(info.published) for law, info in _LAWS.items()}
