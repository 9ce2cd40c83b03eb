"""Fit objectives: how far a coefficient set is from a set of records."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..data import ExperimentRecord, records_to_arrays
from ..errors import InputError
from ..laws import CoefficientSet, coeffs_from_values, evaluate

__all__ = ["DEFAULT_OBJECTIVE", "FitObjectiveConfig", "bind_objective", "objective"]

_METRICS = ("mse", "huber", "log_mse")
_SPACES = ("loss", "log_loss")


@dataclass(frozen=True)
class FitObjectiveConfig:
    """Residual metric and the space it is computed in.

    The default — mean squared error between log-losses — weighs relative
    errors evenly across the decades a loss sweep spans.  ``log_mse`` forces
    log-space residuals regardless of ``space``; ``huber`` grows linearly
    beyond ``huber_delta``.
    """

    metric: str = "mse"
    space: str = "log_loss"
    huber_delta: float = 1.0

    def __post_init__(self) -> None:
        if self.metric not in _METRICS:
            raise InputError(f"metric must be one of {_METRICS}")
        if self.space not in _SPACES:
            raise InputError(f"space must be one of {_SPACES}")
        if not self.huber_delta > 0:
            raise InputError("huber_delta must be positive")


DEFAULT_OBJECTIVE = FitObjectiveConfig()


def _score(pred: np.ndarray, loss: np.ndarray, log_loss: np.ndarray, config: FitObjectiveConfig) -> float:
    """Aggregate residuals; +inf for candidates outside the valid region."""
    if not np.all(np.isfinite(pred)):
        return float("inf")
    if config.space == "log_loss" or config.metric == "log_mse":
        if np.any(pred <= 0.0):
            return float("inf")
        resid = np.log(pred) - log_loss
    else:
        resid = pred - loss
    if config.metric == "huber":
        delta = config.huber_delta
        a = np.abs(resid)
        per = np.where(a <= delta, 0.5 * a * a, delta * (a - 0.5 * delta))
        return float(np.mean(per))
    return float(np.mean(resid * resid))


def objective(
    coeffs: CoefficientSet,
    records: Sequence[ExperimentRecord],
    config: FitObjectiveConfig = DEFAULT_OBJECTIVE,
) -> float:
    """Mean residual metric of ``coeffs`` over ``records``.

    Zero exactly when every prediction matches its observation; ``+inf`` when
    the candidate produces non-finite predictions (or non-positive ones in a
    log-space metric), so optimizers rank such candidates last.
    """
    n, d, s, loss = records_to_arrays(records)
    with np.errstate(all="ignore"):  # wild candidates may overflow; scored +inf
        pred = evaluate(coeffs, n, d, s)
    return _score(np.asarray(pred), loss, np.log(loss), config)


def bind_objective(
    law: str,
    records: Sequence[ExperimentRecord],
    config: FitObjectiveConfig = DEFAULT_OBJECTIVE,
) -> Callable[[Sequence[float]], float]:
    """Precompute record arrays; return values-vector -> objective.

    The returned callable takes coefficient values in canonical order and is
    what the optimizers drive; it matches :func:`objective` bit-for-bit.
    """
    n, d, s, loss = records_to_arrays(records)
    log_loss = np.log(loss)

    def fn(values) -> float:
        coeffs = coeffs_from_values(law, values)
        with np.errstate(all="ignore"):  # wild candidates may overflow; scored +inf
            pred = evaluate(coeffs, n, d, s)
        return _score(np.asarray(pred), loss, log_loss, config)

    return fn
