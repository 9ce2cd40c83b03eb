"""Constant-compute curves: construction, minima, spikes, and law divergence.

An IsoFLOP curve holds the budget fixed and sweeps model size: every sample
obeys ``6 * n * d = C`` exactly, so more parameters always means fewer
tokens.  The interesting structure is where the minimum sits and whether the
small-n end of the curve rises into a spike.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data import ModelScale, _sci
from .errors import DomainError, InputError
from .laws import CoefficientSet, ComputeBudget, as_budget, evaluate, law_of
from .svg import render_line_chart

__all__ = [
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
]

DEFAULT_SAMPLES = 256
DEFAULT_SPIKE_THRESHOLD = 0.05

#: Default sweep half-width around sqrt(C/6) (four decades each way) and the
#: hard clip applied afterwards.
_RANGE_FACTOR = 1e4
_N_CLIP_LO = 1e6
_N_CLIP_HI = 1e13


@dataclass(frozen=True)
class IsoflopCurve:
    """Loss along one constant-compute sweep, ordered by increasing n."""

    law: str
    budget: ComputeBudget
    sparsity: float
    n: tuple[float, ...]
    d: tuple[float, ...]
    loss: tuple[float, ...]

    def __post_init__(self) -> None:
        if not (len(self.n) == len(self.d) == len(self.loss)):
            raise InputError("n, d, and loss must have equal lengths")
        if len(self.n) < 2:
            raise DomainError("a curve needs at least 2 samples")
        if any(b >= a for a, b in zip(self.n[1:], self.n)):
            raise DomainError("n must be strictly increasing")
        c = self.budget.flops
        for n, d in zip(self.n, self.d):
            if not math.isclose(6.0 * n * d, c, rel_tol=1e-9):
                raise DomainError(
                    f"sample n={n!r}, d={d!r} violates the budget constraint 6*n*d = {c!r}"
                )

    def __len__(self) -> int:
        return len(self.n)

    @property
    def samples(self) -> tuple[tuple[float, float, float], ...]:
        """The curve as (n, d, loss) triples."""
        return tuple(zip(self.n, self.d, self.loss))


def _default_range(flops: float) -> tuple[float, float]:
    center = math.sqrt(flops / 6.0)
    lo = max(center / _RANGE_FACTOR, _N_CLIP_LO)
    hi = min(center * _RANGE_FACTOR, _N_CLIP_HI)
    if not lo < hi:
        raise DomainError(
            f"budget {flops!r} leaves no room for the default parameter range; pass n_min/n_max"
        )
    return lo, hi


def isoflop_curve(
    coeffs: CoefficientSet,
    budget,
    sparsity: float = 0.0,
    *,
    n_min: float | None = None,
    n_max: float | None = None,
    samples: int = DEFAULT_SAMPLES,
) -> IsoflopCurve:
    """Sample a law along ``6*n*d = budget`` at log-spaced parameter counts.

    The default sweep covers four decades either side of ``sqrt(C/6)`` — the
    region any optimum of a two-term power law falls in — clipped to
    [1e6, 1e13].
    """
    budget = as_budget(budget)
    if samples < 2:
        raise DomainError("samples must be >= 2")
    if (n_min is None) != (n_max is None):
        raise InputError("pass both n_min and n_max, or neither")
    if n_min is None:
        n_min, n_max = _default_range(budget.flops)
    if not n_min < n_max:
        raise DomainError(f"n_min must be below n_max; got {n_min!r} >= {n_max!r}")
    n = np.geomspace(n_min, n_max, int(samples))
    d = budget.flops / (6.0 * n)
    loss = evaluate(coeffs, n, d, np.full_like(n, float(sparsity)))
    return IsoflopCurve(
        law=law_of(coeffs),
        budget=budget,
        sparsity=float(sparsity),
        n=tuple(float(v) for v in n),
        d=tuple(float(v) for v in d),
        loss=tuple(float(v) for v in loss),
    )


def curve_minimum(curve: IsoflopCurve) -> tuple[float, float, float]:
    """The (n, d, loss) sample with the smallest loss; ties -> smallest n."""
    idx = int(np.argmin(curve.loss))
    return curve.n[idx], curve.d[idx], curve.loss[idx]


@dataclass(frozen=True)
class SpikeReport:
    """Outcome of spike detection on one curve."""

    spiky: bool
    rise: float


def detect_spike(curve: IsoflopCurve, rise_threshold: float = DEFAULT_SPIKE_THRESHOLD) -> SpikeReport:
    """Classify the small-n end of a curve as a spike.

    ``rise`` is the relative height of the first sample above the curve
    minimum.  The curve is spiky when that rise exceeds the threshold, the
    minimum is interior (a genuine valley, not an endpoint), and the first
    sample is the curve's global maximum — i.e. the curve peaks at small n
    rather than at the large-n end every U-shaped sweep has.
    """
    if not rise_threshold > 0:
        raise DomainError("rise_threshold must be positive")
    loss = np.asarray(curve.loss)
    idx = int(np.argmin(loss))
    loss_star = float(loss[idx])
    rise = (float(loss[0]) - loss_star) / loss_star
    interior = 0 < idx < len(loss) - 1
    left_is_peak = float(loss[0]) >= float(loss.max())
    return SpikeReport(spiky=bool(rise > rise_threshold and interior and left_is_peak), rise=rise)


@dataclass(frozen=True)
class DivergenceReport:
    """Pointwise gap between two laws over a common grid."""

    law_a: str
    law_b: str
    scales: tuple[ModelScale, ...]
    loss_a: tuple[float, ...]
    loss_b: tuple[float, ...]
    diffs: tuple[float, ...]
    max_abs_diff: float
    argmax: ModelScale


def compare_laws(
    coeffs_a: CoefficientSet,
    coeffs_b: CoefficientSet,
    grid: Sequence[ModelScale],
) -> DivergenceReport:
    """Evaluate two laws on the same scales and report |L_a - L_b|.

    ``max_abs_diff`` is symmetric in the arguments; evaluation domain errors
    (e.g. a dense law asked about sparse scales) propagate.
    """
    if len(grid) == 0:
        raise InputError("grid must be non-empty")
    n = np.array([s.n_active for s in grid])
    d = np.array([s.d_tokens for s in grid])
    s = np.array([s.sparsity for s in grid])
    loss_a = np.asarray(evaluate(coeffs_a, n, d, s))
    loss_b = np.asarray(evaluate(coeffs_b, n, d, s))
    diffs = np.abs(loss_a - loss_b)
    idx = int(np.argmax(diffs))
    return DivergenceReport(
        law_a=law_of(coeffs_a),
        law_b=law_of(coeffs_b),
        scales=tuple(grid),
        loss_a=tuple(float(v) for v in loss_a),
        loss_b=tuple(float(v) for v in loss_b),
        diffs=tuple(float(v) for v in diffs),
        max_abs_diff=float(diffs[idx]),
        argmax=grid[idx],
    )


# ---------------------------------------------------------------------------
# exports
# ---------------------------------------------------------------------------


def curve_to_csv(curve: IsoflopCurve) -> str:
    """One curve as CSV with columns n, d, loss."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["n", "d", "loss"])
    for n, d, loss in curve.samples:
        writer.writerow([_sci(n), _sci(d), repr(loss)])
    return out.getvalue()


def curves_to_csv(curves: Sequence[IsoflopCurve]) -> str:
    """Several curves in one CSV, tagged by a leading sparsity column."""
    if len(curves) == 0:
        raise InputError("at least one curve is required")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["sparsity", "n", "d", "loss"])
    for curve in curves:
        for n, d, loss in curve.samples:
            writer.writerow([repr(curve.sparsity), _sci(n), _sci(d), repr(loss)])
    return out.getvalue()


def divergence_to_csv(report: DivergenceReport) -> str:
    """Per-point divergence as CSV with columns n, d, loss_a, loss_b, diff."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["n", "d", "loss_a", "loss_b", "diff"])
    for scale, la, lb, diff in zip(report.scales, report.loss_a, report.loss_b, report.diffs):
        writer.writerow([_sci(scale.n_active), _sci(scale.d_tokens), repr(la), repr(lb), repr(diff)])
    return out.getvalue()


def curves_to_svg(curves: Sequence[IsoflopCurve]) -> str:
    """Loss-versus-n chart (log x) with one line per curve."""
    if len(curves) == 0:
        raise InputError("at least one curve is required")
    series = [(f"s={c.sparsity:g}", c.n, c.loss) for c in curves]
    budget = curves[0].budget.flops
    return render_line_chart(
        series,
        title=f"{curves[0].law} @ C={budget:g}",
        x_label="active parameters",
        y_label="loss",
        log_x=True,
    )


def divergence_to_svg(report: DivergenceReport) -> str:
    """Both laws' losses against n (log x) over the comparison grid."""
    n = [s.n_active for s in report.scales]
    return render_line_chart(
        [(report.law_a, n, report.loss_a), (report.law_b, n, report.loss_b)],
        title=f"{report.law_a} vs {report.law_b}",
        x_label="active parameters",
        y_label="loss",
        log_x=True,
    )
