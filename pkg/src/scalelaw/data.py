"""Experiment records, CSV ingestion, reference grids and synthetic datasets.

The on-disk format is a headed CSV::

    n_active,d_tokens,sparsity,loss[,compute][,source]

Counts are written in scientific notation with enough digits to round-trip
exactly.  ``compute``, when present, must agree with ``6 * n * d`` within 1%.
Counts above ``2**53`` are rejected at parse time: they no longer round-trip
through doubles.

Three reference grids reconstruct the published experimental designs from
their stated ranges (log-uniform interpolation; the original point sets are
not published):

* ``hoffmann9`` — 9 log-spaced (n, d) pairs in [400e6, 10e12] x [8e9, 216.2e9].
* ``frantar48`` — full cross product of 4 log-spaced parameter counts in
  [1.3e6, 85e6], 3 log-spaced token counts in [16e9, 65e9] and sparsities
  {0, 0.5, 0.75, 0.875}.
* ``abnar35`` — 5 log-spaced compute budgets x 7 sparsities
  {0, 0.25, 0.5, 0.75, 0.9, 0.95, 0.98} with n, d log-interpolated inside
  [329e6, 21.2e9] x [15e9, 128e9] subject to ``C = 6 * n * d``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import IO, Iterable, Sequence, Union

import numpy as np

from .errors import DomainError, InputError
from .laws import (
    MAX_COUNT,
    MAX_SPARSITY,
    CoefficientSet,
    compute_flops,
    evaluate,
    law_of,
)

__all__ = [
    "GRID_NAMES",
    "ExperimentRecord",
    "ModelScale",
    "ReferenceGrid",
    "derive_tokens_from_compute",
    "parse_records",
    "records_to_arrays",
    "reference_grid",
    "serialize_grid",
    "serialize_records",
    "synthesize_dataset",
]

#: Tolerated relative disagreement between a stored compute value and 6*n*d.
COMPUTE_CONSISTENCY_RTOL = 0.01


@dataclass(frozen=True)
class ModelScale:
    """A model/training-run size: active parameters, tokens, sparsity."""

    n_active: float
    d_tokens: float
    sparsity: float = 0.0

    def __post_init__(self) -> None:
        for name in ("n_active", "d_tokens", "sparsity"):
            v = getattr(self, name)
            if not isinstance(v, (int, float)) or isinstance(v, bool):
                raise DomainError(f"{name} must be a number")
            object.__setattr__(self, name, float(v))
        for name in ("n_active", "d_tokens"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 1.0:
                raise DomainError(f"{name} must be >= 1")
            if v > MAX_COUNT:
                raise DomainError(f"{name} above 2**53 is out of range")
        if not np.isfinite(self.sparsity) or not 0.0 <= self.sparsity <= MAX_SPARSITY:
            raise DomainError("sparsity out of [0, 1)")

    @property
    def total_params(self) -> float:
        """Total (zero plus nonzero) parameter count implied by sparsity."""
        return self.n_active / (1.0 - self.sparsity)

    @property
    def flops(self) -> float:
        """Training compute ``6 * n * d`` for this scale."""
        return compute_flops(self.n_active, self.d_tokens)


@dataclass(frozen=True)
class ExperimentRecord:
    """One observed (or synthesized) training run with its final loss."""

    scale: ModelScale
    loss: float
    compute: float | None = None
    source: str = ""

    def __post_init__(self) -> None:
        if not isinstance(self.loss, (int, float)) or isinstance(self.loss, bool):
            raise DomainError("loss must be a number")
        object.__setattr__(self, "loss", float(self.loss))
        if not np.isfinite(self.loss) or self.loss <= 0:
            raise DomainError("loss must be positive and finite")
        if self.compute is not None:
            c = float(self.compute)
            if not np.isfinite(c) or c <= 0:
                raise DomainError("compute must be positive and finite")
            expected = self.scale.flops
            if abs(c - expected) > COMPUTE_CONSISTENCY_RTOL * c:
                raise DomainError(
                    f"compute {c:g} disagrees with 6*n*d = {expected:g} by more than 1%"
                )
            object.__setattr__(self, "compute", c)
        if not isinstance(self.source, str):
            raise DomainError("source must be a string")


def derive_tokens_from_compute(flops: float, n_active: float) -> float:
    """Tokens implied by a budget at a given active-parameter count, ``C/(6n)``.

    Exact inverse of :func:`scalelaw.laws.compute_flops` to within 1 ulp.
    """
    c = float(flops)
    if not np.isfinite(c) or c <= 0:
        raise DomainError("compute budget must be positive and finite")
    n = float(n_active)
    if not np.isfinite(n) or n < 1.0 or n > MAX_COUNT:
        raise DomainError("n_active must be in [1, 2**53]")
    return c / (6.0 * n)


# ---------------------------------------------------------------------------
# CSV records
# ---------------------------------------------------------------------------

_REQUIRED_COLUMNS = ("n_active", "d_tokens", "sparsity", "loss")
_OPTIONAL_COLUMNS = ("compute", "source")


def _check_header(header: Sequence[str]) -> list[str]:
    cols = [c.strip() for c in header]
    if tuple(cols[: len(_REQUIRED_COLUMNS)]) != _REQUIRED_COLUMNS:
        raise InputError(
            "line 1: header must start with "
            + ",".join(_REQUIRED_COLUMNS)
            + f"; got {','.join(cols) or '(empty)'}"
        )
    tail = cols[len(_REQUIRED_COLUMNS) :]
    allowed = [c for c in _OPTIONAL_COLUMNS]
    for col in tail:
        if col not in allowed:
            raise InputError(f"line 1: unexpected column '{col}'")
        # enforce compute-before-source order and uniqueness
        allowed = allowed[allowed.index(col) + 1 :]
    return cols


def _cell_float(row_no: int, column: str, cell: str) -> float:
    try:
        return float(cell)
    except ValueError:
        raise InputError(f"line {row_no}: column '{column}': not a number: {cell!r}") from None


def parse_records(source: Union[str, bytes, IO[str]]) -> list[ExperimentRecord]:
    """Parse experiment records from CSV text or a text stream."""
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        source = io.StringIO(source)
    reader = csv.reader(source)
    try:
        header = next(reader)
    except StopIteration:
        raise InputError("line 1: empty input; expected a CSV header") from None
    cols = _check_header(header)
    records: list[ExperimentRecord] = []
    for row_no, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue  # ignore blank lines
        if len(row) != len(cols):
            raise InputError(f"line {row_no}: expected {len(cols)} cells, got {len(row)}")
        cells = dict(zip(cols, row))
        compute_cell = cells.get("compute", "").strip()
        try:
            scale = ModelScale(
                n_active=_cell_float(row_no, "n_active", cells["n_active"]),
                d_tokens=_cell_float(row_no, "d_tokens", cells["d_tokens"]),
                sparsity=_cell_float(row_no, "sparsity", cells["sparsity"]),
            )
            record = ExperimentRecord(
                scale=scale,
                loss=_cell_float(row_no, "loss", cells["loss"]),
                compute=_cell_float(row_no, "compute", compute_cell) if compute_cell else None,
                source=cells.get("source", ""),
            )
        except DomainError as exc:
            raise InputError(f"line {row_no}: {exc}") from None
        records.append(record)
    return records


def _sci(x: float) -> str:
    """Shortest scientific-notation literal that round-trips through float()."""
    return np.format_float_scientific(x, unique=True, trim="-")


def serialize_records(records: Iterable[ExperimentRecord]) -> str:
    """Serialize records to CSV; ``parse_records`` recovers them exactly."""
    records = list(records)
    with_compute = any(r.compute is not None for r in records)
    with_source = any(r.source for r in records)
    cols = list(_REQUIRED_COLUMNS)
    if with_compute:
        cols.append("compute")
    if with_source:
        cols.append("source")
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(cols)
    for r in records:
        row = [_sci(r.scale.n_active), _sci(r.scale.d_tokens), repr(r.scale.sparsity), repr(r.loss)]
        if with_compute:
            row.append(_sci(r.compute) if r.compute is not None else "")
        if with_source:
            row.append(r.source)
        writer.writerow(row)
    return out.getvalue()


# ---------------------------------------------------------------------------
# reference grids
# ---------------------------------------------------------------------------

GRID_NAMES = ("hoffmann9", "frantar48", "abnar35")


@dataclass(frozen=True)
class ReferenceGrid:
    """A named, deterministic set of model scales."""

    source: str
    scales: tuple[ModelScale, ...]

    def __len__(self) -> int:
        return len(self.scales)

    def __iter__(self):
        return iter(self.scales)


def _log_spaced(lo: float, hi: float, count: int) -> np.ndarray:
    # geomspace pins both endpoints exactly to the published range bounds
    return np.geomspace(lo, hi, count)


def _hoffmann9() -> tuple[ModelScale, ...]:
    ns = _log_spaced(400e6, 10e12, 9)
    ds = _log_spaced(8e9, 216.2e9, 9)
    return tuple(ModelScale(n, d, 0.0) for n, d in zip(ns, ds))


def _frantar48() -> tuple[ModelScale, ...]:
    ns = _log_spaced(1.3e6, 85e6, 4)
    ds = _log_spaced(16e9, 65e9, 3)
    sparsities = (0.0, 0.5, 0.75, 0.875)
    return tuple(
        ModelScale(n, d, s) for n in ns for d in ds for s in sparsities
    )


_ABNAR_SPARSITIES = (0.0, 0.25, 0.5, 0.75, 0.9, 0.95, 0.98)
_ABNAR_N = (329e6, 21.2e9)
_ABNAR_D = (15e9, 128e9)


def _abnar35() -> tuple[ModelScale, ...]:
    budgets = _log_spaced(6.0 * _ABNAR_N[0] * _ABNAR_D[0], 6.0 * _ABNAR_N[1] * _ABNAR_D[1], 5)
    scales = []
    for c in budgets:
        # Feasible active-parameter interval for this budget given the
        # published n and d ranges; the 7 sparsity rows sweep it log-uniformly.
        n_lo = max(_ABNAR_N[0], c / (6.0 * _ABNAR_D[1]))
        n_hi = min(_ABNAR_N[1], c / (6.0 * _ABNAR_D[0]))
        ns = _log_spaced(n_lo, n_hi, len(_ABNAR_SPARSITIES))
        for n, s in zip(ns, _ABNAR_SPARSITIES):
            scales.append(ModelScale(n, derive_tokens_from_compute(c, n), s))
    return tuple(scales)


_GRID_BUILDERS = {"hoffmann9": _hoffmann9, "frantar48": _frantar48, "abnar35": _abnar35}


def reference_grid(name: str) -> ReferenceGrid:
    """Build one of the named reference grids."""
    try:
        builder = _GRID_BUILDERS[name]
    except KeyError:
        raise InputError(f"unknown grid '{name}'; expected one of {', '.join(GRID_NAMES)}") from None
    return ReferenceGrid(source=name, scales=builder())


def serialize_grid(grid: ReferenceGrid) -> str:
    """Export a grid as record CSV with the loss column left empty."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([*_REQUIRED_COLUMNS, "source"])
    for scale in grid.scales:
        writer.writerow(
            [_sci(scale.n_active), _sci(scale.d_tokens), repr(scale.sparsity), "", grid.source]
        )
    return out.getvalue()


# ---------------------------------------------------------------------------
# synthetic datasets
# ---------------------------------------------------------------------------


def synthesize_dataset(
    coeffs: CoefficientSet,
    grid: Union[ReferenceGrid, Sequence[ModelScale]],
    noise_rel: float = 0.0,
    seed: int = 0,
) -> list[ExperimentRecord]:
    """Generate records ``loss = law(scale) * (1 + eps)`` over a grid.

    ``eps`` is zero-mean Gaussian with standard deviation ``noise_rel``,
    truncated (by redraw) to ``[-3*noise_rel, 3*noise_rel]``.  Deterministic
    for a given seed.  With ``noise_rel = 0`` the generating coefficients are
    an exact fixed point of fitting: they reproduce every loss bit-for-bit.
    """
    if not 0.0 <= float(noise_rel) < 1.0 / 3.0:
        raise DomainError("noise_rel must be in [0, 1/3) so losses stay positive")
    law = law_of(coeffs)
    scales = list(grid.scales if isinstance(grid, ReferenceGrid) else grid)
    if not scales:
        raise DomainError("grid must contain at least one scale")
    grid_name = grid.source if isinstance(grid, ReferenceGrid) else "custom"
    tag = f"synthetic/{law}/{grid_name}/seed={int(seed)}"
    rng = np.random.default_rng(int(seed))
    eps = np.zeros(len(scales))
    if noise_rel > 0:
        eps = rng.normal(0.0, noise_rel, size=len(scales))
        bad = np.abs(eps) > 3.0 * noise_rel
        while bad.any():
            eps[bad] = rng.normal(0.0, noise_rel, size=int(bad.sum()))
            bad = np.abs(eps) > 3.0 * noise_rel
    records = []
    for scale, e in zip(scales, eps):
        loss = evaluate(coeffs, scale.n_active, scale.d_tokens, scale.sparsity) * (1.0 + e)
        records.append(
            ExperimentRecord(scale=scale, loss=loss, compute=scale.flops, source=tag)
        )
    return records


def records_to_arrays(records: Sequence[ExperimentRecord]):
    """Column arrays ``(n, d, s, loss)`` for vectorized evaluation."""
    if not records:
        raise DomainError("records must be non-empty")
    n = np.array([r.scale.n_active for r in records])
    d = np.array([r.scale.d_tokens for r in records])
    s = np.array([r.scale.sparsity for r in records])
    loss = np.array([r.loss for r in records])
    return n, d, s, loss
