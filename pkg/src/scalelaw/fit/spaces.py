"""Coefficient search spaces for fitting.

A :class:`SearchSpace` gives every coefficient of one law a bounded axis,
either linear or logarithmic.  The default space for a law brackets each
published coefficient by a factor of ten on both sides — log axes for scale
constants, linear axes for exponents — and records the published value as the
axis *default*, which optimizers may use as a baseline starting point.

JSON schema (the law id travels separately)::

    {"<coefficient>": {"lower": ..., "upper": ..., "scale": "log", "default": ...}}

``scale`` defaults to ``"linear"`` and ``default`` is optional.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from ..errors import InputError
from ..laws import coeff_names, published, scale_coeff_names, values_of

__all__ = ["SpaceAxis", "SearchSpace", "default_search_space", "space_from_doc", "space_from_json", "space_to_doc"]

_SCALES = ("linear", "log")


@dataclass(frozen=True)
class SpaceAxis:
    """Bounds for one coefficient."""

    name: str
    lower: float
    upper: float
    scale: str = "linear"
    default: float | None = None

    def __post_init__(self) -> None:
        if self.scale not in _SCALES:
            raise InputError(f"axis '{self.name}': scale must be one of {_SCALES}")
        for attr in ("lower", "upper"):
            v = getattr(self, attr)
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
                raise InputError(f"axis '{self.name}': {attr} must be a finite number")
            object.__setattr__(self, attr, float(v))
        if not self.lower < self.upper:
            raise InputError(f"axis '{self.name}': lower must be < upper")
        if self.scale == "log" and self.lower <= 0:
            raise InputError(f"axis '{self.name}': log axes need positive bounds")
        if self.default is not None:
            d = float(self.default)
            if not math.isfinite(d) or not self.lower <= d <= self.upper:
                raise InputError(f"axis '{self.name}': default must lie within the bounds")
            object.__setattr__(self, "default", d)


@dataclass(frozen=True)
class SearchSpace:
    """Axes for every coefficient of one law, in canonical order."""

    law: str
    axes: tuple[SpaceAxis, ...]

    def __post_init__(self) -> None:
        names = coeff_names(self.law)
        by_name = {}
        for axis in self.axes:
            if axis.name not in names:
                raise InputError(f"law '{self.law}' has no coefficient '{axis.name}'")
            if axis.name in by_name:
                raise InputError(f"duplicate axis '{axis.name}'")
            by_name[axis.name] = axis
        missing = [n for n in names if n not in by_name]
        if missing:
            raise InputError(f"search space for '{self.law}' missing axes: {', '.join(missing)}")
        object.__setattr__(self, "axes", tuple(by_name[n] for n in names))

    @property
    def ndim(self) -> int:
        return len(self.axes)

    def default_values(self) -> tuple[float, ...] | None:
        """Per-axis defaults in canonical order, or None if any is unset."""
        if any(a.default is None for a in self.axes):
            return None
        return tuple(a.default for a in self.axes)

    # -- unit-cube mapping (log axes flattened) ----------------------------

    def _bounds(self):
        lo = np.array([math.log(a.lower) if a.scale == "log" else a.lower for a in self.axes])
        hi = np.array([math.log(a.upper) if a.scale == "log" else a.upper for a in self.axes])
        return lo, hi

    def from_unit(self, u: np.ndarray) -> np.ndarray:
        """Map unit-cube coordinates to coefficient values (row-wise)."""
        u = np.asarray(u, dtype=float)
        lo, hi = self._bounds()
        x = lo + u * (hi - lo)
        is_log = np.array([a.scale == "log" for a in self.axes])
        return np.where(is_log, np.exp(x), x)

    def to_unit(self, values) -> np.ndarray:
        """Inverse of :meth:`from_unit` (values clipped into the bounds)."""
        v = np.asarray(values, dtype=float)
        is_log = np.array([a.scale == "log" for a in self.axes])
        lo, hi = self._bounds()
        x = np.where(is_log, np.log(np.maximum(v, np.finfo(float).tiny)), v)
        return np.clip((x - lo) / (hi - lo), 0.0, 1.0)

    def grid_points(self, points_per_dim: int) -> list[np.ndarray]:
        """Per-axis grids: linear or geometric spacing, bounds included."""
        pts = []
        for a in self.axes:
            if a.scale == "log":
                pts.append(np.geomspace(a.lower, a.upper, points_per_dim))
            else:
                pts.append(np.linspace(a.lower, a.upper, points_per_dim))
        return pts


def default_search_space(law: str) -> SearchSpace:
    """Ten-fold bracket around each published coefficient of ``law``."""
    log_fields = scale_coeff_names(law)
    axes = []
    for name, value in zip(coeff_names(law), values_of(published(law))):
        lo, hi = sorted((value / 10.0, value * 10.0))
        scale = "log" if name in log_fields else "linear"
        axes.append(SpaceAxis(name=name, lower=lo, upper=hi, scale=scale, default=value))
    return SearchSpace(law=law, axes=tuple(axes))


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def space_to_doc(space: SearchSpace) -> dict:
    doc = {}
    for a in space.axes:
        entry = {"lower": a.lower, "upper": a.upper, "scale": a.scale}
        if a.default is not None:
            entry["default"] = a.default
        doc[a.name] = entry
    return doc


def space_from_doc(law: str, doc: Mapping) -> SearchSpace:
    if not isinstance(doc, Mapping):
        raise InputError("search-space document must be a JSON object")
    axes = []
    for name, spec in doc.items():
        if not isinstance(spec, Mapping):
            raise InputError(f"axis '{name}' must be an object with lower/upper")
        unknown = set(spec) - {"lower", "upper", "scale", "default"}
        if unknown:
            raise InputError(f"axis '{name}': unknown keys {sorted(unknown)}")
        try:
            axes.append(
                SpaceAxis(
                    name=name,
                    lower=spec["lower"],
                    upper=spec["upper"],
                    scale=spec.get("scale", "linear"),
                    default=spec.get("default"),
                )
            )
        except KeyError as exc:
            raise InputError(f"axis '{name}' missing key {exc}") from None
    return SearchSpace(law=law, axes=tuple(axes))


def space_from_json(law: str, text: str) -> SearchSpace:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None
    return space_from_doc(law, doc)
