"""Cover-based information surrogates and box-dimension regression.

The information content of a set at precision r is taken to be the uniform
code length over its occupied r-cells, ``log2 N_r``. Conditioning on a
coarser s-cell counts only the r-cells inside it. With these definitions
additivity and precision sensitivity become exact counting identities.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

import numpy as np

from .dyadic import DyadicPoint, DyadicScalar
from .errors import MembershipError, PrecisionError, RegressionError
from .fractals import CellSet


def cell_count(cells: CellSet) -> int:
    return len(cells)


def _at(cells: CellSet, r: int | None) -> CellSet:
    if r is None:
        return cells
    if r > cells.precision:
        raise PrecisionError(f"precision {r} above the set's native precision {cells.precision}")
    return cells.coarsen(r)


def surrogate_K(cells: CellSet, r: int | None = None) -> float:
    """``log2 N_r`` in bits, coarsening from the native precision if needed."""
    n = len(_at(cells, r))
    if n == 0:
        raise ValueError("surrogate complexity of an empty set is undefined")
    return math.log2(n)


def _mantissa_at(value: DyadicScalar, s: int) -> int:
    if value.precision >= s:
        return value.mantissa >> (value.precision - s)
    return value.mantissa << (s - value.precision)


def _cell_of(x, s: int, dim: int) -> tuple[int, ...]:
    """Index of the s-cell containing ``x`` (grid point or float tuple)."""
    if isinstance(x, DyadicPoint):
        coords = (x.x, x.y)
    elif isinstance(x, DyadicScalar):
        coords = (x,)
    else:
        coords = tuple(DyadicScalar.floor(float(c), s) for c in np.atleast_1d(x))
    if len(coords) != dim:
        raise ValueError(f"point has {len(coords)} coordinates, set is {dim}-dimensional")
    return tuple(_mantissa_at(c, s) for c in coords)


def surrogate_K_cond(cells: CellSet, x, r: int, s: int) -> float:
    """Bits to name the r-cell of ``x`` given its s-cell.

    Equal to ``log2`` of the number of occupied r-cells inside the s-cell
    containing ``x``.
    """
    if s > r:
        raise PrecisionError(f"conditioning precision {s} exceeds target precision {r}")
    fine = _at(cells, r)
    key = np.asarray(_cell_of(x, s, cells.dim), dtype=np.int64)
    inside = np.all((fine.cells >> (r - s)) == key, axis=1)
    n = int(np.count_nonzero(inside))
    if n == 0:
        raise MembershipError(f"point {x!r} is not in an occupied {s}-cell of the set")
    return math.log2(n)


def conditional_counts(cells: CellSet, r: int, s: int) -> tuple[np.ndarray, np.ndarray]:
    """Occupied s-cells and the number of r-cells each one contains."""
    if s > r:
        raise PrecisionError(f"conditioning precision {s} exceeds target precision {r}")
    return _at(cells, r).parent_counts(s)


class PointComplexityEstimator(Protocol):
    """Extension point: any per-point conditional information estimate in bits."""

    def __call__(self, cells: CellSet, x, r: int, s: int) -> float: ...


def point_profile(
    cells: CellSet,
    x,
    precisions: Iterable[int],
    s: int = 0,
    estimator: PointComplexityEstimator = surrogate_K_cond,
) -> list[float]:
    return [estimator(cells, x, r, s) for r in precisions]


@dataclass(frozen=True)
class ComplexityProfile:
    """Surrogate bits ``log2 N_r`` at ascending precisions."""

    precisions: tuple[int, ...]
    counts: tuple[int, ...]
    dim: int
    s0: int | None = None

    def __post_init__(self):
        if len(self.precisions) != len(self.counts):
            raise ValueError("precisions and counts differ in length")
        if any(b <= a for a, b in zip(self.precisions, self.precisions[1:])):
            raise ValueError("precisions must be strictly ascending")
        if any(c < 1 for c in self.counts):
            raise ValueError("every precision needs at least one occupied cell")

    @property
    def bits(self) -> np.ndarray:
        return np.log2(np.asarray(self.counts, dtype=np.float64))

    def cond_bits(self) -> list[float | None]:
        """``log2(N_r / N_s0)`` per row: average bits per s0-cell; None below s0."""
        if self.s0 is None:
            return [None] * len(self.precisions)
        lookup = dict(zip(self.precisions, self.counts))
        if self.s0 not in lookup:
            raise PrecisionError(f"s0={self.s0} is not one of the profile precisions")
        base = lookup[self.s0]
        return [math.log2(c / base) if r >= self.s0 else None for r, c in zip(self.precisions, self.counts)]

    def to_csv(self, metadata: dict | None = None) -> str:
        buf = io.StringIO()
        meta = {"s0": "none" if self.s0 is None else self.s0, **(metadata or {})}
        for k, v in meta.items():
            buf.write(f"# {k}: {v}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "n_cells", "bits", "cond_bits_vs_s0"])
        for r, n, b, cb in zip(self.precisions, self.counts, self.bits, self.cond_bits()):
            w.writerow([r, n, f"{b:.12f}", "" if cb is None else f"{cb:.12f}"])
        return buf.getvalue()


def profile(cells: CellSet, precisions: Sequence[int] | None = None, s0: int | None = None) -> ComplexityProfile:
    """Cell counts of ``cells`` coarsened to each requested precision."""
    if precisions is None:
        precisions = range(cells.precision + 1)
    precisions = tuple(sorted(set(int(r) for r in precisions)))
    counts = tuple(len(_at(cells, r)) for r in precisions)
    return ComplexityProfile(precisions, counts, cells.dim, s0)


@dataclass(frozen=True)
class DimensionEstimate:
    slope: float
    stderr: float
    intercept: float
    window: tuple[int, int]
    n_scales: int
    min_step_slope: float


def dimension_estimate(prof: ComplexityProfile, window: tuple[int, int] | None = None) -> DimensionEstimate:
    """Least-squares slope of bits against precision over ``window``.

    The minimum slope between consecutive precisions in the window is
    reported as a rough stand-in for lower-limit behaviour.
    """
    r = np.asarray(prof.precisions, dtype=np.float64)
    bits = prof.bits
    lo, hi = window if window is not None else (int(r[0]), int(r[-1]))
    sel = (r >= lo) & (r <= hi)
    if np.count_nonzero(sel) < 4:
        raise RegressionError(f"window [{lo}, {hi}] holds {np.count_nonzero(sel)} scales; need at least 4")
    x, y = r[sel], bits[sel]
    n = len(x)
    xm, ym = x.mean(), y.mean()
    sxx = float(np.sum((x - xm) ** 2))
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    intercept = float(ym - slope * xm)
    resid = y - (intercept + slope * x)
    stderr = math.sqrt(max(float(np.sum(resid**2)), 0.0) / (n - 2) / sxx)
    # OLS slope is a positive combination of step slopes, each in [0, dim];
    # clipping only removes roundoff.
    slope = min(max(slope, 0.0), float(prof.dim))
    steps = np.diff(y) / np.diff(x)
    return DimensionEstimate(slope, stderr, intercept, (int(lo), int(hi)), n, float(steps.min()))
