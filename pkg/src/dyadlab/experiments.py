"""Composed studies: pinned-distance bound curves, empirical distance and
projection dimension sweeps, half-information comparisons and a stress
driver for the selection lemma.

The empirical studies are HEURISTIC. They estimate box-counting dimensions
of finite-precision images of generated sets; they illustrate the bounds
and cannot confirm or refute statements about Hausdorff dimension or
suprema over all points.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from . import __version__
from .complexity import ComplexityProfile, DimensionEstimate, dimension_estimate
from .dyadic import Direction, DyadicPoint
from .errors import DomainError, RegressionError
from .fractals import CellSet, FractalSpec, generate, sample_points
from .geometry import pinned_distance_cells, projection_cells
from .selection import (
    SelectionInstance,
    count_witnesses,
    exceeds_threshold,
    exhaustive_instances,
    find_pair,
    random_instance,
    verify_hypotheses,
)

HEURISTIC_NOTE = (
    "HEURISTIC: box-counting estimates at finite precision; illustrates, does not verify, "
    "Hausdorff-dimension statements"
)

# ---------------------------------------------------------------------------
# bound curves


@dataclass(frozen=True)
class BoundCurvePoint:
    s: float
    ours: float
    sw: float
    fs: float


def three_quarters_bound(s: float) -> float:
    return 0.75 * s


def sw_bound(s: float) -> float:
    return (s - 2.0 + math.sqrt(4.0 + s * s)) / 2.0


def fs_bound(s: float) -> float:
    return s * (1.0 - (2.0 - s) / (2.0 * (1.0 + 2.0 * s - s * s)))


def bound_curves(grid: Iterable[float]) -> list[BoundCurvePoint]:
    """Three lower bounds on the best pinned distance dimension, for ``s`` in (0, 1]."""
    out = []
    for s in grid:
        s = float(s)
        if not 0.0 < s <= 1.0:
            raise DomainError(f"s must lie in (0, 1], got {s}")
        out.append(BoundCurvePoint(s, three_quarters_bound(s), sw_bound(s), fs_bound(s)))
    return out


def fig1_grid(samples: int) -> list[float]:
    """``k / samples`` for ``k = 1 .. samples``."""
    if samples < 1:
        raise ValueError("need at least one sample")
    return [k / samples for k in range(1, samples + 1)]


def strictly_dominates(points: Sequence[BoundCurvePoint]) -> bool:
    """Whether 3s/4 beats both earlier bounds at every grid point with s < 1."""
    return all(p.ours > max(p.sw, p.fs) for p in points if p.s < 1.0)


def bound_crossover(lo: float = 0.3, hi: float = 0.7, tol: float = 1e-12) -> float:
    """The ``s`` where the two earlier bounds coincide, by bisection."""
    def gap(s):
        return sw_bound(s) - fs_bound(s)

    glo = gap(lo)
    if glo * gap(hi) > 0:
        raise ValueError(f"no sign change of the bound gap on [{lo}, {hi}]")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        gm = gap(mid)
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# reports and CSV


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def csv_text(columns: Sequence[str], rows: Iterable[Sequence], metadata: dict | None = None) -> str:
    """CSV with ``#``-prefixed metadata lines before the header."""
    buf = io.StringIO()
    for k, v in (metadata or {}).items():
        buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def fig1_csv(points: Sequence[BoundCurvePoint], metadata: dict | None = None) -> str:
    meta = {"version": __version__, "rows": len(points), "dominance": strictly_dominates(points)}
    meta.update(metadata or {})
    return csv_text(["s", "ours", "sw", "fs"], ((p.s, p.ours, p.sw, p.fs) for p in points), meta)


@dataclass
class ExperimentReport:
    """Rows of per-pin or per-direction estimates plus summary values."""

    kind: str
    spec: dict
    columns: tuple[str, ...]
    rows: list[tuple]
    summary: dict = field(default_factory=dict)
    heuristic: bool = True

    def metadata(self) -> dict:
        meta = {}
        if self.heuristic:
            meta["label"] = HEURISTIC_NOTE
        meta["version"] = __version__
        meta.update({f"spec.{k}": v for k, v in self.spec.items()})
        meta.update({f"summary.{k}": _fmt(v) for k, v in self.summary.items() if not isinstance(v, (list, tuple))})
        return meta

    def to_csv(self) -> str:
        return csv_text(self.columns, self.rows, self.metadata())


def _resolve_source(source, r_max: int | None) -> tuple[CellSet, dict, float | None]:
    if isinstance(source, FractalSpec):
        if r_max is None:
            raise ValueError("r_max is required when generating from a FractalSpec")
        cells = generate(source, r_max)
        echo = {
            "kind": source.kind,
            "base_exp": source.base_exp,
            "digits": ",".join(map(str, source.digits)),
            "digits_y": ",".join(map(str, source.digits_y)) if source.digits_y else "",
            "target_dim": source.dim if source.dim is not None else "",
            "seed": source.seed,
            "r_max": r_max,
        }
        return cells, echo, source.declared_dimension
    if isinstance(source, CellSet):
        if r_max is not None and r_max < source.precision:
            source = source.coarsen(r_max)
        elif r_max is not None and r_max > source.precision:
            raise ValueError(f"r_max {r_max} exceeds the set's precision {source.precision}")
        return source, {"kind": "cellset", "r_max": source.precision, "n_cells": len(source)}, None
    raise TypeError(f"expected FractalSpec or CellSet, got {type(source).__name__}")


def _default_window(r_max: int, window) -> tuple[int, int]:
    if window is None:
        return (r_max // 2, r_max)
    lo, hi = int(window[0]), int(window[1])
    if hi > r_max or lo < 0 or hi - lo + 1 < 4:
        raise RegressionError(f"window [{lo}, {hi}] must hold at least 4 precisions within [0, {r_max}]")
    return lo, hi


def _map(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _image_estimate(levels: dict[int, CellSet], image: Callable[[CellSet, int], CellSet], window) -> DimensionEstimate:
    lo, hi = window
    rs = tuple(range(lo, hi + 1))
    counts = tuple(len(image(levels[r], r)) for r in rs)
    return dimension_estimate(ComplexityProfile(rs, counts, 1), window)


# ---------------------------------------------------------------------------
# pinned distances


def pinned_distance_study(
    source,
    pins: int | Sequence = 64,
    r_max: int | None = None,
    window: tuple[int, int] | None = None,
    seed: int = 0,
    declared_dim: float | None = None,
    threads: int = 1,
) -> ExperimentReport:
    """Box-dimension estimates of pinned distance sets for sampled pins.

    Pins are drawn from the set itself unless given explicitly. The report's
    ``max_estimate`` is compared with ``0.75 * s`` for the set's dimension
    ``s``; that comparison is only meaningful in the regime ``s <= 1``.
    """
    cells, echo, dim = _resolve_source(source, r_max)
    if len(cells) == 0:
        raise ValueError("empty cell set")
    if declared_dim is not None:
        dim = float(declared_dim)
    r_max = cells.precision
    window = _default_window(r_max, window)
    if isinstance(pins, int):
        pin_list = sample_points(cells, pins, seed)
    else:
        pin_list = list(pins)
    levels = {r: cells.coarsen(r) for r in range(window[0], window[1] + 1)}
    pin_xy = [p.as_tuple() if isinstance(p, DyadicPoint) else (float(p[0]), float(p[1])) for p in pin_list]

    def one(xy):
        return _image_estimate(levels, lambda c, r: pinned_distance_cells(c, xy, r), window)

    ests = _map(one, pin_xy, threads)
    bound = three_quarters_bound(dim) if dim is not None else float("nan")
    rows = [(x, y, e.slope, e.stderr, e.window[0], e.window[1], bound) for (x, y), e in zip(pin_xy, ests)]
    slopes = [e.slope for e in ests]
    summary = {
        "pins": len(rows),
        "max_estimate": max(slopes) if slopes else float("nan"),
        "median_estimate": float(np.median(slopes)) if slopes else float("nan"),
        "declared_dim": dim if dim is not None else float("nan"),
        "bound_ours": bound,
        "in_regime": dim is not None and dim <= 1.0,
        "exceeds_bound": bool(slopes) and dim is not None and max(slopes) >= bound,
    }
    echo = dict(echo, seed=seed, window=f"{window[0]}:{window[1]}")
    return ExperimentReport(
        "pindist",
        echo,
        ("pin_x", "pin_y", "dim_est", "stderr", "r_lo", "r_hi", "bound_ours"),
        rows,
        summary,
    )


# ---------------------------------------------------------------------------
# projections


def direction_grid(n: int, seed: int = 0, jitter: bool = False) -> list[Direction]:
    """``n`` angles ``k / n``, optionally shifted by seeded offsets in ``[0, 1/n)``."""
    if n < 1:
        raise ValueError("need at least one direction")
    base = np.arange(n, dtype=np.float64) / n
    if jitter:
        base = base + np.random.default_rng(seed).random(n) / n
    return [Direction(float(a)) for a in base]


def projection_sweep(
    source,
    directions: int | Sequence[Direction] = 256,
    r_max: int | None = None,
    window: tuple[int, int] | None = None,
    seed: int = 0,
    jitter: bool = False,
    declared_dim: float | None = None,
    threads: int = 1,
    margin: float = 0.02,
) -> ExperimentReport:
    """Projection dimension estimates per direction; flags those below half the set's dimension.

    A direction is flagged when its estimate falls below ``dim / 2 - margin``;
    the margin absorbs the finite-precision shortfall of sets whose
    projections sit exactly at half dimension, such as the full square.
    """
    cells, echo, dim = _resolve_source(source, r_max)
    if declared_dim is not None:
        dim = float(declared_dim)
    r_max = cells.precision
    window = _default_window(r_max, window)
    if isinstance(directions, int):
        if directions < 8:
            raise ValueError("a sweep needs at least 8 directions")
        dirs = direction_grid(directions, seed, jitter)
    else:
        dirs = list(directions)
    levels = {r: cells.coarsen(r) for r in range(window[0], window[1] + 1)}
    if dim is None:
        from .complexity import profile

        rs = range(window[0], window[1] + 1)
        dim = dimension_estimate(profile(cells, rs), window).slope
    half = dim / 2.0

    def one(e):
        return _image_estimate(levels, lambda c, r: projection_cells(c, e, r), window)

    ests = _map(one, dirs, threads)
    rows = [(e.angle, est.slope, est.stderr, est.slope < half - margin) for e, est in zip(dirs, ests)]
    flagged = [row[0] for row in rows if row[3]]
    summary = {
        "directions": len(rows),
        "dim": dim,
        "half_dim": half,
        "margin": margin,
        "flagged_count": len(flagged),
        "flagged_fraction": len(flagged) / len(rows) if rows else 0.0,
        "flagged_angles": flagged,
    }
    echo = dict(echo, seed=seed, jitter=int(jitter), window=f"{window[0]}:{window[1]}")
    return ExperimentReport("sweep", echo, ("angle", "dim_est", "stderr", "flagged"), rows, summary)


# ---------------------------------------------------------------------------
# half-information comparison


@dataclass(frozen=True)
class HalfInfoRow:
    kind: str
    r: int
    s: int
    lhs: float
    rhs: float

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs


def half_information_check(cells: CellSet, target, r: int, s: int) -> HalfInfoRow:
    """Average conditional bits of the image set against half those of the set.

    ``target`` is a pin (distance images) or a :class:`Direction`
    (projections). Conditional bits at (r, s) are ``log2(N_r / N_s)``. No
    verdict is attached.
    """
    if not s < r:
        raise ValueError(f"need s < r, got r={r}, s={s}")
    if r > cells.precision:
        raise ValueError(f"precision {r} above the set's precision {cells.precision}")
    if isinstance(target, Direction):
        kind = "projection"

        def image(c, q):
            return projection_cells(c, target, q)
    else:
        kind = "distance"
        xy = target.as_tuple() if isinstance(target, DyadicPoint) else (float(target[0]), float(target[1]))

        def image(c, q):
            return pinned_distance_cells(c, xy, q)

    er, es = cells.coarsen(r), cells.coarsen(s)
    lhs = math.log2(len(image(er, r)) / len(image(es, s)))
    rhs = 0.5 * math.log2(len(er) / len(es))
    return HalfInfoRow(kind, r, s, lhs, rhs)


# ---------------------------------------------------------------------------
# selection lemma stress


ALPHAS = (Fraction(1, 4), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(3, 4), Fraction(9, 10))


@dataclass
class LemmaStressSummary:
    tried: int = 0
    passed: int = 0
    skipped: int = 0
    counterexamples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def record(self, inst: SelectionInstance) -> None:
        self.tried += 1
        if not verify_hypotheses(inst):
            self.skipped += 1
            return
        cert = find_pair(inst)
        # the certificate is re-counted here, independently of the search
        if cert is None or not exceeds_threshold(inst, count_witnesses(inst, cert.u, cert.v)):
            self.counterexamples.append(inst)
            return
        self.passed += 1


def lemma_stress(
    trials: int = 10_000,
    seed: int = 0,
    max_x: int = 50,
    max_v: int = 50,
    small_cap: tuple[int, int] = (6, 6),
    small_trials: int = 40,
    exhaustive_bits: int = 12,
) -> LemmaStressSummary:
    """Search for counterexamples to the selection lemma.

    Three stages: every instance whose neighbourhood and relation bits total
    at most ``exhaustive_bits``; ``small_trials`` random instances for every
    size up to ``small_cap``; ``trials`` random instances up to
    ``(max_x, max_v)``. Instances failing the hypotheses are skipped.
    """
    summary = LemmaStressSummary()
    rng = np.random.default_rng(seed)
    cx, cv = small_cap
    for n_x in range(1, cx + 1):
        for n_v in range(1, cv + 1):
            if n_x * n_v * (n_v + 1) <= exhaustive_bits:
                for alpha in (Fraction(1, 2), Fraction(9, 10)):
                    for inst in exhaustive_instances(n_x, n_v, alpha):
                        summary.record(inst)
            for i in range(small_trials):
                alpha = ALPHAS[int(rng.integers(len(ALPHAS)))]
                summary.record(random_instance(rng, n_x, n_v, alpha, cap_slack=int(i % 4 == 0)))
    for i in range(trials):
        n_x = int(rng.integers(1, max_x + 1))
        n_v = int(rng.integers(1, max_v + 1))
        alpha = ALPHAS[int(rng.integers(len(ALPHAS)))]
        summary.record(random_instance(rng, n_x, n_v, alpha, cap_slack=int(i % 4 == 0)))
    return summary
