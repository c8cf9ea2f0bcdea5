"""Planar geometry at dyadic precision.

Images of cell sets under pinned distance and projection maps, covers of
thin-annulus intersections by short arcs, and reconstruction of a point
from two truncated projections or two truncated distances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .dyadic import DyadicPoint, DyadicScalar, Direction, project
from .errors import DegenerateDirectionError, DomainError, PrecisionError, PreconditionError
from .fractals import CellSet

K_MAX = 8
C_REC = 64.0

# configuration band of the annulus bound after normalization
_RADIUS_BAND = (0.99, 1.01)
_CENTER_BOX = 0.01
_MAX_NORMALIZED_THICKNESS = 0.5
# angular padding of sectors, in turns; absorbs arccos roundoff
_ARC_PAD = 1e-12

TWO_PI = 2.0 * math.pi


def _as_xy(p) -> tuple[float, float]:
    if isinstance(p, DyadicPoint):
        return p.as_tuple()
    x, y = p
    return float(x), float(y)


# ---------------------------------------------------------------------------
# images of cell sets


def _index_ranges_to_cells(lo: np.ndarray, hi: np.ndarray, r: int) -> CellSet:
    hi = np.maximum(hi, lo)
    width = (hi - lo + 1).astype(np.int64)
    total = int(width.sum())
    if total == 0:
        return CellSet(np.empty(0, dtype=np.int64), r, 1, canonical=True)
    starts = np.repeat(lo, width)
    offsets = np.arange(total, dtype=np.int64) - np.repeat(np.cumsum(width) - width, width)
    return CellSet(np.unique(starts + offsets), r, 1, canonical=True)


def _interval_indices(vlo: np.ndarray, vhi: np.ndarray, hi_attained: np.ndarray, r: int):
    scale = float(2**r)
    lo = np.floor(vlo * scale).astype(np.int64)
    up = vhi * scale
    hi = np.where(hi_attained, np.floor(up), np.ceil(up) - 1).astype(np.int64)
    return lo, hi


def pinned_distance_cells(cells: CellSet, pin, r: int) -> CellSet:
    """r-dyadic intervals met by the distances from ``pin`` to the set.

    Each occupied r-cell contributes the interval between its nearest and
    farthest point from the pin; a cell's upper edges are open, so the
    farthest value only counts when it is attained at the included corner.
    """
    if cells.dim != 2:
        raise ValueError("pinned distances need a planar cell set")
    if r > cells.precision:
        raise PrecisionError(f"precision {r} above the set's precision {cells.precision}")
    px, py = _as_xy(pin)
    coarse = cells.coarsen(r)
    h = coarse.side
    a0 = np.ldexp(coarse.cells[:, 0].astype(np.float64), -r)
    b0 = np.ldexp(coarse.cells[:, 1].astype(np.float64), -r)
    a1, b1 = a0 + h, b0 + h
    dx_min = np.maximum(np.maximum(a0 - px, px - a1), 0.0)
    dy_min = np.maximum(np.maximum(b0 - py, py - b1), 0.0)
    far_x0 = np.abs(px - a0) >= np.abs(px - a1)
    far_y0 = np.abs(py - b0) >= np.abs(py - b1)
    dx_max = np.where(far_x0, np.abs(px - a0), np.abs(px - a1))
    dy_max = np.where(far_y0, np.abs(py - b0), np.abs(py - b1))
    lo, hi = _interval_indices(np.hypot(dx_min, dy_min), np.hypot(dx_max, dy_max), far_x0 & far_y0, r)
    return _index_ranges_to_cells(lo, hi, r)


def projection_cells(cells: CellSet, e: Direction, r: int) -> CellSet:
    """r-dyadic intervals met by the projection of the set onto direction ``e``."""
    if cells.dim != 2:
        raise ValueError("projections need a planar cell set")
    if r > cells.precision:
        raise PrecisionError(f"precision {r} above the set's precision {cells.precision}")
    c, s = e.vector
    coarse = cells.coarsen(r)
    h = coarse.side
    a0 = np.ldexp(coarse.cells[:, 0].astype(np.float64), -r)
    b0 = np.ldexp(coarse.cells[:, 1].astype(np.float64), -r)
    base = c * a0 + s * b0
    # extremes over the half-open cell; the supremum is attained only when
    # neither coordinate needs its excluded upper edge
    vlo = base + min(c, 0.0) * h + min(s, 0.0) * h
    vhi = base + max(c, 0.0) * h + max(s, 0.0) * h
    attained = np.full(len(base), c <= 0.0 and s <= 0.0)
    lo, hi = _interval_indices(vlo, vhi, attained, r)
    return _index_ranges_to_cells(lo, hi, r)


# ---------------------------------------------------------------------------
# annuli


@dataclass(frozen=True)
class Annulus:
    """Open ``thickness``-neighbourhood of the circle of ``radius`` about ``center``."""

    center: tuple[float, float]
    radius: float
    thickness: float

    def __post_init__(self):
        object.__setattr__(self, "center", _as_xy(self.center))
        if not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")
        if not 0 < self.thickness < self.radius:
            raise ValueError(f"thickness must lie in (0, radius), got {self.thickness}")

    def contains(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        d = np.hypot(pts[:, 0] - self.center[0], pts[:, 1] - self.center[1])
        return np.abs(d - self.radius) < self.thickness


def _angle_turns(dx, dy):
    a = np.arctan2(dy, dx) / TWO_PI
    return np.mod(a, 1.0)


@dataclass(frozen=True)
class ArcSector:
    """Part of an annulus seen from its center within an arc of directions.

    ``start`` and ``length`` are in turns; the arc runs counterclockwise.
    """

    annulus: Annulus
    start: float
    length: float

    def __post_init__(self):
        if not 0.0 < self.length <= 1.0:
            raise ValueError(f"arc length must lie in (0, 1] turns, got {self.length}")
        object.__setattr__(self, "start", float(np.mod(self.start, 1.0)))

    @property
    def arc_length(self) -> float:
        """Length of the arc on the annulus' central circle."""
        return TWO_PI * self.annulus.radius * self.length

    def contains_angle(self, a) -> np.ndarray:
        if self.length >= 1.0:
            return np.ones(np.shape(a), dtype=bool)
        return np.mod(np.asarray(a) - self.start, 1.0) <= self.length

    def contains(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
        cx, cy = self.annulus.center
        a = _angle_turns(pts[:, 0] - cx, pts[:, 1] - cy)
        return self.annulus.contains(pts) & self.contains_angle(a)

    def diameter(self) -> float:
        R = self.annulus.radius + self.annulus.thickness
        r = self.annulus.radius - self.annulus.thickness
        theta = TWO_PI * self.length
        if theta >= math.pi:
            return 2.0 * R
        chord = 2.0 * R * math.sin(theta / 2.0)
        cross = math.sqrt((R - r) ** 2 + 4.0 * R * r * math.sin(theta / 2.0) ** 2)
        return max(chord, cross)

    def center_point(self) -> tuple[float, float]:
        mid = TWO_PI * (self.start + self.length / 2.0)
        cx, cy = self.annulus.center
        return (cx + self.annulus.radius * math.cos(mid), cy + self.annulus.radius * math.sin(mid))


def annulus_arc_bound(a1: Annulus, a2: Annulus) -> float:
    """Longest arc allowed per cover element for two thin annuli.

    Both annuli must share the thickness; the bound is stated for the circle of ``a1``.
    """
    d = math.hypot(a1.center[0] - a2.center[0], a1.center[1] - a2.center[1])
    dr = abs(a1.radius - a2.radius)
    eps = a1.thickness
    return TWO_PI * a1.radius * eps / math.sqrt(max(d + dr, eps) * max(abs(d - dr), eps))


def _normalize_pair(a1: Annulus, a2: Annulus):
    """Similarity that puts the pair into the lemma's band, or DomainError."""
    if a1.thickness != a2.thickness:
        raise DomainError("annuli must share one thickness")
    # smallest admissible scale leaves the most room for the center offset
    lam = _RADIUS_BAND[0] / min(a1.radius, a2.radius)
    # pin the smaller radius exactly; lam * radius may round below the band
    r1 = _RADIUS_BAND[0] if a1.radius <= a2.radius else lam * a1.radius
    r2 = _RADIUS_BAND[0] if a2.radius <= a1.radius else lam * a2.radius
    dx = lam * abs(a1.center[0] - a2.center[0])
    dy = lam * abs(a1.center[1] - a2.center[1])
    eps = lam * a1.thickness
    lo, hi = _RADIUS_BAND
    if not (lo <= r1 <= hi and lo <= r2 <= hi):
        raise DomainError(f"radius ratio {a2.radius / a1.radius:.6g} outside the supported band")
    box = _CENTER_BOX * (1.0 + 1e-12)  # absorbs rounding in the center difference
    if dx > box or dy > box:
        raise DomainError("centers too far apart relative to the radii")
    if eps >= _MAX_NORMALIZED_THICKNESS:
        raise DomainError("annuli too thick relative to their radii")
    return lam, r1, r2, math.hypot(dx, dy), eps


def _exact_arcs(r1: float, r2: float, d: float, eps: float) -> list[tuple[float, float]]:
    """Angular set (radians about the center line) of the first annulus meeting the second.

    For a direction at angle phi from the line of centers the distance to
    the second center grows with both the radius and |phi|, so membership is
    a pair of thresholds on cos(phi). The threshold factors below avoid the
    cancellation in ``1 -+ cos``.
    """
    if d == 0.0:
        return [(-math.pi, math.pi)] if abs(r1 - r2) < 2.0 * eps else []
    F = r1 + r2 - d
    G = r1 + r2 + d
    a_hi = r2 - r1 + 2.0 * eps + d  # 1 - c_a
    b_hi = r1 - r2 - 2.0 * eps + d  # 1 + c_a
    a_lo = r2 - r1 - 2.0 * eps + d  # 1 - c_b
    b_lo = r1 - r2 + 2.0 * eps + d  # 1 + c_b
    if a_hi <= 0.0 or b_lo <= 0.0:
        return []
    phi_hi = math.pi if b_hi <= 0.0 else 2.0 * math.atan2(math.sqrt(a_hi * F), math.sqrt(b_hi * G))
    phi_lo = 0.0 if a_lo <= 0.0 else 2.0 * math.atan2(math.sqrt(a_lo * F), math.sqrt(b_lo * G))
    if phi_lo >= phi_hi:
        return []
    if phi_lo == 0.0 and phi_hi == math.pi:
        return [(-math.pi, math.pi)]
    if phi_lo == 0.0:
        return [(-phi_hi, phi_hi)]
    if phi_hi == math.pi:
        return [(phi_lo, TWO_PI - phi_lo)]
    return [(phi_lo, phi_hi), (-phi_hi, -phi_lo)]


def annulus_intersection_cover(a1: Annulus, a2: Annulus) -> list[ArcSector]:
    """Sectors of ``a1`` covering ``a1 & a2``, each no longer than :func:`annulus_arc_bound`.

    Raises DomainError when the pair cannot be scaled into the lemma's
    configuration band (radii near 1, centers within 0.01 of each other).
    """
    lam, r1, r2, d, eps = _normalize_pair(a1, a2)
    arcs = _exact_arcs(r1, r2, d, eps)
    if not arcs:
        return []
    base = math.atan2(a2.center[1] - a1.center[1], a2.center[0] - a1.center[0]) / TWO_PI if d > 0 else 0.0
    bound_turns = min(annulus_arc_bound(a1, a2) / (TWO_PI * a1.radius), 1.0)
    sectors: list[ArcSector] = []
    for lo, hi in arcs:
        span = (hi - lo) / TWO_PI
        if span >= 1.0:
            start, total = 0.0, 1.0
        else:
            start, total = base + lo / TWO_PI - _ARC_PAD, min(span + 2 * _ARC_PAD, 1.0)
        n = max(1, math.ceil(total / bound_turns - 1e-12))
        piece = total / n
        sectors.extend(ArcSector(a1, start + i * piece, piece) for i in range(n))
    if len(sectors) > K_MAX:
        raise DomainError(f"cover needs {len(sectors)} sectors, more than K_MAX={K_MAX}")
    return sectors


def sectors_contain(sectors: Sequence[ArcSector], pts) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(pts, dtype=np.float64))
    hit = np.zeros(len(pts), dtype=bool)
    for sec in sectors:
        hit |= sec.contains(pts)
    return hit


# ---------------------------------------------------------------------------
# reconstruction


@dataclass(frozen=True)
class Parallelogram:
    """Points whose truncated projections onto ``u`` and ``v`` equal ``pu`` and ``pv``."""

    u: Direction
    v: Direction
    pu: DyadicScalar
    pv: DyadicScalar
    vertices: tuple[tuple[float, float], ...]

    @property
    def diameter(self) -> float:
        vs = np.asarray(self.vertices)
        return float(max(np.hypot(*(vs[0] - vs[3])), np.hypot(*(vs[1] - vs[2]))))

    @property
    def center(self) -> tuple[float, float]:
        return tuple(np.asarray(self.vertices).mean(axis=0))

    def contains(self, p) -> bool:
        p = _as_xy(p)
        r = self.pu.precision
        return DyadicScalar.floor(project(p, self.u), r) == self.pu and DyadicScalar.floor(project(p, self.v), r) == self.pv


@dataclass(frozen=True)
class Sector:
    """Annular sector candidate from a distance reconstruction."""

    arc: ArcSector

    @property
    def diameter(self) -> float:
        return self.arc.diameter()

    @property
    def center(self) -> tuple[float, float]:
        return self.arc.center_point()

    def contains(self, p) -> bool:
        return bool(self.arc.contains(_as_xy(p))[0])


Candidate = Union[Parallelogram, Sector]


@dataclass(frozen=True)
class ReconstructionRegion:
    candidates: tuple[Candidate, ...]
    separation_exponent: int
    precision: int
    diameter_bound: float

    def __post_init__(self):
        if len(self.candidates) > K_MAX:
            raise ValueError(f"{len(self.candidates)} candidates exceed K_MAX={K_MAX}")
        worst = max((c.diameter for c in self.candidates), default=0.0)
        if worst > self.diameter_bound:
            raise ValueError(f"candidate diameter {worst:.3e} exceeds bound {self.diameter_bound:.3e}")

    @property
    def diameter(self) -> float:
        return max((c.diameter for c in self.candidates), default=0.0)

    def contains(self, p) -> bool:
        return any(c.contains(p) for c in self.candidates)


def _vec(e: Direction) -> np.ndarray:
    return np.asarray(e.vector, dtype=np.float64)


def reconstruct_from_projections(u: Direction, v: Direction, pu: DyadicScalar, pv: DyadicScalar) -> ReconstructionRegion:
    """The parallelogram cut out by two truncated projections.

    Its diameter is ``2 * 2**-r / min(|u - v|, |u + v|)``, at most
    ``4 * 2**(t - r)`` with ``t = ceil(-log2 min(|u - v|, |u + v|))``.
    """
    if pu.precision != pv.precision:
        raise PrecisionError(f"projection precisions differ: {pu.precision} != {pv.precision}")
    r = pu.precision
    eu, ev = _vec(u), _vec(v)
    sep = min(float(np.hypot(*(eu - ev))), float(np.hypot(*(eu + ev))))
    det = eu[0] * ev[1] - eu[1] * ev[0]
    # unit vectors carry ~1e-16 rounding, so smaller separations mean parallel
    if sep < 1e-12 or det == 0.0:
        raise DegenerateDirectionError("parallel directions give a strip, not a bounded region")
    t = max(math.ceil(-math.log2(sep)), 0)
    h = math.ldexp(1.0, -r)
    inv = np.array([[ev[1], -eu[1]], [-ev[0], eu[0]]]) / det
    verts = []
    for a in (pu.value, pu.value + h):
        for b in (pv.value, pv.value + h):
            verts.append(tuple(float(c) for c in inv @ np.array([a, b])))
    cand = Parallelogram(u, v, pu, pv, tuple(verts))
    return ReconstructionRegion((cand,), t, r, 4.0 * math.ldexp(1.0, t - r))


def _crossing_separation(u, v, ru: float, rv: float) -> float:
    """``|e_{u,P} - e_{v,P}|`` at a crossing P of the two circles; 0 when they miss."""
    dvec = np.asarray(v, dtype=np.float64) - np.asarray(u, dtype=np.float64)
    d = float(np.hypot(*dvec))
    if d == 0.0:
        return 0.0
    a = (ru * ru - rv * rv + d * d) / (2.0 * d)
    hh = ru * ru - a * a
    if hh <= 0.0:
        return 0.0
    ex, ey = dvec / d
    p = np.asarray(u) + a * np.array([ex, ey]) + math.sqrt(hh) * np.array([-ey, ex])
    e1 = (p - np.asarray(u)) / ru
    e2 = (p - np.asarray(v)) / rv
    return float(np.hypot(*(e1 - e2)))


def reconstruct_from_distances(
    u: Sequence[float],
    v: Sequence[float],
    du: DyadicScalar,
    dv: DyadicScalar,
    t: int,
    c_rec: float = C_REC,
) -> ReconstructionRegion:
    """Candidate regions for a point whose truncated distances from u and v are known.

    The point lies in two annuli of thickness about ``2**-r``; their
    intersection is covered by sectors from :func:`annulus_intersection_cover`.
    The caller asserts that the directions from ``u`` and ``v`` to the point
    differ by at least ``2**-t``; the mid-radius circles are required to
    cross with separation at least ``2**(-t-1)``, else PreconditionError.
    """
    if du.precision != dv.precision:
        raise PrecisionError(f"distance precisions differ: {du.precision} != {dv.precision}")
    r = du.precision
    h = math.ldexp(1.0, -r)
    u, v = _as_xy(u), _as_xy(v)
    ru, rv = du.value + h / 2.0, dv.value + h / 2.0
    if ru <= 0 or rv <= 0:
        raise DomainError("distances must be positive")
    # dyadic rescaling keeps grid structure; the lemma band is checked inside the cover
    k = -round(math.log2(ru))
    lo, hi = _RADIUS_BAND
    if not (lo <= math.ldexp(ru, k) <= hi and lo <= math.ldexp(rv, k) <= hi):
        raise DomainError("distances cannot be scaled by a power of two into [0.99, 1.01]")
    sep = _crossing_separation(u, v, ru, rv)
    if sep < math.ldexp(1.0, -t - 1):
        raise PreconditionError(
            f"circles cross with direction separation {sep:.3e} < 2^-{t + 1}; configuration too tangential"
        )
    eps = (h / 2.0) * (1.0 + 2.0**-20)
    au, av = Annulus(u, ru, eps), Annulus(v, rv, eps)
    sectors = annulus_intersection_cover(au, av)
    bound = c_rec * math.ldexp(1.0, 2 * t - r)
    return ReconstructionRegion(tuple(Sector(s) for s in sectors), t, r, bound)
