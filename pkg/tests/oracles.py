"""Independent oracles and seeded configuration generators shared by the tests."""

from __future__ import annotations

import math

import numpy as np

from dyadlab.dyadic import Direction, DyadicScalar, direction_between, project
from dyadlab.geometry import Annulus

TWO_PI = 2.0 * math.pi


def sample_annulus_intersection(a1: Annulus, a2: Annulus, n: int, rng, scan: int = 1 << 16) -> np.ndarray:
    """Up to ``n`` points of ``a1 & a2`` by rejection sampling.

    Candidate angles come from a grid scan of the first annulus, dilated by
    a Lipschitz margin so no part of the intersection is missed; points are
    then drawn uniformly in the selected angular bins and filtered by plain
    distance tests. Nothing here shares code with the sector construction.
    """
    (x1, y1), (x2, y2) = a1.center, a2.center
    rho, eps = a1.radius, a1.thickness
    step = 1.0 / scan
    theta = (np.arange(scan) + 0.5) * step * TWO_PI
    px, py = x1 + rho * np.cos(theta), y1 + rho * np.sin(theta)
    gap = np.abs(np.hypot(px - x2, py - y2) - a2.radius)
    # moving within a bin changes the distance by at most eps + rho * pi * step * 2pi / 2
    bins = np.flatnonzero(gap < a2.thickness + eps + (rho + eps) * math.pi * step * 2.0)
    if len(bins) == 0:
        return np.empty((0, 2))
    out = []
    have = 0
    for _ in range(40):
        m = 4 * n
        b = bins[rng.integers(0, len(bins), size=m)]
        ang = (b + rng.random(m)) * step * TWO_PI
        rad = rho + eps * (2.0 * rng.random(m) - 1.0)
        pts = np.stack([x1 + rad * np.cos(ang), y1 + rad * np.sin(ang)], axis=1)
        keep = a1.contains(pts) & a2.contains(pts)
        out.append(pts[keep])
        have += int(keep.sum())
        if have >= n:
            break
    pts = np.concatenate(out)
    return pts[:n]


def random_annulus_pair(rng) -> tuple[Annulus, Annulus]:
    """An admissible pair: radii in [0.99, 1.01], centers within 0.01, eps in [2^-16, 2^-8]."""
    eps = 2.0 ** rng.uniform(-16, -8)
    r1 = rng.uniform(0.99, 1.01)
    c1 = tuple(rng.uniform(-0.5, 0.5, size=2))
    kind = rng.integers(0, 4)
    if kind == 0:
        # nearly internally tangent
        a = rng.uniform(0, TWO_PI)
        off = rng.uniform(0, 0.01) * np.array([math.cos(a), math.sin(a)])
        r2 = r1 + np.linalg.norm(off) * rng.choice([-1, 1]) + rng.uniform(-2, 2) * eps
    elif kind == 1:
        # nearly identical circles
        off = np.clip(rng.uniform(-1, 1, size=2) * eps * rng.uniform(0, 4), -0.01, 0.01)
        r2 = r1 + rng.uniform(-2, 2) * eps
    else:
        off = rng.uniform(-0.01, 0.01, size=2)
        r2 = r1 + rng.uniform(-0.01, 0.01)
    r2 = float(np.clip(r2, 0.99, 1.01))
    c2 = (c1[0] + float(off[0]), c1[1] + float(off[1]))
    return Annulus(c1, r1, eps), Annulus(c2, r2, eps)


def projection_config(rng, t: int, r: int):
    """True point, two directions separated by about ``2**-t``, and truncated projections."""
    d = tuple(rng.uniform(-1, 1, size=2))
    a = rng.uniform(0, 1)
    u = Direction(a)
    v = Direction(a + 2.0 ** -t / TWO_PI * rng.uniform(1.0, 1.9) * rng.choice([-1, 1]))
    pu = DyadicScalar.floor(project(d, u), r)
    pv = DyadicScalar.floor(project(d, v), r)
    return d, u, v, pu, pv


def distance_config(rng, t: int, r: int):
    """Points u, v and a target d with ``|e_{u,d} - e_{v,d}| >= 2**-t``, plus truncated distances.

    ``d`` lies at distance about 1 from ``u``; ``v`` is offset from ``u``
    roughly perpendicular to ``d - u`` so the separation is near ``2**-t``.
    """
    while True:
        u = tuple(rng.uniform(-0.25, 0.25, size=2))
        phi = rng.uniform(0, TWO_PI)
        rho = rng.uniform(0.995, 1.005)
        d = (u[0] + rho * math.cos(phi), u[1] + rho * math.sin(phi))
        psi = phi + math.pi / 2 + rng.uniform(-0.6, 0.6)
        step = 2.0 ** -t * rng.uniform(1.05, 1.6)
        v = (u[0] + step * math.cos(psi), u[1] + step * math.sin(psi))
        sep = direction_between(u, d).distance(direction_between(v, d))
        if sep >= 2.0 ** -t:
            break
    du = DyadicScalar.floor(math.dist(u, d), r)
    dv = DyadicScalar.floor(math.dist(v, d), r)
    return d, u, v, du, dv


def consistent_grid_points(u, v, du: DyadicScalar, dv: DyadicScalar, center, half_width: float, step: float) -> np.ndarray:
    """Grid points near ``center`` whose truncated distances to u and v are du and dv."""
    k = int(math.ceil(half_width / step))
    g = np.arange(-k, k + 1) * step
    xs, ys = np.meshgrid(center[0] + g, center[1] + g, indexing="ij")
    pts = np.stack([xs.ravel(), ys.ravel()], axis=1)
    r = du.precision
    fu = np.floor(np.ldexp(np.hypot(pts[:, 0] - u[0], pts[:, 1] - u[1]), r))
    fv = np.floor(np.ldexp(np.hypot(pts[:, 0] - v[0], pts[:, 1] - v[1]), r))
    return pts[(fu == du.mantissa) & (fv == dv.mantissa)]


def log_slope(xs, ys) -> float:
    """Least-squares slope of log2 ys against xs."""
    return float(np.polyfit(np.asarray(xs, dtype=float), np.log2(np.asarray(ys, dtype=float)), 1)[0])
