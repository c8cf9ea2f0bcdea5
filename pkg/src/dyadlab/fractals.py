"""Fractal test sets as explicit dyadic cell sets, plus the DYCS file format."""

from __future__ import annotations

import math
import os
import struct
import tempfile
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from . import _counter_rng
from .dyadic import MAX_PRECISION, DyadicPoint, DyadicScalar
from .errors import PrecisionError

KINDS = ("digit_cantor", "product", "random_tree", "full_square", "segment")

DYCS_MAGIC = b"DYCS"
DYCS_VERSION = 1
_HEADER = struct.Struct("<4sBBIQ")


def _canonical(cells: np.ndarray) -> np.ndarray:
    """Sort rows lexicographically and drop duplicates."""
    cells = np.asarray(cells, dtype=np.int64)
    if cells.ndim == 1:
        cells = cells[:, None]
    if len(cells) == 0:
        return np.empty((0, cells.shape[1]), dtype=np.int64)
    if cells.shape[1] == 1:
        return np.unique(cells[:, 0])[:, None]
    order = np.lexsort(cells.T[::-1])
    cells = cells[order]
    keep = np.ones(len(cells), dtype=bool)
    keep[1:] = np.any(cells[1:] != cells[:-1], axis=1)
    return cells[keep]


class CellSet:
    """Occupied r-dyadic cells of a subset of the line or plane.

    A cell with integer coordinates ``(m, n)`` is the half-open square
    ``[m h, (m+1) h) x [n h, (n+1) h)`` with ``h = 2**-precision``. Rows of
    :attr:`cells` are sorted lexicographically and unique; the array is
    read-only.
    """

    __slots__ = ("_cells", "_precision")

    def __init__(self, cells, precision: int, dim: int | None = None, *, canonical: bool = False):
        if not 0 <= precision <= MAX_PRECISION:
            raise PrecisionError(f"precision {precision} outside [0, {MAX_PRECISION}]")
        arr = np.asarray(cells, dtype=np.int64)
        if arr.ndim == 1:
            arr = arr[:, None] if dim in (None, 1) else arr.reshape(-1, dim)
        if dim is not None and arr.shape[1] != dim:
            raise ValueError(f"cells have {arr.shape[1]} coordinates, expected {dim}")
        if arr.shape[1] not in (1, 2):
            raise ValueError(f"ambient dimension must be 1 or 2, got {arr.shape[1]}")
        if not canonical:
            arr = _canonical(arr)
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        self._cells = arr
        self._precision = int(precision)

    @property
    def cells(self) -> np.ndarray:
        return self._cells

    @property
    def precision(self) -> int:
        return self._precision

    @property
    def dim(self) -> int:
        return self._cells.shape[1]

    @property
    def side(self) -> float:
        return math.ldexp(1.0, -self._precision)

    def __len__(self) -> int:
        return len(self._cells)

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        return (tuple(int(c) for c in row) for row in self._cells)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CellSet):
            return NotImplemented
        return (
            self._precision == other._precision
            and self._cells.shape == other._cells.shape
            and bool(np.array_equal(self._cells, other._cells))
        )

    def __hash__(self):
        return hash((self._precision, self._cells.shape, self._cells.tobytes()))

    def __repr__(self) -> str:
        return f"CellSet(dim={self.dim}, precision={self._precision}, n={len(self)})"

    def coarsen(self, r: int) -> CellSet:
        """The cell set of the same region at precision ``r <= self.precision``."""
        if r > self._precision:
            raise PrecisionError(f"cannot coarsen precision {self._precision} to finer {r}")
        if r < 0:
            raise PrecisionError(f"negative precision {r}")
        if r == self._precision:
            return self
        shifted = self._cells >> (self._precision - r)
        if self.dim == 1:
            # shifting preserves order in one dimension
            col = shifted[:, 0]
            keep = np.ones(len(col), dtype=bool)
            keep[1:] = col[1:] != col[:-1]
            return CellSet(shifted[keep], r, canonical=True)
        return CellSet(shifted, r)

    def parent_counts(self, s: int) -> tuple[np.ndarray, np.ndarray]:
        """Occupied s-cells and how many of this set's cells each contains."""
        if s > self._precision:
            raise PrecisionError(f"conditioning precision {s} exceeds set precision {self._precision}")
        shifted = self._cells >> (self._precision - s)
        parents, counts = np.unique(shifted, axis=0, return_counts=True)
        return parents, counts

    def contains_cell(self, cell: Sequence[int]) -> bool:
        cell = np.asarray(cell, dtype=np.int64).reshape(-1)
        if self.dim == 1:
            col = self._cells[:, 0]
            i = np.searchsorted(col, cell[0])
            return bool(i < len(col) and col[i] == cell[0])
        col = self._cells[:, 0]
        lo, hi = np.searchsorted(col, cell[0], "left"), np.searchsorted(col, cell[0], "right")
        ys = self._cells[lo:hi, 1]
        j = np.searchsorted(ys, cell[1])
        return bool(j < len(ys) and ys[j] == cell[1])

    def lower_corners(self) -> np.ndarray:
        return np.ldexp(self._cells.astype(np.float64), -self._precision)

    def centers(self) -> np.ndarray:
        return np.ldexp(2.0 * self._cells.astype(np.float64) + 1.0, -self._precision - 1)

    def translate(self, offset: Sequence[int]) -> CellSet:
        """Shift by an integer number of cells along each axis."""
        return CellSet(self._cells + np.asarray(offset, dtype=np.int64), self._precision, canonical=True)

    # --- DYCS binary format -------------------------------------------------

    def to_bytes(self) -> bytes:
        header = _HEADER.pack(DYCS_MAGIC, DYCS_VERSION, self.dim, self._precision, len(self))
        return header + self._cells.astype("<i8", copy=False).tobytes(order="C")

    @classmethod
    def from_bytes(cls, data: bytes) -> CellSet:
        if len(data) < _HEADER.size:
            raise ValueError("truncated DYCS header")
        magic, version, dim, precision, count = _HEADER.unpack_from(data)
        if magic != DYCS_MAGIC:
            raise ValueError(f"bad DYCS magic {magic!r}")
        if version != DYCS_VERSION:
            raise ValueError(f"unsupported DYCS version {version}")
        if dim not in (1, 2):
            raise ValueError(f"bad DYCS ambient dimension {dim}")
        expected = _HEADER.size + 8 * dim * count
        if len(data) != expected:
            raise ValueError(f"DYCS payload is {len(data)} bytes, expected {expected}")
        cells = np.frombuffer(data, dtype="<i8", offset=_HEADER.size).reshape(count, dim)
        cs = cls(cells.astype(np.int64), precision, dim)
        if len(cs) != count or not np.array_equal(cs.cells, cells):
            raise ValueError("DYCS cells are not sorted and duplicate-free")
        return cs


def write_cellset(path: str | os.PathLike, cells: CellSet) -> None:
    """Write a DYCS file atomically (temporary file, then rename)."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".dycs-", dir=directory)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(cells.to_bytes())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_cellset(path: str | os.PathLike) -> CellSet:
    with open(path, "rb") as fh:
        return CellSet.from_bytes(fh.read())


@dataclass(frozen=True)
class FractalSpec:
    """Recipe for a generated test set.

    ``base_exp`` is ``m`` for digit base ``2**m``; ``digits`` is the allowed
    digit set of a digit Cantor set (and of the x-factor of a product,
    ``digits_y`` defaulting to the same). ``dim`` is the target dimension of
    a random tree.
    """

    kind: str
    base_exp: int = 2
    digits: tuple[int, ...] = (0, 3)
    digits_y: tuple[int, ...] | None = None
    dim: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown fractal kind {self.kind!r}; expected one of {KINDS}")
        object.__setattr__(self, "digits", tuple(sorted(set(int(d) for d in self.digits))))
        if self.digits_y is not None:
            object.__setattr__(self, "digits_y", tuple(sorted(set(int(d) for d in self.digits_y))))
        if self.kind in ("digit_cantor", "product"):
            if self.base_exp < 1:
                raise ValueError(f"base exponent must be >= 1, got {self.base_exp}")
            base = 1 << self.base_exp
            for ds in (self.digits, self.digits_y or self.digits):
                if not ds or ds[0] < 0 or ds[-1] >= base:
                    raise ValueError(f"digits {ds} must be a nonempty subset of [0, {base})")
        if self.kind == "random_tree":
            if self.dim is None or not 0.0 <= self.dim <= 2.0:
                raise ValueError(f"random_tree needs a target dim in [0, 2], got {self.dim}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @property
    def ambient_dim(self) -> int:
        return 1 if self.kind == "digit_cantor" else 2

    @property
    def declared_dimension(self) -> float:
        """Target dimension of the construction (exact for digit sets)."""
        if self.kind == "digit_cantor":
            return math.log2(len(self.digits)) / self.base_exp
        if self.kind == "product":
            ys = self.digits_y or self.digits
            return (math.log2(len(self.digits)) + math.log2(len(ys))) / self.base_exp
        if self.kind == "random_tree":
            return float(self.dim)
        if self.kind == "full_square":
            return 2.0
        return 1.0

    def admissible(self, r: int) -> bool:
        if self.kind in ("digit_cantor", "product"):
            return r % self.base_exp == 0
        return True


def _digit_cells(digits: Sequence[int], base_exp: int, r: int) -> np.ndarray:
    if r % base_exp:
        raise ValueError(f"precision {r} is not a multiple of the digit length {base_exp}")
    a = np.asarray(digits, dtype=np.int64)
    cells = np.zeros(1, dtype=np.int64)
    for _ in range(r // base_exp):
        cells = (cells[:, None] * (1 << base_exp) + a[None, :]).ravel()
    return cells


def _tree_children(spec: FractalSpec, level: int, parents: np.ndarray) -> np.ndarray:
    """Children at ``level`` of the given parent cells at ``level - 1``."""
    keep_p = 2.0 ** (spec.dim - 2.0)
    px = parents[:, 0][:, None]
    py = parents[:, 1][:, None]
    child = np.arange(4, dtype=np.int64)[None, :]
    keep = _counter_rng.uniform(spec.seed, level, px, py, child, 0) < keep_p
    empty = ~keep.any(axis=1)
    if empty.any():
        keep[empty] = (
            _counter_rng.uniform(spec.seed, level, px[empty], py[empty], child, 1) < keep_p
        )
        still = ~keep.any(axis=1)
        if still.any():
            u = _counter_rng.uniform(spec.seed, level, px[still, 0], py[still, 0], 4, 2)
            forced = np.minimum((u * 4).astype(np.int64), 3)
            rows = np.flatnonzero(still)
            keep[rows, forced] = True
    pi, ci = np.nonzero(keep)
    cx = 2 * parents[pi, 0] + (ci & 1)
    cy = 2 * parents[pi, 1] + (ci >> 1)
    return np.stack([cx, cy], axis=1)


def generate(spec: FractalSpec, r: int) -> CellSet:
    """Cell set of the construction at precision ``r``; deterministic in (spec, r)."""
    if not 0 <= r <= MAX_PRECISION:
        raise PrecisionError(f"precision {r} outside [0, {MAX_PRECISION}]")
    kind = spec.kind
    if kind == "digit_cantor":
        return CellSet(_digit_cells(spec.digits, spec.base_exp, r), r, 1, canonical=True)
    if kind == "product":
        a = CellSet(_digit_cells(spec.digits, spec.base_exp, r), r, 1, canonical=True)
        b = CellSet(_digit_cells(spec.digits_y or spec.digits, spec.base_exp, r), r, 1, canonical=True)
        return product(a, b)
    if kind == "full_square":
        side = np.arange(1 << r, dtype=np.int64)
        return product(CellSet(side, r, 1, canonical=True), CellSet(side, r, 1, canonical=True))
    if kind == "segment":
        side = np.arange(1 << r, dtype=np.int64)
        return CellSet(np.stack([side, np.zeros_like(side)], axis=1), r, 2, canonical=True)
    cells = np.zeros((1, 2), dtype=np.int64)
    for level in range(1, r + 1):
        cells = _tree_children(spec, level, cells)
    return CellSet(cells, r, 2)


def level_counts(spec: FractalSpec, r_max: int, *, batch_cells: int = 1 << 15) -> np.ndarray:
    """Cell counts ``N_0 .. N_{r_max}`` without materializing the finest level.

    Random trees are expanded depth-first in batches, which is exact because
    every branching decision is keyed by the parent cell alone.
    """
    if spec.kind == "full_square":
        return np.asarray([4**r for r in range(r_max + 1)], dtype=np.int64)
    if spec.kind == "segment":
        return np.asarray([2**r for r in range(r_max + 1)], dtype=np.int64)
    if spec.kind != "random_tree":
        top = -(-r_max // spec.base_exp) * spec.base_exp
        finest = generate(spec, top)
        return np.asarray([len(finest.coarsen(r)) for r in range(r_max + 1)], dtype=np.int64)
    counts = np.zeros(r_max + 1, dtype=np.int64)
    counts[0] = 1
    # each stack entry holds cells at `level` that are already counted
    stack = [(0, np.zeros((1, 2), dtype=np.int64))]
    while stack:
        level, cells = stack.pop()
        if level == r_max:
            continue
        if len(cells) > batch_cells:
            half = len(cells) // 2
            stack.append((level, cells[half:]))
            stack.append((level, cells[:half]))
            continue
        children = _tree_children(spec, level + 1, cells)
        counts[level + 1] += len(children)
        stack.append((level + 1, children))
    return counts


def product(a: CellSet, b: CellSet) -> CellSet:
    """Planar product of two one-dimensional cell sets."""
    if a.dim != 1 or b.dim != 1:
        raise ValueError("product needs two one-dimensional cell sets")
    if a.precision != b.precision:
        raise PrecisionError(f"precision mismatch {a.precision} != {b.precision}")
    xs = np.repeat(a.cells[:, 0], len(b))
    ys = np.tile(b.cells[:, 0], len(a))
    return CellSet(np.stack([xs, ys], axis=1), a.precision, 2, canonical=True)


def sample_points(cells: CellSet, k: int, seed: int = 0) -> list:
    """``k`` cell centers drawn uniformly with replacement.

    Centers of precision-r cells are exact at precision ``r + 1``. Planar sets
    yield :class:`DyadicPoint`, one-dimensional sets :class:`DyadicScalar`.
    """
    if len(cells) == 0:
        raise ValueError("cannot sample from an empty cell set")
    if k < 0:
        raise ValueError(f"sample count must be non-negative, got {k}")
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(cells), size=k)
    r = cells.precision + 1
    out = []
    for row in cells.cells[idx]:
        if cells.dim == 1:
            out.append(DyadicScalar(2 * int(row[0]) + 1, r))
        else:
            out.append(DyadicPoint.from_mantissas(2 * int(row[0]) + 1, 2 * int(row[1]) + 1, r))
    return out
