"""Exact dyadic-grid arithmetic, truncation and planar directions.

Every grid value is ``mantissa * 2**-precision`` with an integer mantissa, so
nesting identities such as ``floor_s(floor_r(x)) == floor_s(x)`` hold exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import DegenerateDirectionError, PrecisionError, PrecisionOverflowError

MAX_PRECISION = 60
_MANTISSA_LIMIT = 2**63


def _check_precision(r: int) -> int:
    if not isinstance(r, int) or isinstance(r, bool):
        raise TypeError(f"precision must be an int, got {type(r).__name__}")
    if r < 0:
        raise PrecisionError(f"precision must be non-negative, got {r}")
    if r > MAX_PRECISION:
        raise PrecisionOverflowError(f"precision {r} exceeds supported maximum {MAX_PRECISION}")
    return r


def _check_mantissa(m: int) -> int:
    if not -_MANTISSA_LIMIT <= m < _MANTISSA_LIMIT:
        raise PrecisionOverflowError(f"mantissa {m} outside signed 64-bit range")
    return m


@dataclass(frozen=True)
class DyadicScalar:
    """The number ``mantissa * 2**-precision``."""

    mantissa: int
    precision: int

    def __post_init__(self):
        object.__setattr__(self, "mantissa", _check_mantissa(int(self.mantissa)))
        _check_precision(self.precision)

    @classmethod
    def floor(cls, x: float, r: int) -> DyadicScalar:
        """Largest r-dyadic rational not exceeding ``x``."""
        _check_precision(r)
        if not math.isfinite(x):
            raise ValueError(f"cannot truncate non-finite value {x!r}")
        # ldexp is an exact power-of-two scaling, so the floor is exact too.
        return cls(math.floor(math.ldexp(float(x), r)), r)

    @property
    def value(self) -> float:
        return math.ldexp(self.mantissa, -self.precision)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.mantissa, 1 << self.precision)

    def at_precision(self, r: int) -> DyadicScalar:
        """Re-express at a finer precision ``r >= self.precision`` without changing value."""
        _check_precision(r)
        if r < self.precision:
            raise PrecisionError(
                f"cannot re-express precision {self.precision} exactly at coarser {r}; use truncate()"
            )
        return DyadicScalar(self.mantissa << (r - self.precision), r)

    def truncate(self, s: int) -> DyadicScalar:
        """Floor to the coarser grid ``D_s``."""
        _check_precision(s)
        if s > self.precision:
            raise PrecisionError(f"target precision {s} exceeds current precision {self.precision}")
        return DyadicScalar(self.mantissa >> (self.precision - s), s)

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class DyadicPoint:
    """A point of the planar grid ``D_r x D_r``."""

    x: DyadicScalar
    y: DyadicScalar

    def __post_init__(self):
        if self.x.precision != self.y.precision:
            raise PrecisionError(
                f"coordinates carry different precisions {self.x.precision} and {self.y.precision}"
            )

    @classmethod
    def from_mantissas(cls, mx: int, my: int, r: int) -> DyadicPoint:
        return cls(DyadicScalar(mx, r), DyadicScalar(my, r))

    @property
    def precision(self) -> int:
        return self.x.precision

    @property
    def mantissas(self) -> tuple[int, int]:
        return (self.x.mantissa, self.y.mantissa)

    def as_tuple(self) -> tuple[float, float]:
        return (self.x.value, self.y.value)

    def as_fractions(self) -> tuple[Fraction, Fraction]:
        return (self.x.fraction, self.y.fraction)


def floor_r(x: Sequence[float], r: int) -> DyadicPoint:
    """Coordinatewise floor of a planar point onto the r-dyadic grid.

    >>> floor_r((1.0, -0.3), 2).as_tuple()
    (1.0, -0.5)
    """
    x1, x2 = x
    return DyadicPoint(DyadicScalar.floor(x1, r), DyadicScalar.floor(x2, r))


def refine_floor(p: DyadicPoint, s: int) -> DyadicPoint:
    """Truncate a grid point to the coarser precision ``s <= p.precision``."""
    if s > p.precision:
        raise PrecisionError(f"target precision {s} exceeds point precision {p.precision}")
    return DyadicPoint(p.x.truncate(s), p.y.truncate(s))


_QUARTER_TURNS = {0: (1.0, 0.0), 1: (0.0, 1.0), 2: (-1.0, 0.0), 3: (0.0, -1.0)}


def _normalize_turns(a: float) -> float:
    a = math.fmod(float(a), 1.0)
    if a < 0.0:
        a += 1.0
    # fmod of a tiny negative number can round up to exactly 1.0
    return 0.0 if a >= 1.0 else a


@dataclass(frozen=True)
class Direction:
    """A unit vector identified with its angle in turns, ``a`` in ``[0, 1)``."""

    angle: float

    def __post_init__(self):
        if not math.isfinite(self.angle):
            raise ValueError(f"direction angle must be finite, got {self.angle!r}")
        object.__setattr__(self, "angle", _normalize_turns(self.angle))

    @property
    def vector(self) -> tuple[float, float]:
        q = 4.0 * self.angle
        if q == int(q):
            return _QUARTER_TURNS[int(q)]
        theta = 2.0 * math.pi * self.angle
        return (math.cos(theta), math.sin(theta))

    def truncate(self, r: int) -> DyadicScalar:
        """``floor_r`` applied to the angle coordinate."""
        return DyadicScalar.floor(self.angle, r)

    def distance(self, other: Direction) -> float:
        """Euclidean distance between the two unit vectors."""
        (a, b), (c, d) = self.vector, other.vector
        return math.hypot(a - c, b - d)


def direction_between(u: Sequence[float], v: Sequence[float]) -> Direction:
    """Direction of ``v - u``."""
    dx = float(v[0]) - float(u[0])
    dy = float(v[1]) - float(u[1])
    if dx == 0.0 and dy == 0.0:
        raise DegenerateDirectionError(f"direction undefined between coincident points {tuple(u)}")
    return Direction(math.atan2(dy, dx) / (2.0 * math.pi))


def project(x: Sequence[float], e: Direction) -> float:
    """Orthogonal projection coordinate ``x . e``."""
    c, s = e.vector
    return float(x[0]) * c + float(x[1]) * s
