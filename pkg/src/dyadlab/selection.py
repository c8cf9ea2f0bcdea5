"""Finite selection lemma: many suitable d per v, few similar u per (v, d).

If every ``v`` in ``V`` has ``|N_v| >= alpha |X|`` and, for each ``d`` in
``N_v``, at most ``(alpha**2 / 4) |V|`` elements ``u`` satisfy ``u ~_d v``,
then some pair ``(u, v)`` has more than ``(alpha**2 / 2) |X|`` elements
``d`` in ``N_u & N_v`` with ``u`` not similar to ``v`` under ``~_d``.

All threshold comparisons are exact: ``alpha`` is a Fraction and both sides
are scaled to integers.
"""

from __future__ import annotations

import io
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

Relation = Callable[[int, int, int], bool]

DENSE_LIMIT = 10**7


def _as_alpha(alpha) -> Fraction:
    a = Fraction(alpha)
    if not 0 < a < 1:
        raise ValueError(f"alpha must lie strictly between 0 and 1, got {a}")
    return a


@dataclass(frozen=True, eq=False)
class SelectionInstance:
    """Inputs of the lemma over index sets ``X = range(n_x)`` and ``V = range(n_v)``.

    ``membership[v, d]`` says whether ``d`` is in ``N_v``. The relation is
    either a predicate ``relation(d, u, v)`` meaning ``u ~_d v`` or a dense
    boolean array ``dense[d, u, v]``; neither reflexivity nor symmetry is
    assumed.
    """

    membership: np.ndarray
    alpha: Fraction
    relation: Relation | None = None
    dense: np.ndarray | None = None

    def __post_init__(self):
        m = np.asarray(self.membership, dtype=bool)
        if m.ndim != 2:
            raise ValueError("membership must be a |V| x |X| boolean matrix")
        m = m.copy()
        m.setflags(write=False)
        object.__setattr__(self, "membership", m)
        object.__setattr__(self, "alpha", _as_alpha(self.alpha))
        if self.dense is not None:
            dense = np.asarray(self.dense, dtype=bool).copy()
            if dense.shape != (self.n_x, self.n_v, self.n_v):
                raise ValueError(f"dense relation must have shape {(self.n_x, self.n_v, self.n_v)}")
            dense.setflags(write=False)
            object.__setattr__(self, "dense", dense)

    @classmethod
    def from_sets(
        cls,
        n_x: int,
        neighborhoods: Sequence[Iterable[int]],
        alpha,
        relation: Relation | None = None,
        dense: np.ndarray | None = None,
    ) -> SelectionInstance:
        m = np.zeros((len(neighborhoods), n_x), dtype=bool)
        for v, nv in enumerate(neighborhoods):
            for d in nv:
                if not 0 <= d < n_x:
                    raise ValueError(f"N_{v} contains {d}, outside X = range({n_x})")
                m[v, d] = True
        return cls(m, alpha, relation, dense)

    @property
    def n_x(self) -> int:
        return self.membership.shape[1]

    @property
    def n_v(self) -> int:
        return self.membership.shape[0]

    def neighborhood(self, v: int) -> list[int]:
        return np.flatnonzero(self.membership[v]).tolist()

    def related(self, d: int, u: int, v: int) -> bool:
        """Whether ``u ~_d v``."""
        if self.dense is not None:
            return bool(self.dense[d, u, v])
        if self.relation is None:
            return False
        return bool(self.relation(d, u, v))

    def dense_relation(self) -> np.ndarray:
        """Materialize the relation as a ``[d, u, v]`` boolean array."""
        if self.dense is not None:
            return self.dense
        out = np.zeros((self.n_x, self.n_v, self.n_v), dtype=bool)
        if self.relation is not None:
            for d, u, v in itertools.product(range(self.n_x), range(self.n_v), range(self.n_v)):
                out[d, u, v] = bool(self.relation(d, u, v))
        return out

    def _can_densify(self) -> bool:
        return self.dense is not None or self.n_x * self.n_v * self.n_v <= DENSE_LIMIT


# exact inequalities, alpha = p/q


def _size_ok(inst: SelectionInstance, size: int) -> bool:
    p, q = inst.alpha.numerator, inst.alpha.denominator
    return q * size >= p * inst.n_x


def _cap_ok(inst: SelectionInstance, similar: int) -> bool:
    p, q = inst.alpha.numerator, inst.alpha.denominator
    return 4 * q * q * similar <= p * p * inst.n_v


def exceeds_threshold(inst: SelectionInstance, count: int) -> bool:
    """``count > (alpha**2 / 2) |X|`` exactly."""
    p, q = inst.alpha.numerator, inst.alpha.denominator
    return 2 * q * q * count > p * p * inst.n_x


def threshold(inst: SelectionInstance) -> Fraction:
    return inst.alpha**2 / 2 * inst.n_x


@dataclass(frozen=True)
class HypothesisCheck:
    ok: bool
    v: int | None = None
    d: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


def verify_hypotheses(inst: SelectionInstance) -> HypothesisCheck:
    """Check both lemma hypotheses, reporting the first violation in (v, d) order."""
    sizes = inst.membership.sum(axis=1)
    if inst._can_densify():
        similar = inst.dense_relation().sum(axis=1)  # [d, v]: #{u : u ~_d v}
    else:
        similar = None
    for v in range(inst.n_v):
        if not _size_ok(inst, int(sizes[v])):
            return HypothesisCheck(False, v, None, f"|N_{v}| = {int(sizes[v])} < alpha |X|")
        for d in np.flatnonzero(inst.membership[v]):
            d = int(d)
            if similar is not None:
                cnt = int(similar[d, v])
            else:
                cnt = sum(inst.related(d, u, v) for u in range(inst.n_v))
            if not _cap_ok(inst, cnt):
                return HypothesisCheck(False, v, d, f"{cnt} elements u ~_{d} {v} exceeds (alpha^2/4)|V|")
    return HypothesisCheck(True)


@dataclass(frozen=True)
class PairCertificate:
    u: int
    v: int
    witnesses: int
    threshold: Fraction

    def __post_init__(self):
        if not self.witnesses > self.threshold:
            raise ValueError(f"witness count {self.witnesses} does not exceed {self.threshold}")


def count_witnesses(inst: SelectionInstance, u: int, v: int) -> int:
    """``#{d in N_u & N_v : not u ~_d v}`` by direct enumeration."""
    both = np.flatnonzero(inst.membership[u] & inst.membership[v])
    return sum(1 for d in both if not inst.related(int(d), u, v))


def witness_matrix(inst: SelectionInstance) -> np.ndarray:
    """``W[u, v]`` = number of witnesses for the ordered pair (u, v)."""
    m = inst.membership.astype(np.int64)
    unrelated = ~inst.dense_relation()
    return np.einsum("ud,vd,duv->uv", m, m, unrelated.astype(np.int64), optimize=True)


def _pair_order(n_v: int) -> Iterator[tuple[int, int]]:
    # distinct pairs first, lexicographically, then the diagonal
    for u in range(n_v):
        for v in range(n_v):
            if u != v:
                yield u, v
    for v in range(n_v):
        yield v, v


def qualifying_pairs(inst: SelectionInstance) -> set[tuple[int, int]]:
    """Every ordered pair whose witness count exceeds the threshold."""
    p, q = inst.alpha.numerator, inst.alpha.denominator
    if inst._can_densify():
        w = witness_matrix(inst)
        us, vs = np.nonzero(2 * q * q * w > p * p * inst.n_x)
        return set(zip(us.tolist(), vs.tolist()))
    return {(u, v) for u, v in _pair_order(inst.n_v) if exceeds_threshold(inst, count_witnesses(inst, u, v))}


def find_pair(inst: SelectionInstance) -> PairCertificate | None:
    """First qualifying pair: distinct pairs in lexicographic order, then (v, v).

    Pairs whose intersection ``N_u & N_v`` is already too small are skipped
    without evaluating the relation. The returned certificate's count is
    re-derived by :func:`count_witnesses`.
    """
    p, q = inst.alpha.numerator, inst.alpha.denominator
    m = inst.membership.astype(np.int64)
    overlap = m @ m.T
    viable = 2 * q * q * overlap > p * p * inst.n_x
    if not viable.any():
        return None
    w = witness_matrix(inst) if inst._can_densify() else None
    for u, v in _pair_order(inst.n_v):
        if not viable[u, v]:
            continue
        if w is not None:
            if not exceeds_threshold(inst, int(w[u, v])):
                continue
        count = count_witnesses(inst, u, v)
        if exceeds_threshold(inst, count):
            return PairCertificate(u, v, count, threshold(inst))
    return None


def single_relation_pair(inst: SelectionInstance, sample: int = 256, seed: int = 0) -> tuple[int, int, int] | None:
    """Pair ``u`` not similar to ``v`` with ``|N_u & N_v| > (alpha**2 / 2)|X|``.

    For relations that ignore ``d``; independence is spot-checked on a
    seeded sample of triples and a ValueError raised when it fails.
    """
    rng = np.random.default_rng(seed)
    if inst.n_x > 1:
        for _ in range(sample):
            d1, d2 = rng.integers(0, inst.n_x, size=2)
            u, v = rng.integers(0, inst.n_v, size=2)
            if inst.related(int(d1), int(u), int(v)) != inst.related(int(d2), int(u), int(v)):
                raise ValueError(f"relation depends on d (d={d1} vs d={d2} at u={u}, v={v})")
    m = inst.membership.astype(np.int64)
    overlap = m @ m.T
    for u, v in _pair_order(inst.n_v):
        if inst.related(0, u, v):
            continue
        if exceeds_threshold(inst, int(overlap[u, v])):
            return u, v, int(overlap[u, v])
    return None


# ---------------------------------------------------------------------------
# plain-text interchange


def dumps_instance(inst: SelectionInstance) -> str:
    a = inst.alpha
    buf = io.StringIO()
    buf.write(f"X {inst.n_x} V {inst.n_v} alpha {a.numerator}/{a.denominator}\n")
    for v in range(inst.n_v):
        buf.write(" ".join(str(d) for d in inst.neighborhood(v)) + "\n")
    for d, u, v in zip(*np.nonzero(inst.dense_relation())):
        buf.write(f"{d} {u} {v}\n")
    return buf.getvalue()


def loads_instance(text: str) -> SelectionInstance:
    lines = text.splitlines()
    if not lines:
        raise ValueError("empty instance text")
    head = lines[0].split()
    if len(head) != 6 or head[0] != "X" or head[2] != "V" or head[4] != "alpha":
        raise ValueError(f"bad header line {lines[0]!r}")
    n_x, n_v = int(head[1]), int(head[3])
    alpha = Fraction(head[5])
    if len(lines) < 1 + n_v:
        raise ValueError(f"expected {n_v} neighbourhood lines, found {len(lines) - 1}")
    hoods = [[int(tok) for tok in line.split()] for line in lines[1 : 1 + n_v]]
    dense = np.zeros((n_x, n_v, n_v), dtype=bool)
    for line in lines[1 + n_v :]:
        if not line.strip():
            continue
        d, u, v = (int(tok) for tok in line.split())
        if not (0 <= d < n_x and 0 <= u < n_v and 0 <= v < n_v):
            raise ValueError(f"relation triple out of range: {line!r}")
        dense[d, u, v] = True
    return SelectionInstance.from_sets(n_x, hoods, alpha, dense=dense)


# ---------------------------------------------------------------------------
# instance generators for property testing


def random_instance(
    rng: np.random.Generator,
    n_x: int,
    n_v: int,
    alpha,
    cap_slack: int = 0,
    reflexive: bool = True,
) -> SelectionInstance:
    """Random neighbourhoods of size at least ``alpha |X|`` and a random relation.

    For each ``(d, v)`` the number of ``u ~_d v`` is drawn uniformly from
    ``0 .. floor((alpha**2 / 4)|V|) + cap_slack``, so positive slack produces
    some instances that violate the similarity cap. Reflexive pairs are
    listed first whenever the drawn count allows.
    """
    alpha = _as_alpha(alpha)
    p, q = alpha.numerator, alpha.denominator
    min_size = -(-p * n_x // q)
    keys = rng.random((n_v, n_x))
    sizes = rng.integers(min_size, n_x + 1, size=n_v)
    m = np.argsort(np.argsort(keys, axis=1), axis=1) < sizes[:, None]
    cap = (p * p * n_v) // (4 * q * q)
    k = rng.integers(0, min(cap + cap_slack, n_v) + 1, size=(n_x, n_v))
    prio = rng.random((n_x, n_v, n_v))
    if reflexive:
        idx = np.arange(n_v)
        prio[:, idx, idx] = -1.0
    rank = np.argsort(np.argsort(prio, axis=1), axis=1)
    dense = rank < k[:, None, :]
    return SelectionInstance(m, alpha, dense=dense)


def exhaustive_instances(n_x: int, n_v: int, alpha) -> Iterator[SelectionInstance]:
    """Every neighbourhood family and every relation on the given sizes."""
    alpha = _as_alpha(alpha)
    n_rel = n_x * n_v * n_v
    hood_choices = list(itertools.product((False, True), repeat=n_x))
    for hoods in itertools.product(hood_choices, repeat=n_v):
        m = np.asarray(hoods, dtype=bool).reshape(n_v, n_x)
        for bits in range(1 << n_rel):
            flat = (bits >> np.arange(n_rel)) & 1
            yield SelectionInstance(m, alpha, dense=flat.astype(bool).reshape(n_x, n_v, n_v))
