import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dyadlab._counter_rng import hash64, uniform
from dyadlab.errors import PrecisionError
from dyadlab.fractals import (
    CellSet,
    FractalSpec,
    generate,
    level_counts,
    product,
    read_cellset,
    sample_points,
    write_cellset,
)

MASK = (1 << 64) - 1
MID4 = FractalSpec("digit_cantor", base_exp=2, digits=(0, 3))
MID4_PRODUCT = FractalSpec("product", base_exp=2, digits=(0, 3))


# pure-integer replay of the counter hash and the tree rule
def _mix(z):
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


def _uniform(seed, *fields):
    h = _mix((seed + 0x9E3779B97F4A7C15) & MASK)
    for i, f in enumerate(fields):
        h = _mix(h ^ (((f & MASK) + 0x9E3779B97F4A7C15 * (i + 2)) & MASK))
    return (h >> 11) * 2.0**-53


def _replay_tree(seed, s, r):
    p = 2.0 ** (s - 2.0)
    cells = [(0, 0)]
    for level in range(1, r + 1):
        nxt = []
        for x, y in cells:
            keep = [_uniform(seed, level, x, y, c, 0) < p for c in range(4)]
            if not any(keep):
                keep = [_uniform(seed, level, x, y, c, 1) < p for c in range(4)]
            if not any(keep):
                keep[min(int(_uniform(seed, level, x, y, 4, 2) * 4), 3)] = True
            nxt += [(2 * x + (c & 1), 2 * y + (c >> 1)) for c in range(4) if keep[c]]
        cells = nxt
    return sorted(cells)


def test_counter_rng_matches_integer_replay():
    seeds = [0, 7, 2**64 - 1]
    for seed in seeds:
        for fields in [(1, 2, 3, 0, 0), (12, 4095, 17, 3, 1), (5, -1, 0, 4, 2)]:
            assert uniform(seed, *fields) == _uniform(seed, *fields)
    assert hash64(3, np.arange(4)).shape == (4,)


def test_digit_cantor_counts():
    e = generate(MID4, 8)
    assert len(e) == 16 and e.dim == 1
    assert MID4.declared_dimension == 0.5
    assert e.cells[:, 0].tolist()[:4] == [0, 3, 12, 15]


def test_full_square_and_products():
    assert len(generate(FractalSpec("full_square"), 5)) == 1024
    assert len(generate(MID4_PRODUCT, 8)) == 256
    assert MID4_PRODUCT.declared_dimension == 1.0
    full = CellSet(np.arange(16), 4)
    assert len(product(full, full)) == 256
    b = generate(MID4, 8)
    assert len(product(CellSet([5], 8), b)) == len(b)


def test_random_tree_matches_independent_replay():
    spec = FractalSpec("random_tree", dim=1.0, seed=7)
    e = generate(spec, 12)
    assert [tuple(c) for c in e] == _replay_tree(7, 1.0, 12)
    assert 2**11 <= len(e) <= 2**13


def test_level_counts_agree_with_generation():
    spec = FractalSpec("random_tree", dim=1.585, seed=3)
    counts = level_counts(spec, 10, batch_cells=64)
    e = generate(spec, 10)
    assert counts.tolist() == [len(e.coarsen(r)) for r in range(11)]
    assert level_counts(MID4, 8).tolist() == [len(generate(MID4, 8).coarsen(r)) for r in range(9)]
    assert level_counts(FractalSpec("segment"), 3).tolist() == [1, 2, 4, 8]


@pytest.mark.parametrize(
    "spec, r",
    [
        (MID4, 12),
        (MID4_PRODUCT, 10),
        (FractalSpec("full_square"), 6),
        (FractalSpec("segment"), 9),
        (FractalSpec("random_tree", dim=1.3, seed=11), 11),
        (FractalSpec("random_tree", dim=0.4, seed=2), 11),
    ],
)
def test_refinement_consistency(spec, r):
    e = generate(spec, r)
    for rp in range(r):
        if spec.admissible(rp):
            assert e.coarsen(rp) == generate(spec, rp)


def test_counting_law_for_digit_sets():
    spec = FractalSpec("digit_cantor", base_exp=3, digits=(0, 2, 5))
    for r in range(3, 22, 3):
        assert math.log2(len(generate(spec, r))) / r == pytest.approx(math.log2(3) / 3, abs=1e-12)


def test_invalid_specs():
    with pytest.raises(ValueError):
        FractalSpec("bogus")
    with pytest.raises(ValueError):
        FractalSpec("digit_cantor", base_exp=2, digits=(0, 4))
    with pytest.raises(ValueError):
        FractalSpec("random_tree")
    with pytest.raises(ValueError):
        generate(MID4, 7)
    with pytest.raises(PrecisionError):
        generate(FractalSpec("segment"), 61)


def test_cellset_is_canonical_and_read_only():
    cs = CellSet([[1, 0], [0, 5], [1, 0], [0, 2]], 3)
    assert cs.cells.tolist() == [[0, 2], [0, 5], [1, 0]]
    with pytest.raises(ValueError):
        cs.cells[0, 0] = 9
    assert cs.contains_cell((0, 5)) and not cs.contains_cell((1, 1))


def test_sample_points_examples():
    one = CellSet([[3, 1]], 2)
    pts = sample_points(one, 5, seed=4)
    assert [p.as_tuple() for p in pts] == [(0.875, 0.375)] * 5
    assert sample_points(one, 0) == []
    sq = generate(FractalSpec("full_square"), 3)
    pts = sample_points(sq, 10, seed=1)
    assert len(pts) == 10
    for p in pts:
        x, y = p.as_tuple()
        assert 0 <= x < 1 and 0 <= y < 1
        assert sq.contains_cell((math.floor(x * 8), math.floor(y * 8)))
    with pytest.raises(ValueError):
        sample_points(CellSet(np.empty((0, 2), dtype=np.int64), 2), 1)


def test_dycs_round_trip(tmp_path):
    e = generate(FractalSpec("random_tree", dim=1.2, seed=5), 10)
    path = tmp_path / "e.dycs"
    write_cellset(path, e)
    back = read_cellset(path)
    assert back == e and back.to_bytes() == e.to_bytes()
    data = path.read_bytes()
    assert data[:4] == b"DYCS" and len(data) == 18 + 16 * len(e)
    assert list(tmp_path.iterdir()) == [path]


@pytest.mark.parametrize(
    "mutate",
    [
        lambda b: b[:10],
        lambda b: b"XXXX" + b[4:],
        lambda b: b[:4] + bytes([2]) + b[5:],
        lambda b: b[:-8],
        lambda b: b[:18] + b[34:50] + b[18:34] + b[50:],
    ],
)
def test_dycs_rejects_malformed(mutate):
    data = CellSet([[0, 1], [2, 3], [4, 5]], 4).to_bytes()
    with pytest.raises(ValueError):
        CellSet.from_bytes(mutate(data))


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**64 - 1), st.floats(min_value=0.0, max_value=2.0), st.integers(0, 9))
def test_random_tree_determinism_and_nonempty(seed, s, r):
    spec = FractalSpec("random_tree", dim=s, seed=seed)
    a, b = generate(spec, r), generate(spec, r)
    assert a.to_bytes() == b.to_bytes()
    assert len(a) >= 1
    assert np.all((a.cells >= 0) & (a.cells < 2**r))
