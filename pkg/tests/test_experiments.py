import math
from decimal import Decimal, getcontext

import numpy as np
import pytest

from dyadlab.complexity import dimension_estimate, profile
from dyadlab.dyadic import Direction
from dyadlab.errors import DomainError, RegressionError
from dyadlab.experiments import (
    HEURISTIC_NOTE,
    LemmaStressSummary,
    bound_crossover,
    bound_curves,
    fig1_csv,
    fig1_grid,
    half_information_check,
    lemma_stress,
    pinned_distance_study,
    projection_sweep,
    strictly_dominates,
)
from dyadlab.fractals import CellSet, FractalSpec, generate
from dyadlab.selection import SelectionInstance

SQUARE = FractalSpec("full_square")
SEGMENT = FractalSpec("segment")
MID4 = FractalSpec("digit_cantor", base_exp=2, digits=(0, 3))
MID4_PRODUCT = FractalSpec("product", base_exp=2, digits=(0, 3))


def _decimal_curves(s: str):
    """The three bounds evaluated in 40-digit decimal arithmetic."""
    getcontext().prec = 40
    s = Decimal(s)
    sw = (s - 2 + (4 + s * s).sqrt()) / 2
    fs = s * (1 - (2 - s) / (2 * (1 + 2 * s - s * s)))
    return Decimal("0.75") * s, sw, fs


def test_bound_values_at_crossover():
    (p,) = bound_curves([0.47671])
    assert abs(p.sw - 0.26637) < 1e-4
    assert abs(p.fs - 0.26637) < 1e-4
    assert abs(p.ours - 0.35753) < 1e-4


def test_bound_values_at_one():
    (p,) = bound_curves([1.0])
    assert p.ours == 0.75
    assert p.sw == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-15)
    assert p.fs == pytest.approx(0.75, abs=1e-15)


@pytest.mark.parametrize("s", ["0.001", "0.25", "0.47671", "0.8", "0.999"])
def test_bounds_against_high_precision(s):
    (p,) = bound_curves([float(s)])
    ours, sw, fs = _decimal_curves(s)
    assert p.ours == pytest.approx(float(ours), abs=1e-15)
    assert p.sw == pytest.approx(float(sw), abs=1e-15)
    assert p.fs == pytest.approx(float(fs), abs=1e-15)


def test_bound_domain():
    for bad in (0.0, -0.1, 1.01, float("nan")):
        with pytest.raises(DomainError):
            bound_curves([bad])


def test_strict_dominance_and_crossover():
    grid = np.linspace(0.002, 0.998, 512)
    pts = bound_curves(grid)
    assert strictly_dominates(pts)
    assert all(p.ours > p.sw and p.ours > p.fs for p in pts)
    lo, hi = _decimal_curves("0.4766"), _decimal_curves("0.4768")
    assert (lo[1] - lo[2]) * (hi[1] - hi[2]) < 0
    assert 0.4766 <= bound_crossover() <= 0.4768


def test_fig1_csv_is_deterministic():
    a = fig1_csv(bound_curves(fig1_grid(512)), {"seed": 0})
    b = fig1_csv(bound_curves(fig1_grid(512)), {"seed": 0})
    assert a == b
    lines = a.splitlines()
    assert "s,ours,sw,fs" in lines
    header = lines.index("s,ours,sw,fs")
    assert all(line.startswith("#") for line in lines[:header])
    assert len(lines) - header - 1 == 512
    assert lines[-1] == "1,0.75,0.61803398875,0.75"


def test_pindist_circle_around_pin():
    theta = np.linspace(0, 2 * np.pi, 40000, endpoint=False)
    pts = np.stack([0.5 + 0.3 * np.cos(theta), 0.5 + 0.3 * np.sin(theta)], axis=1)
    circle = CellSet(np.floor(pts * 2**14).astype(np.int64), 14)
    rep = pinned_distance_study(circle, pins=[(0.5, 0.5)], declared_dim=1.0)
    assert rep.summary["max_estimate"] < 0.05


def test_pindist_full_square():
    rep = pinned_distance_study(SQUARE, pins=6, r_max=10, seed=2)
    assert all(abs(row[2] - 1.0) < 0.05 for row in rep.rows)
    assert rep.summary["in_regime"] is False
    assert rep.summary["bound_ours"] == 1.5


def test_pindist_report_and_errors():
    rep = pinned_distance_study(MID4_PRODUCT, pins=4, r_max=12, seed=5)
    text = rep.to_csv()
    assert "HEURISTIC" in text
    assert "pin_x,pin_y,dim_est,stderr,r_lo,r_hi,bound_ours" in text
    assert all(row[4:6] == (6, 12) and row[6] == 0.75 for row in rep.rows)
    with pytest.raises(RegressionError):
        pinned_distance_study(MID4_PRODUCT, pins=2, r_max=12, window=(10, 12))
    with pytest.raises(ValueError):
        pinned_distance_study(CellSet(np.empty((0, 2), dtype=np.int64), 8), pins=2)


def test_pindist_threads_do_not_change_output():
    a = pinned_distance_study(MID4_PRODUCT, pins=8, r_max=12, seed=3, threads=1).to_csv()
    b = pinned_distance_study(MID4_PRODUCT, pins=8, r_max=12, seed=3, threads=8).to_csv()
    assert a == b


def test_projection_sweep_square_and_segment():
    rep = projection_sweep(SQUARE, 16, r_max=10)
    assert rep.summary["flagged_count"] == 0
    rep = projection_sweep(SEGMENT, 40, r_max=12)
    assert rep.summary["flagged_angles"] == [0.25, 0.75]
    with pytest.raises(ValueError):
        projection_sweep(SEGMENT, 4, r_max=12)


def test_projection_sweep_jitter_is_seeded():
    a = projection_sweep(MID4_PRODUCT, 16, r_max=10, seed=4, jitter=True)
    b = projection_sweep(MID4_PRODUCT, 16, r_max=10, seed=4, jitter=True, threads=8)
    c = projection_sweep(MID4_PRODUCT, 16, r_max=10, seed=5, jitter=True)
    assert a.to_csv() == b.to_csv()
    assert [r[0] for r in a.rows] != [r[0] for r in c.rows]
    assert all(k / 16 <= row[0] < (k + 1) / 16 for k, row in enumerate(a.rows))


def test_half_information_examples():
    row = half_information_check(generate(SQUARE, 12), Direction(0.1), 12, 6)
    assert row.rhs == 6.0 and abs(row.slack) < 0.05
    row = half_information_check(generate(SEGMENT, 12), Direction(0.0), 12, 6)
    assert (row.lhs, row.rhs) == (6.0, 3.0)
    with pytest.raises(ValueError):
        half_information_check(generate(SEGMENT, 12), Direction(0.0), 6, 6)


def test_half_information_far_pins():
    e = generate(MID4_PRODUCT, 20)
    pins = [(3 * math.cos(2 * math.pi * k / 32), 3 * math.sin(2 * math.pi * k / 32)) for k in range(32)]
    slack = np.array([half_information_check(e, p, 20, 10).slack for p in pins])
    assert np.all(np.isfinite(slack))
    assert slack.shape == (32,)


def test_adversarial_instance_is_skipped():
    # cap is (1/4)(1/4)*16 = 1; exactly one pair (d=0, v=0) carries two similar elements
    n_v, n_x = 16, 4
    dense = np.zeros((n_x, n_v, n_v), dtype=bool)
    dense[0, [0, 1], 0] = True
    inst = SelectionInstance(np.ones((n_v, n_x), dtype=bool), "1/2", dense=dense)
    summary = LemmaStressSummary()
    summary.record(inst)
    assert (summary.tried, summary.skipped, summary.passed) == (1, 1, 0)
    dense[0, 1, 0] = False
    summary.record(SelectionInstance(np.ones((n_v, n_x), dtype=bool), "1/2", dense=dense))
    assert summary.passed == 1


def test_lemma_stress_small_run():
    s = lemma_stress(trials=200, seed=9, max_x=12, max_v=12, small_cap=(3, 3), small_trials=10)
    assert s.ok and s.tried == s.passed + s.skipped
    assert s.passed > 0


def test_monotone_resolution_on_digit_cantor():
    e = generate(MID4, 24)
    target = MID4.declared_dimension
    ests = [dimension_estimate(profile(e.coarsen(r)), (r // 2, r)) for r in range(12, 25, 2)]
    assert all(abs(est.slope - target) <= est.stderr for est in ests)
    errs = [est.stderr for est in ests]
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_heuristic_label_present():
    rep = projection_sweep(SEGMENT, 8, r_max=10)
    assert rep.metadata()["label"] == HEURISTIC_NOTE
