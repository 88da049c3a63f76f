import csv

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from adasamp.metrics import (
    SUMMARY_COLUMNS,
    RunScore,
    UndefinedMetricError,
    aggregate,
    average_ranks,
    binned_means,
    iqd,
    r2,
    r2_area,
    write_rank_table_csv,
    write_summary_csv,
)

unit = st.floats(0, 1, allow_nan=False)


def monotone_history(g, s):
    return np.maximum.accumulate(np.clip(1 - np.exp(-np.arange(s + 1) / g.uniform(2, 50))
                                         + g.normal(0, 0.05, s + 1), 0, 1))


class TestR2:
    def test_examples(self):
        y = np.array([1.0, 2.0, 3.0])
        assert r2(y, y) == 1.0
        assert r2(y, np.full(3, y.mean())) == 0.0
        assert r2(y, [1, 2, 4]) == pytest.approx(0.5, abs=1e-12)

    def test_unbounded_below(self):
        assert r2([0, 1], [10, -10]) < -100

    def test_errors(self):
        with pytest.raises(UndefinedMetricError):
            r2([2, 2, 2], [1, 2, 3])
        with pytest.raises(UndefinedMetricError):
            r2([1], [1])
        with pytest.raises(ValueError):
            r2([1, 2], [1, 2, 3])

    @given(st.integers(0, 2 ** 31), st.floats(-50, 50).filter(lambda a: abs(a) > 1e-2), st.floats(-100, 100))
    def test_affine_invariance(self, seed, a, b):
        g = np.random.default_rng(seed)
        y, yh = g.normal(size=20), g.normal(size=20)
        assert abs(r2(a * y + b, a * yh + b) - r2(y, yh)) <= 1e-12 * max(1.0, abs(r2(y, yh)))


class TestR2Area:
    def test_examples(self):
        assert r2_area([1.0] * 7) == 1.0
        assert r2_area([0, 1, 1]) == pytest.approx(5 / 6, abs=1e-12)
        assert r2_area([0, 1]) == pytest.approx(0.5, abs=1e-12)

    def test_odd_uses_first_interval_trapezoid(self):
        h = [0.2, 0.4, 0.5, 0.9]
        expected = ((0.2 + 0.4) / 2 + (0.4 + 4 * 0.5 + 0.9) / 3) / 3
        assert r2_area(h) == pytest.approx(expected, abs=1e-12)

    def test_too_short(self):
        with pytest.raises(ValueError):
            r2_area([0.5])

    @given(unit, st.integers(1, 300))
    def test_constant(self, c, s):
        assert abs(r2_area(np.full(s + 1, c)) - c) <= 1e-12

    @given(arrays(float, st.integers(2, 200), elements=unit))
    def test_bounded(self, h):
        h = np.maximum.accumulate(h)
        assert -1e-12 <= r2_area(h) <= 1 + 1e-12

    def test_quadrature_oracle(self):
        g = np.random.default_rng(0)
        for _ in range(100):
            s = int(g.integers(29, 250))
            h = monotone_history(g, s)
            fine = np.linspace(0, s, 50 * s + 1)
            ref = np.trapezoid(np.interp(fine, np.arange(s + 1), h), fine) / s
            assert abs(r2_area(h) - ref) <= 0.01


class TestRanks:
    def test_average_ties(self):
        np.testing.assert_array_equal(average_ranks([0.9, 0.8, 0.9]), [1.5, 3, 1.5])

    @given(arrays(float, st.integers(1, 12), elements=st.sampled_from([0.1, 0.5, 0.7, 0.9])))
    def test_rank_sum(self, v):
        k = v.size
        assert average_ranks(v).sum() == pytest.approx(k * (k + 1) / 2)


def test_binned_means_and_iqd():
    np.testing.assert_allclose(binned_means(np.arange(10.0)), [0.5, 2.5, 4.5, 6.5, 8.5])
    assert np.isnan(binned_means([1.0, 2.0, 3.0])).sum() == 2
    assert iqd(np.array([1.0, 2.0, 3.0, 4.0, 5.0])) == pytest.approx(2.0)


def _scores(strategies, reps=3, f=lambda s, r: 0.5):
    out = []
    for fn in ("branin", "himmelblau"):
        for rep in range(reps):
            for s in strategies:
                v = f(s, rep)
                out.append(RunScore(fn, 2, s, rep, np.linspace(0, v, 21)))
    return out


class TestAggregate:
    def test_single_strategy(self):
        summary = aggregate(_scores(["guess"]))
        assert all(r["rank_r2"] == 1 and r["rank_r2area"] == 1 for r in summary.rows)

    def test_dominance(self):
        summary = aggregate(_scores(["guess", "lhs"], f=lambda s, r: 0.9 if s == "guess" else 0.5))
        t = {row["strategy"]: row for row in summary.rank_table}
        assert t["guess"]["mean_rank_r2"] == 1.0 and t["lhs"]["mean_rank_r2"] == 2.0
        assert t["guess"]["se_rank_r2"] == 0.0 and t["lhs"]["se_rank_r2area"] == 0.0
        assert t["guess"]["n"] == 6

    def test_curves_and_bins(self):
        summary = aggregate(_scores(["guess", "tead"], f=lambda s, r: 0.5 + 0.1 * r))
        med = summary.median_curves[("branin", "guess")]
        np.testing.assert_allclose(med, np.linspace(0, 0.6, 21))
        assert summary.iqd_bins[("dim2", "tead")].shape == (5,)

    def test_empty(self):
        with pytest.raises(ValueError):
            aggregate([])

    def test_csv(self, tmp_path):
        summary = aggregate(_scores(["guess", "lhs"], f=lambda s, r: 1 / 3 if s == "guess" else 0.25))
        write_summary_csv(summary, tmp_path / "s.csv")
        write_rank_table_csv(summary, tmp_path / "r.csv")
        rows = list(csv.reader(open(tmp_path / "s.csv")))
        assert tuple(rows[0]) == SUMMARY_COLUMNS
        assert "0.3333333333" in [c for row in rows[1:] for c in row]
        assert len(rows) == 1 + 12
        assert open(tmp_path / "r.csv").readline().startswith("strategy,n,mean_r2")
