import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.spatial.distance import pdist

from adasamp.core import DesignDomain
from adasamp.doe import (
    TABLE_SETTINGS,
    CapacityError,
    LhsConfig,
    candidate_set,
    corner_points,
    default_sizes,
    extend_lhs,
    lhs,
    lhs_unit,
)


def occupancy_ok(U, m):
    """Every column has exactly one point in each of the m strata."""
    strata = np.minimum(np.floor(U * m).astype(int), m - 1)
    return all(np.array_equal(np.sort(strata[:, d]), np.arange(m)) for d in range(U.shape[1]))


class TestLhs:
    def test_quartiles(self):
        x = np.sort(lhs(DesignDomain([0], [1]), LhsConfig(4, seed=1))[:, 0])
        for j, v in enumerate(x):
            assert j / 4 <= v < (j + 1) / 4

    def test_two_points_opposite(self):
        U = lhs(DesignDomain.unit(2), LhsConfig(2, seed=4))
        s = np.floor(U * 2).astype(int)
        assert np.array_equal(s[0], 1 - s[1])

    def test_deterministic(self):
        dom = DesignDomain([-1, 2], [1, 5])
        assert np.array_equal(lhs(dom, LhsConfig(15, seed=9)), lhs(dom, LhsConfig(15, seed=9)))
        assert not np.array_equal(lhs(dom, LhsConfig(15, seed=9)), lhs(dom, LhsConfig(15, seed=10)))

    @given(st.integers(1, 60), st.integers(1, 6), st.sampled_from(["maximin", "plain"]), st.integers(0, 999))
    def test_marginal_property(self, m, n, criterion, seed):
        U = lhs_unit(m, n, LhsConfig(m, criterion=criterion, n_candidates_internal=3, seed=seed))
        assert U.shape == (m, n) and occupancy_ok(U, m)

    def test_maximin_beats_competitors(self):
        # the same stream drawn plainly reproduces every internal competitor
        cfg = LhsConfig(12, n_candidates_internal=8, seed=3)
        best = pdist(lhs_unit(12, 3, cfg)).min()
        g = np.random.default_rng(np.random.SeedSequence(3))
        for _ in range(8):
            perms = np.argsort(g.random((12, 3)), axis=0)
            U = (perms + g.random((12, 3))) / 12
            assert best >= pdist(U).min()

    def test_maps_to_domain(self):
        dom = DesignDomain([-5, 0], [10, 15])
        X = lhs(dom, LhsConfig(30, seed=0))
        assert np.all(dom.contains(X))

    def test_invalid(self):
        with pytest.raises(ValueError):
            LhsConfig(0)
        with pytest.raises(ValueError):
            LhsConfig(5, criterion="sobol")
        with pytest.raises(ValueError):
            LhsConfig(5, fine_strata=3)


class TestNestedExtension:
    @given(st.integers(2, 20), st.integers(1, 4), st.integers(1, 60), st.integers(0, 999))
    def test_extension_completes_hypercube(self, m0, n, extra, seed):
        total = m0 + extra
        dom = DesignDomain.unit(n)
        X0 = lhs(dom, LhsConfig(m0, seed=seed, fine_strata=total, n_candidates_internal=2))
        assert occupancy_ok(X0, m0)
        ext = extend_lhs(dom, X0, total, seed + 1, n_candidates_internal=2)
        assert ext.shape == (extra, n)
        assert occupancy_ok(np.vstack([X0, ext]), total)

    def test_nothing_to_add(self):
        X0 = lhs(DesignDomain.unit(2), LhsConfig(5, seed=0))
        assert extend_lhs(DesignDomain.unit(2), X0, 5, 0).shape == (0, 2)
        with pytest.raises(ValueError):
            extend_lhs(DesignDomain.unit(2), X0, 4, 0)


class TestCorners:
    def test_1d(self):
        assert corner_points(DesignDomain([0], [1])).tolist() == [[0], [1]]

    def test_2d_order(self):
        assert corner_points(DesignDomain.unit(2)).tolist() == [[0, 0], [0, 1], [1, 0], [1, 1]]

    def test_3d(self):
        dom = DesignDomain([-1, 0, 2], [1, 5, 3])
        C = corner_points(dom)
        assert C.shape == (8, 3) and len({tuple(r) for r in C}) == 8
        assert np.all((C == dom.lower) | (C == dom.upper))

    def test_capacity(self):
        with pytest.raises(CapacityError):
            corner_points(DesignDomain.unit(21))


class TestCandidates:
    @pytest.mark.parametrize("n, m_cand", [(2, 10000), (4, 20000)])
    def test_table_sizes(self, n, m_cand):
        assert default_sizes(n)["m_cand"] == m_cand
        dom = DesignDomain(-np.ones(n), np.ones(n))
        C = candidate_set(dom, m_cand, 0)
        assert C.shape == (m_cand, n) and np.all(dom.contains(C))

    def test_fresh_per_seed(self):
        a = candidate_set(DesignDomain.unit(2), 50, 1)
        b = candidate_set(DesignDomain.unit(2), 50, 2)
        assert not np.array_equal(a, b)

    def test_invalid(self):
        with pytest.raises(ValueError):
            candidate_set(DesignDomain.unit(2), 0, 1)


def test_table_settings():
    assert TABLE_SETTINGS[1] == dict(m_init=10, m_max=40, m_cand=5000, m_test=100000)
    assert TABLE_SETTINGS[2] == dict(m_init=20, m_max=140, m_cand=10000, m_test=100000)
    assert TABLE_SETTINGS[3] == dict(m_init=30, m_max=180, m_cand=15000, m_test=100000)
    assert TABLE_SETTINGS[4] == dict(m_init=40, m_max=250, m_cand=20000, m_test=100000)
    assert TABLE_SETTINGS[6] == dict(m_init=60, m_max=250, m_cand=30000, m_test=100000)
    assert TABLE_SETTINGS[8] == dict(m_init=80, m_max=250, m_cand=40000, m_test=100000)
    assert default_sizes(5)["m_init"] == 50
