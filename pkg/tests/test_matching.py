import itertools

import numpy as np
import pytest

from ashm.construct import fnk_array
from ashm.core import is_permutation_matrix
from ashm.matching import (BipartiteGraph, UnequalLineSums, birkhoff_arrays, birkhoff_decompose,
                           maximum_matching, perfect_matching, regular_zero_one,
                           subpermutation_arrays, term_rank_2d)
from conftest import brute_term_rank_2d
from reference_data import EX43_A3, EX43_A4, EX43_T


def is_matching(pairs):
    return len({u for u, _ in pairs}) == len(pairs) == len({v for _, v in pairs})


class TestMaximumMatching:
    def test_complete(self):
        for n in range(1, 7):
            g = BipartiteGraph(n, n, {(u, v) for u in range(n) for v in range(n)})
            m = maximum_matching(g)
            assert len(m) == n and is_matching(m)

    def test_isolated_vertex(self):
        g = BipartiteGraph(3, 3, {(0, 0), (0, 1), (1, 0), (1, 1)})
        assert len(maximum_matching(g)) == 2

    def test_deterministic(self):
        rng = np.random.default_rng(0)
        mask = rng.random((8, 8)) < 0.4
        g = BipartiteGraph.from_mask(mask)
        assert maximum_matching(g) == maximum_matching(BipartiteGraph.from_mask(mask))

    def test_against_brute_force(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            mask = rng.random((5, 5)) < 0.35
            assert len(maximum_matching(BipartiteGraph.from_mask(mask))) == brute_term_rank_2d(mask)

    def test_hall_for_asm_mates(self):
        from ashm.search import all_asm_arrays
        for a in all_asm_arrays(5):
            assert perfect_matching(a != 1) is not None

    def test_edge_out_of_range(self):
        from ashm.core import AshmError
        with pytest.raises(AshmError):
            BipartiteGraph(2, 2, {(2, 0)})


class TestBirkhoff:
    def test_j(self):
        for n in range(1, 7):
            parts = birkhoff_arrays(np.ones((n, n), dtype=int))
            assert len(parts) == n and all(is_permutation_matrix(p) for p in parts)
            assert np.array_equal(sum(parts), np.ones((n, n)))

    def test_example_t(self):
        parts = birkhoff_arrays(EX43_T)
        assert len(parts) == 2 and np.array_equal(sum(parts), EX43_T)
        # the shown pair is one valid decomposition
        assert np.array_equal(np.array(EX43_A3) + EX43_A4, EX43_T)

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_identity_plus_backdiag(self, n):
        # the support splits into n/2 four-cycles, each split two ways
        eye = np.eye(n, dtype=int)
        m = eye + eye[::-1]
        perms = [eye[list(p)] for p in itertools.permutations(range(n))]
        pairs = {frozenset((a.tobytes(), b.tobytes())) for a in perms for b in perms
                 if np.array_equal(a + b, m)}
        assert len(pairs) == 2 ** (n // 2 - 1)
        found = frozenset(p.tobytes() for p in birkhoff_arrays(m))
        assert found in pairs

    def test_random_regular(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            n = int(rng.integers(2, 9))
            k = int(rng.integers(1, 4))
            m = sum(np.eye(n, dtype=int)[rng.permutation(n)] for _ in range(k))
            parts = birkhoff_arrays(m)
            assert len(parts) == k and np.array_equal(sum(parts), m)
            parts = birkhoff_arrays(m, rng)
            assert len(parts) == k and np.array_equal(sum(parts), m)
            assert all(is_permutation_matrix(p) for p in parts)

    def test_unequal(self):
        with pytest.raises(UnequalLineSums):
            birkhoff_decompose([[1, 1], [0, 1]])

    def test_wrappers(self):
        assert all(p.n == 3 for p in birkhoff_decompose(np.ones((3, 3), dtype=int)))


class TestSubpermutation:
    def check(self, m):
        parts = subpermutation_arrays(m)
        m = np.asarray(m)
        t = max(m.sum(axis=0).max(initial=0), m.sum(axis=1).max(initial=0))
        assert len(parts) == t
        assert np.array_equal(sum(parts, np.zeros_like(m)), m)
        for p in parts:
            assert p.sum(axis=0).max(initial=0) <= 1 and p.sum(axis=1).max(initial=0) <= 1

    def test_permutation(self):
        p = np.eye(4, dtype=int)[[2, 0, 3, 1]]
        assert np.array_equal(subpermutation_arrays(p)[0], p)

    def test_j2(self):
        self.check(np.ones((2, 2), dtype=int))

    def test_f63_minus(self):
        self.check((fnk_array(6, 3) == -1).astype(int))

    def test_random(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            shape = tuple(rng.integers(1, 8, size=2))
            self.check((rng.random(shape) < rng.random()).astype(int))


class TestTermRank2d:
    def test_basic(self):
        assert term_rank_2d(np.eye(5, dtype=int)) == 5
        assert term_rank_2d(np.zeros((3, 3), dtype=int)) == 0

    def test_f53(self):
        # rows 1 and 5 both have their only nonzero in column 3
        assert term_rank_2d(fnk_array(5, 3)) == brute_term_rank_2d(fnk_array(5, 3)) == 4

    def test_random(self):
        rng = np.random.default_rng(4)
        for _ in range(60):
            m = (rng.random((5, 5)) < 0.3).astype(int)
            assert term_rank_2d(m) == brute_term_rank_2d(m)


class TestRegularZeroOne:
    def test_forced_cells(self):
        n = 6
        one = np.zeros((n, n), bool)
        zero = np.zeros((n, n), bool)
        one[0, 0] = one[1, 1] = True
        zero[:, 5] = zero[5, :] = False
        zero[2, 3] = True
        m = regular_zero_one(n, one, zero, 2)
        assert m is not None
        assert (m.sum(axis=0) == 2).all() and (m.sum(axis=1) == 2).all()
        assert m[0, 0] == m[1, 1] == 1 and m[2, 3] == 0

    def test_infeasible(self):
        one = np.zeros((3, 3), bool)
        one[0, :2] = True
        assert regular_zero_one(3, one, np.zeros((3, 3), bool), 1) is None
