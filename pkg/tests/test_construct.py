import numpy as np
import pytest

from ashm.construct import (DiamondSpec, NotPermutationHypermatrix, SpecOutOfRange, TruncationSpec,
                            corridor_positions, cyclic_latin_square, diamond, fkrs, fkrs_array, fnk,
                            fnk_array, hypermatrix_to_latin, is_latin_square, latin_to_hypermatrix,
                            truncation_for)
from ashm.core import IndexOutOfRange, as_array, is_asm, is_ashm, is_permutation_hypermatrix, sigma_counts
from conftest import oracle_is_asm, oracle_is_ashm
from reference_data import D5, F8_512, F8_520, F63, LATIN_3, PERM_HYPER_3


def planes(h):
    return [p.tolist() for p in h.planes]


class TestFnk:
    def test_f63_display(self):
        assert fnk(6, 3).tolist() == F63

    def test_ends(self):
        for n in range(1, 8):
            assert np.array_equal(fnk_array(n, 1), np.eye(n, dtype=int))
            assert np.array_equal(fnk_array(n, n), np.eye(n, dtype=int)[::-1])

    def test_f53_counts(self):
        s = sigma_counts(fnk(5, 3))
        assert s.total == 13 and s.minus == 4

    def test_all_valid(self):
        for n in range(1, 13):
            for k in range(1, n + 1):
                assert oracle_is_asm(fnk_array(n, k))

    def test_sigma_formulas(self):
        for n in range(1, 13):
            for k in range(1, n + 1):
                kk = k if 2 * k <= n else n - k + 1
                s = sigma_counts(fnk_array(n, k))
                assert (s.plus, s.minus) == (kk * (n - kk + 1), (kk - 1) * (n - kk))

    def test_row_nonzero_counts(self):
        for n in range(1, 11):
            for k in range(1, n + 1):
                f = fnk_array(n, k)
                for i in range(1, n + 1):
                    assert (f[i - 1] != 0).sum() == 2 * min(i, k, n + 1 - i, n + 1 - k) - 1

    def test_bad_k(self):
        with pytest.raises(IndexOutOfRange):
            fnk(4, 5)


class TestDiamond:
    def test_example_planes(self):
        assert planes(diamond(5)) == D5

    def test_sigma(self):
        for n in range(1, 13):
            assert sigma_counts(diamond(n)).total == n * (n * n + 2) // 3
        assert [sigma_counts(diamond(n)).total for n in (3, 4, 5)] == [11, 24, 45]

    def test_valid_to_12(self):
        for n in range(1, 13):
            assert oracle_is_ashm(as_array(diamond(n)))

    def test_descending(self):
        d = diamond(DiamondSpec(4, "descending"))
        assert planes(d) == planes(diamond(4))[::-1]

    def test_l3(self):
        assert planes(diamond(3)) == [[[1, 0, 0], [0, 1, 0], [0, 0, 1]], [[0, 1, 0], [1, -1, 1], [0, 1, 0]],
                                      [[0, 0, 1], [0, 1, 0], [1, 0, 0]]]

    def test_bad_order(self):
        with pytest.raises(SpecOutOfRange):
            DiamondSpec(0)


class TestFkrs:
    def test_example_520(self):
        assert fkrs(8, 5, 2, 0).tolist() == F8_520

    def test_example_512(self):
        assert fkrs(8, 5, 1, 2).tolist() == F8_512

    def test_no_truncation(self):
        for n in range(3, 9):
            for k in range(2, n):
                assert np.array_equal(fkrs_array(TruncationSpec(n, k)), fnk_array(n, k))

    def test_minus_counts_to_10(self):
        for n in range(3, 11):
            for k in range(2, n):
                for r in range(k):
                    for s in range(n - k):
                        if r == k - 1 and s > 0:
                            continue
                        spec = TruncationSpec(n, k, r, s)
                        a = fkrs_array(spec)
                        assert oracle_is_asm(a), spec
                        assert sigma_counts(a).minus == spec.minus_count == (k - r - 1) * (n - k) - s

    def test_changes_relative_to_fnk(self):
        # zeros appear outside the corridor, ones inside it
        for n in range(3, 10):
            for k in range(2, n):
                corridor = corridor_positions(n, k)
                for r in range(k):
                    for s in range(n - k):
                        if r == k - 1 and s > 0:
                            continue
                        diff = fkrs_array(TruncationSpec(n, k, r, s)) - fnk_array(n, k)
                        for i, j in np.argwhere(diff != 0).tolist():
                            was = fnk_array(n, k)[i, j]
                            if (i + 1, j + 1) in corridor and was == 0:
                                assert diff[i, j] == 1
                            else:
                                assert fkrs_array(TruncationSpec(n, k, r, s))[i, j] == 0 or was == 0

    @pytest.mark.parametrize("args", [(5, 1, 0, 0), (5, 5, 0, 0), (5, 3, 3, 0), (5, 3, 0, 2), (6, 3, 2, 1)])
    def test_out_of_range(self, args):
        with pytest.raises(SpecOutOfRange):
            TruncationSpec(*args)

    def test_truncation_for_inverts(self):
        for n in range(3, 11):
            for k in range(2, n):
                for t in range(1, (k - 1) * (n - k) + 1):
                    assert sigma_counts(fkrs(truncation_for(n, k, t))).minus == t


class TestCorridor:
    def test_k85(self):
        assert corridor_positions(8, 5) == {(1, 5), (2, 6), (3, 7), (4, 8), (5, 1), (6, 2), (7, 3), (8, 4)}

    def test_k1_is_diagonal(self):
        assert corridor_positions(5, 1) == {(i, i) for i in range(1, 6)}


class TestLatin:
    def test_display(self):
        h = latin_to_hypermatrix(LATIN_3)
        assert planes(h) == PERM_HYPER_3
        assert hypermatrix_to_latin(h).tolist() == LATIN_3

    def test_two(self):
        assert planes(latin_to_hypermatrix([[1, 2], [2, 1]])) == [[[1, 0], [0, 1]], [[0, 1], [1, 0]]]

    def test_round_trip(self):
        for n in range(1, 7):
            for shift in range(n):
                sq = cyclic_latin_square(n, shift)
                assert np.array_equal(hypermatrix_to_latin(latin_to_hypermatrix(sq)), sq)

    def test_permutation_iff_latin(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            sq = rng.integers(1, 4, size=(3, 3))
            assert is_permutation_hypermatrix(latin_to_hypermatrix(sq)) == is_latin_square(sq)
            assert is_ashm(latin_to_hypermatrix(sq)) == is_latin_square(sq)

    def test_inverse_needs_permutation_hypermatrix(self):
        with pytest.raises(NotPermutationHypermatrix):
            hypermatrix_to_latin(diamond(3))
