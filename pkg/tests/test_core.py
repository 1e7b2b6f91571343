import numpy as np
import pytest

from ashm.construct import diamond, fnk, fnk_array
from ashm.core import (AltKind, Ashm, BadLineSum, BadVerticalSum, EntryError, IndexOutOfRange,
                       NotAlternating, PlaneKind, ShapeError, SignHypermatrix, SignMatrix,
                       SymmetryElement, all_symmetries, alternating_kind, apply_symmetry, as_array,
                       extract_plane, is_ashm, is_pashm, is_semi_asm, sigma_counts, sign_disjoint,
                       structure_predicates, validate_ashm, validate_asm, validate_pashm)
from conftest import oracle_is_ashm
from reference_data import ASHM_L3, F63, PASHM_EQ2, SEMI_EX410


def hyper(planes):
    return SignHypermatrix.from_planes(planes)


class TestAlternatingKind:
    def test_full(self):
        assert alternating_kind((0, 1, -1, 1, 0)) is AltKind.FULL

    def test_one_star_only(self):
        assert alternating_kind((1, -1)) is AltKind.ONE_STAR

    def test_star_one_only(self):
        assert alternating_kind((-1, 1)) is AltKind.STAR_ONE

    def test_zero_is_both(self):
        assert alternating_kind((0, 0, 0)) is AltKind.ONE_STAR_AND_STAR_ONE

    def test_neither(self):
        assert alternating_kind((1, 1)) is AltKind.NEITHER
        assert alternating_kind((-1,)) is AltKind.NEITHER

    def test_full_needs_sum_one(self):
        # (1,*) and (*,1) but sum 1 is automatic for alternating nonzero lines
        assert alternating_kind((1, 0, -1, 0, 1)) is AltKind.FULL


class TestSignMatrix:
    def test_rejects_bad_entries(self):
        with pytest.raises(EntryError):
            SignMatrix([[2, 0], [0, 1]])

    def test_entries_read_only(self):
        m = SignMatrix(np.eye(2, dtype=int))
        with pytest.raises(ValueError):
            m.entries[0, 0] = 0

    def test_equality_and_hash(self):
        a, b = SignMatrix([[1, 0], [0, 1]]), SignMatrix(np.eye(2, dtype=int))
        assert a == b and hash(a) == hash(b)


class TestValidateAsm:
    def test_identity(self):
        assert validate_asm(np.eye(3, dtype=int)).n == 3

    def test_f63_display(self):
        assert validate_asm(F63).n == 6

    def test_semi_asm_is_not_asm(self):
        with pytest.raises(NotAlternating) as err:
            validate_asm(SEMI_EX410)
        assert err.value.info["line"] == "row"
        assert err.value.info["index"] == 3

    def test_bad_sum_reported(self):
        with pytest.raises(BadLineSum):
            validate_asm([[0, 0], [0, 1]])

    def test_not_square(self):
        with pytest.raises(ShapeError):
            validate_asm([[1, 0, 0], [0, 1, 0]])

    def test_error_serializes(self):
        with pytest.raises(NotAlternating) as err:
            validate_asm([[1, 1], [0, 1]])
        d = err.value.to_dict()
        assert d["error"] == "NotAlternating" and d["index"] == 1


class TestValidateAshm:
    def test_l3(self):
        assert validate_ashm(hyper(ASHM_L3)).n == 3

    def test_pashm_eq2_is_not_ashm(self):
        with pytest.raises(NotAlternating):
            validate_ashm(hyper(PASHM_EQ2))

    def test_permutation_hypermatrix(self):
        from ashm.construct import cyclic_latin_square, latin_to_hypermatrix
        for n in range(1, 7):
            assert is_ashm(latin_to_hypermatrix(cyclic_latin_square(n)))

    def test_matches_oracle_on_perturbations(self):
        rng = np.random.default_rng(5)
        base = as_array(diamond(4))
        for _ in range(200):
            h = base.copy()
            i, j, k = rng.integers(0, 4, size=3)
            h[i, j, k] = rng.choice([-1, 0, 1])
            assert is_ashm(h) == oracle_is_ashm(h)


class TestValidatePashm:
    def test_eq2(self):
        assert validate_pashm(hyper(PASHM_EQ2)).n == 4

    def test_ashm_is_pashm(self):
        assert is_pashm(hyper(ASHM_L3))

    def test_stacked_identities(self):
        eye = np.eye(3, dtype=int)
        with pytest.raises(BadVerticalSum):
            validate_pashm(np.stack([eye] * 3, axis=2))


class TestSemiAsm:
    def test_example(self):
        assert is_semi_asm(SEMI_EX410)

    def test_asm(self):
        assert is_semi_asm(F63)

    def test_j2(self):
        assert not is_semi_asm(np.ones((2, 2), dtype=int))


class TestPlanes:
    @pytest.mark.parametrize("kind", list(PlaneKind))
    def test_diamond_planes_are_fnk(self, kind):
        d = diamond(6)
        for k in range(1, 7):
            assert extract_plane(d, kind, k) == fnk(6, k)

    def test_intersection_consistency(self):
        h = as_array(diamond(5))
        rng = np.random.default_rng(0)
        for _ in range(20):
            i, k = rng.integers(1, 6, size=2)
            hor = as_array(extract_plane(h, "horizontal", k))
            rv = as_array(extract_plane(h, "row_vertical", i))
            assert np.array_equal(hor[i - 1], rv[k - 1])

    def test_downward_flips_layers(self):
        h = as_array(diamond(4))
        up = as_array(extract_plane(h, "row_vertical", 2))
        down = as_array(extract_plane(h, "row_vertical", 2, downward=True))
        assert np.array_equal(up[::-1], down)

    def test_index_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            extract_plane(diamond(3), "horizontal", 4)


class TestSigma:
    def test_f63(self):
        assert tuple(sigma_counts(F63)) == (12, 6, 18)

    def test_d4_total(self):
        assert sigma_counts(diamond(4)).total == 24

    def test_identity(self):
        assert tuple(sigma_counts(np.eye(5, dtype=int))) == (5, 0, 5)

    def test_plus_minus_difference(self, random_ashms):
        for h in random_ashms:
            s = sigma_counts(h)
            assert s.plus - s.minus == h.shape[0] ** 2


class TestSymmetry:
    def test_group_size(self):
        assert len(set(all_symmetries())) == 48

    def test_identity(self):
        a = validate_ashm(hyper(ASHM_L3))
        assert apply_symmetry(a, SymmetryElement()) == a

    def test_reverse_layers(self):
        a = diamond(5)
        g = SymmetryElement((0, 1, 2), (False, False, True))
        out = apply_symmetry(a, g)
        assert [p.tolist() for p in out.planes] == [p.tolist() for p in reversed(a.planes)]

    def test_orbit_closed(self):
        a = as_array(validate_ashm(hyper(ASHM_L3)))
        orbit = {g.act(a).tobytes() for g in all_symmetries()}
        assert 48 % len(orbit) == 0
        for g in all_symmetries():
            for img in list(orbit):
                arr = np.frombuffer(img, dtype=a.dtype).reshape(a.shape)
                assert g.act(arr).tobytes() in orbit

    def test_group_action(self):
        rng = np.random.default_rng(1)
        h = rng.integers(-1, 2, size=(3, 3, 3))
        gs = all_symmetries()
        for g1 in gs:
            for g2 in gs:
                assert np.array_equal(g2.act(g1.act(h)), g2.after(g1).act(h))

    def test_inverse(self):
        for g in all_symmetries():
            assert g.inverse().after(g) == SymmetryElement()


class TestStructure:
    def test_fnk_convex(self):
        for n in range(1, 9):
            for k in range(1, n + 1):
                assert structure_predicates(fnk_array(n, k)).convex

    def test_sign_disjoint_identity_backdiag(self):
        # odd orders share the centre cell
        for n in range(2, 8):
            assert sign_disjoint(np.eye(n, dtype=int), np.eye(n, dtype=int)[::-1]) == (n % 2 == 0)

    def test_near_permutation(self):
        assert structure_predicates(F63).near_permutation is False
        assert structure_predicates(fnk_array(5, 2)).near_permutation

    def test_minus_convex(self):
        assert structure_predicates(F63).minus_convex
        m = np.zeros((6, 6), dtype=int)
        m[0] = (1, -1, 0, 1, -1, 1)
        assert not structure_predicates(m).minus_convex

    def test_even_zero_lines_for_sign_disjoint_pairs(self):
        from ashm.search import all_asm_arrays
        asms = all_asm_arrays(4)
        for x in asms:
            for y in asms:
                if sign_disjoint(x, y):
                    assert structure_predicates(x, y).even_zero_lines


class TestPlaneCounts:
    def test_prefix_sums_regular(self, random_ashms):
        for h in random_ashms:
            s = np.cumsum(h, axis=2)
            n = h.shape[0]
            for k in range(n):
                assert set(np.unique(s[:, :, k])) <= {0, 1}
                assert (s[:, :, k].sum(axis=0) == k + 1).all() and (s[:, :, k].sum(axis=1) == k + 1).all()

    def test_every_ashm_is_ashm_wrapper(self, random_ashms):
        for h in random_ashms:
            assert isinstance(validate_ashm(h), Ashm)
