"""Generalized Latin squares of ASHMs, weighted projections and majorization."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .construct import cyclic_latin_square, is_latin_square, latin_to_hypermatrix
from .core import (AshmError, SignHypermatrix, as_array, is_permutation_matrix, validate_ashm,
                   validate_pashm, zn)

__all__ = [
    "EntryOutOfRange", "LengthMismatch", "NotLatin", "GenLatinSquare", "MajorizationKind",
    "MajorizationReport", "Verdict", "latin_of", "zero_one_decomposition", "weighted_projections",
    "majorize", "check_ls_row_majorization", "is_latin_square", "reconstruct_if_latin",
    "projection_forces_permutation", "constant_line_report", "validate_lemma_3_2_bounds",
]


class EntryOutOfRange(AshmError):
    pass


class LengthMismatch(AshmError):
    pass


class NotLatin(AshmError):
    pass


@dataclass(frozen=True, eq=False)
class GenLatinSquare:
    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise AshmError(f"generalized Latin square must be square, got shape {arr.shape}")
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def tolist(self):
        return self.entries.tolist()

    def __array__(self, dtype=None, copy=None):
        return self.entries.astype(dtype or np.int64)

    def __eq__(self, other):
        try:
            return np.array_equal(self.entries, np.asarray(other))
        except Exception:
            return NotImplemented

    def __hash__(self):
        return hash(self.entries.tobytes())


class MajorizationKind(str, enum.Enum):
    STANDARD = "standard"
    LEADING = "leading"
    LINE = "line"


@dataclass(frozen=True)
class MajorizationReport:
    kind: MajorizationKind
    holds: bool
    # 1-based; None when the relation holds
    prefix: int | None = None
    line: str | None = None
    index: int | None = None

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class Verdict:
    applies: bool
    holds: bool
    detail: list = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.holds


def latin_of(a) -> GenLatinSquare:
    """L(A) = 1*A_1 + 2*A_2 + ... + n*A_n. Accepts PASHMs, so entries may exceed n."""
    arr = as_array(validate_pashm(a))
    weights = np.arange(1, arr.shape[2] + 1)
    return GenLatinSquare(arr @ weights)


def zero_one_decomposition(square) -> list[np.ndarray]:
    arr = np.asarray(square, dtype=np.int64)
    n = arr.shape[0]
    bad = np.argwhere((arr < 1) | (arr > n))
    if bad.size:
        i, j = (int(x) + 1 for x in bad[0])
        raise EntryOutOfRange(f"entry {int(arr[i - 1, j - 1])} at ({i},{j}) is outside 1..{n}",
                              i=i, j=j, value=int(arr[i - 1, j - 1]))
    return [(arr == k).astype(np.int64) for k in range(1, n + 1)]


def weighted_projections(a) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(v, h) with v = A z (row weights) and h = A^T z (column weights), z = (n, ..., 1).

    For a permutation matrix the two are inverse permutations up to reversal,
    so either one determines the matrix.
    """
    arr = as_array(a)
    z = zn(arr.shape[0])
    return tuple((arr @ z).tolist()), tuple((arr.T @ z).tolist())


def _prefix_violation(x: np.ndarray, y: np.ndarray) -> int | None:
    px, py = np.cumsum(x), np.cumsum(y)
    over = np.flatnonzero(px > py)
    if over.size:
        return int(over[0]) + 1
    if px[-1] != py[-1]:
        return len(x)
    return None


def majorize(x, y, kind: MajorizationKind | str = MajorizationKind.STANDARD) -> MajorizationReport:
    """Is x majorized by y? ``line`` compares every row and column of two matrices."""
    kind = MajorizationKind(kind)
    x, y = np.asarray(x, dtype=np.int64), np.asarray(y, dtype=np.int64)
    if x.shape != y.shape:
        raise LengthMismatch(f"shapes differ: {x.shape} vs {y.shape}")
    if kind is MajorizationKind.LINE:
        if x.ndim != 2:
            raise LengthMismatch("line majorization needs two matrices")
        for name, xs, ys in (("row", x, y), ("column", x.T, y.T)):
            for i, (u, v) in enumerate(zip(xs, ys)):
                p = _prefix_violation(np.sort(u)[::-1], np.sort(v)[::-1])
                if p is not None:
                    return MajorizationReport(kind, False, p, name, i + 1)
        return MajorizationReport(kind, True)
    if x.ndim != 1:
        raise LengthMismatch("standard and leading majorization compare vectors")
    if kind is MajorizationKind.STANDARD:
        x, y = np.sort(x)[::-1], np.sort(y)[::-1]
    p = _prefix_violation(x, y)
    return MajorizationReport(kind, p is None, p)


def check_ls_row_majorization(a) -> MajorizationReport:
    """Every row and column of L(A) against z_n, i.e. L(A) line-majorized by L of a permutation."""
    square = latin_of(validate_ashm(a)).entries
    n = square.shape[0]
    # the reference is any Latin square: all of its lines are permutations of z_n
    return majorize(square, cyclic_latin_square(n), MajorizationKind.LINE)


def reconstruct_if_latin(a) -> SignHypermatrix:
    """Peel the permutation planes P_r = [L == r] and confirm they are the planes of ``a``."""
    ashm = validate_ashm(a)
    square = latin_of(ashm).entries
    if not is_latin_square(square):
        raise NotLatin("L(A) is not a Latin square")
    arr = as_array(ashm)
    for r, q in enumerate(zero_one_decomposition(square), start=1):
        if not (is_permutation_matrix(q) and np.array_equal(arr[:, :, r - 1], q)):
            raise AssertionError(f"plane {r} differs from the entries equal to {r}")
    return latin_to_hypermatrix(square)


def projection_forces_permutation(a, target=None) -> Verdict:
    """If v(A) equals the projection of a permutation matrix P then A = P.

    ``target`` defaults to v(A). A target that is not a permutation of 1..n
    makes the check vacuous.
    """
    arr = as_array(a)
    n = arr.shape[0]
    v = np.asarray(weighted_projections(arr)[0])
    target = v if target is None else np.asarray(target, dtype=np.int64)
    if not np.array_equal(np.sort(target), np.arange(1, n + 1)):
        return Verdict(False, True, ["target is not a permutation vector"])
    if not np.array_equal(v, target):
        return Verdict(False, True, ["v(A) differs from the target"])
    p = np.zeros((n, n), dtype=np.int64)
    p[np.arange(n), n - target] = 1
    holds = np.array_equal(arr, p)
    return Verdict(True, holds, [] if holds else ["A is not the permutation matrix with this projection"])


def constant_line_report(square) -> list[tuple[str, int, int]]:
    """Constant rows and columns as (kind, 1-based index, value)."""
    arr = np.asarray(square)
    out = []
    for name, lines in (("row", arr), ("column", arr.T)):
        for i, line in enumerate(lines):
            if (line == line[0]).all():
                out.append((name, i + 1, int(line[0])))
    return out


def validate_lemma_3_2_bounds(a) -> Verdict:
    """Per-cell bounds relating l_ij to the positions of the nonzeros of the vertical line."""
    arr = as_array(validate_ashm(a))
    n = arr.shape[0]
    square = latin_of(arr).entries
    bad = []
    for i in range(n):
        for j in range(n):
            line = arr[i, j]
            pos = np.flatnonzero(line) + 1
            r = int(square[i, j])
            checks = {
                "range": pos[0] <= r <= pos[-1],
                "count": len(pos) <= min(2 * r - 1, 2 * (n - r) + 1),
                "first": r != 1 or list(pos) == [1],
                "last": r != n or list(pos) == [n],
            }
            bad += [{"i": i + 1, "j": j + 1, "check": c} for c, ok in checks.items() if not ok]
    return Verdict(True, not bad, bad)
