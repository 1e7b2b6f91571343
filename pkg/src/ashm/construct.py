"""Deterministic constructors: F_n^k, diamonds, truncated F^{k,r,s}, Latin squares."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import (AshmError, Ashm, Asm, IndexOutOfRange, SignHypermatrix, SignMatrix,
                   as_array, is_permutation_hypermatrix)


class SpecOutOfRange(AshmError):
    pass


class NotPermutationHypermatrix(AshmError):
    pass


class Orientation(str, enum.Enum):
    ASCENDING = "ascending"
    DESCENDING = "descending"


@dataclass(frozen=True)
class DiamondSpec:
    n: int
    orientation: Orientation = Orientation.ASCENDING

    def __post_init__(self):
        if self.n < 1:
            raise SpecOutOfRange(f"diamond order must be positive, got {self.n}", n=self.n)
        object.__setattr__(self, "orientation", Orientation(self.orientation))


@dataclass(frozen=True)
class TruncationSpec:
    n: int
    k: int
    r: int = 0
    s: int = 0

    def __post_init__(self):
        n, k, r, s = self.n, self.k, self.r, self.s
        ok = 1 < k < n and 0 <= r < k and 0 <= s < n - k
        # r = k-1 leaves no negative diagonal for step (iii) to trim
        if ok and r == k - 1 and s > 0:
            ok = False
        if not ok:
            raise SpecOutOfRange(f"(n,k,r,s)=({n},{k},{r},{s}) outside 1<k<n, 0<=r<k, 0<=s<n-k",
                                 n=n, k=k, r=r, s=s)

    @property
    def minus_count(self) -> int:
        return (self.k - self.r - 1) * (self.n - self.k) - self.s


def fnk_array(n: int, k: int) -> np.ndarray:
    if not 1 <= k <= n:
        raise IndexOutOfRange(f"k={k} not in 1..{n}", n=n, k=k)
    i, j = np.indices((n, n)) + 1
    inside = (np.abs(i - j) <= k - 1) & (i + j >= k + 1) & (i + j <= 2 * n - k + 1)
    sign = np.where((i + j - k - 1) % 2 == 0, 1, -1)
    return np.where(inside, sign, 0).astype(np.int64)


def fnk(n: int, k: int) -> Asm:
    """The convex ASM F_n^k bounded by +1 stripes through (1,k), (k,1), (n,n-k+1), (n+1-k,n)."""
    return Asm(SignMatrix(fnk_array(n, k)))


def diamond_array(n: int, orientation=Orientation.ASCENDING) -> np.ndarray:
    planes = [fnk_array(n, k) for k in range(1, n + 1)]
    if Orientation(orientation) is Orientation.DESCENDING:
        planes.reverse()
    return np.stack(planes, axis=2)


def diamond(spec: DiamondSpec | int, orientation=Orientation.ASCENDING) -> Ashm:
    if not isinstance(spec, DiamondSpec):
        spec = DiamondSpec(int(spec), orientation)
    return Ashm(SignHypermatrix(diamond_array(spec.n, spec.orientation)))


def positive_diagonal(n: int, k: int, j: int) -> list[tuple[int, int]]:
    """Positions (1-based) of the j-th positive diagonal of F_n^k, top to bottom."""
    return [(j + t, k - j + 1 + t) for t in range(n - k + 1)]


def negative_diagonal(n: int, k: int, j: int) -> list[tuple[int, int]]:
    return [(j + 1 + t, k - j + 1 + t) for t in range(n - k)]


def _compensating_ones(n: int, k: int, r: int) -> list[tuple[int, int]]:
    p = n - k
    if p % 2 == 0:
        return [(i, n - i + 1) for i in range(1, r + 1)]
    out = []
    for i in range(1, r + 1):
        if r % 2 == 1:
            col = n if i == 1 else (n - i if i % 2 == 0 else n - i + 2)
        else:
            col = n - i if i % 2 == 1 else n - i + 2
        out.append((i, col))
    return out


def fkrs_array(spec: TruncationSpec) -> np.ndarray:
    n, k, r, s = spec.n, spec.k, spec.r, spec.s
    a = fnk_array(n, k)

    def put(cells, value):
        for i, j in cells:
            a[i - 1, j - 1] = value

    for j in range(1, r + 1):
        put(positive_diagonal(n, k, j), 0)
        put(negative_diagonal(n, k, j), 0)
    put(_compensating_ones(n, k, r), 1)
    if s > 0:
        # the topmost entries of the lower-left diagonals are the ones cut
        put(negative_diagonal(n, k, k - 1)[:s], 0)
        put(positive_diagonal(n, k, k)[:s + 1], 0)
        a[k + s - 1, 0] = 1
    return a


def fkrs(spec: TruncationSpec | int, k: int | None = None, r: int = 0, s: int = 0) -> Asm:
    """F_n^{k,r,s}: F_n^k with ``(k-r-1)(n-k) - s`` negative entries."""
    if not isinstance(spec, TruncationSpec):
        spec = TruncationSpec(int(spec), int(k), r, s)
    return Asm(SignMatrix(fkrs_array(spec)))


def truncation_for(n: int, k: int, minus: int) -> TruncationSpec:
    """The unique (r, s) with ``sigma_-(F_n^{k,r,s}) = minus`` for 1 <= minus <= (k-1)(n-k)."""
    p = n - k
    if not 1 <= minus <= (k - 1) * p:
        raise SpecOutOfRange(f"no F^{{k,r,s}} with {minus} negatives for n={n}, k={k}",
                             n=n, k=k, minus=minus)
    q = -(-minus // p)
    return TruncationSpec(n, k, k - 1 - q, q * p - minus)


def corridor_positions(n: int, k: int) -> set[tuple[int, int]]:
    if not 1 <= k <= n:
        raise IndexOutOfRange(f"k={k} not in 1..{n}", n=n, k=k)
    upper = {(i, i + k - 1) for i in range(1, n - k + 2)}
    lower = {(j + k - 1, j) for j in range(1, n - k + 2)}
    return upper | lower


def latin_to_hypermatrix(square) -> SignHypermatrix:
    arr = np.asarray(square, dtype=np.int64)
    n = arr.shape[0]
    if arr.ndim != 2 or arr.shape[1] != n:
        raise AshmError(f"Latin square must be square, got shape {arr.shape}")
    if arr.min() < 1 or arr.max() > n:
        raise AshmError(f"entries must lie in 1..{n}")
    out = np.zeros((n, n, n), dtype=np.int64)
    i, j = np.indices((n, n))
    out[i, j, arr - 1] = 1
    return SignHypermatrix(out)


def hypermatrix_to_latin(h) -> np.ndarray:
    arr = as_array(h)
    if not is_permutation_hypermatrix(arr):
        raise NotPermutationHypermatrix("input is not a permutation hypermatrix")
    return np.argmax(arr, axis=2) + 1


def is_latin_square(square) -> bool:
    arr = np.asarray(square)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        return False
    want = np.arange(1, arr.shape[0] + 1)
    return all(np.array_equal(np.sort(line), want) for line in (*arr, *arr.T))


def cyclic_latin_square(n: int, shift: int = 0) -> np.ndarray:
    i, j = np.indices((n, n))
    return (i + j + shift) % n + 1
