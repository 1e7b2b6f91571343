"""Core types, index conventions and validators for alternating sign structures.

Storage is 0-based. Every public ``index`` argument, every error payload and
every printed position is 1-based.

A hypermatrix is held as an integer array ``a[i, j, k]`` where ``i`` is the
row, ``j`` the column and ``k`` the horizontal plane. Plane ``k = 1`` is the
bottom plane, so ``[A_1, ..., A_n]`` lists planes bottom first.

Plane orientation used by :func:`extract_plane`:

* ``horizontal`` plane ``k``: ``M[i, j] = a[i, j, k]``.
* ``row_vertical`` plane ``i``: ``M[k, j] = a[i, j, k]`` (layers ascending),
  so row ``i`` of horizontal plane ``k`` equals row ``k`` of row-vertical
  plane ``i``.
* ``column_vertical`` plane ``j``: ``M[k, i] = a[i, j, k]``.

Passing ``downward=True`` flips the vertical planes so the top layer comes
first. That is the view in which ``Row_i(L(A)) = z_n^T C`` holds literally.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np


# ---------------------------------------------------------------------------
# errors

class AshmError(ValueError):
    """Base class for every library error; ``info`` carries 1-based details."""

    def __init__(self, message: str = "", **info):
        super().__init__(message or type(self).__name__)
        self.info = info

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": str(self), **self.info}


class ShapeError(AshmError):
    pass


class EntryError(AshmError):
    pass


class NotAlternating(AshmError):
    pass


class BadLineSum(NotAlternating):
    pass


class PlaneNotAsm(AshmError):
    pass


class BadVerticalSum(AshmError):
    pass


class IndexOutOfRange(AshmError):
    pass


# ---------------------------------------------------------------------------
# matrix containers

def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=np.int8)
    out.setflags(write=False)
    return out


def _checked_entries(entries, ndim: int) -> np.ndarray:
    arr = np.asarray(entries)
    if arr.ndim != ndim or 0 in arr.shape:
        raise ShapeError(f"expected a non-empty {ndim}-dimensional grid, got shape {arr.shape}")
    if arr.dtype.kind not in "iub":
        if arr.dtype.kind == "f" and np.all(arr == np.round(arr)):
            arr = arr.astype(np.int64)
        else:
            raise EntryError("entries must be integers")
    bad = ~np.isin(arr, (-1, 0, 1))
    if bad.any():
        pos = tuple(int(x) + 1 for x in np.argwhere(bad)[0])
        raise EntryError(f"entry {int(arr[tuple(p - 1 for p in pos)])} at {pos} is not in {{-1,0,1}}",
                         position=list(pos))
    return _freeze(arr)


@dataclass(frozen=True, eq=False)
class SignMatrix:
    """A (0,+-1) grid. Square in all library uses except subpermutation work."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _checked_entries(self.entries, 2))

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def n(self) -> int:
        if self.shape[0] != self.shape[1]:
            raise ShapeError(f"matrix of shape {self.shape} is not square")
        return self.shape[0]

    def tolist(self) -> list[list[int]]:
        return self.entries.astype(int).tolist()

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __eq__(self, other) -> bool:
        other = getattr(other, "inner", other)
        if not isinstance(other, SignMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.entries, other.entries))

    def __hash__(self) -> int:
        return hash((self.shape, self.entries.tobytes()))

    def __repr__(self) -> str:
        return f"SignMatrix({self.tolist()})"


@dataclass(frozen=True, eq=False)
class SignHypermatrix:
    """A (0,+-1) grid ``a[i, j, k]``; cubic except as input to embedding."""

    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", _checked_entries(self.entries, 3))

    @classmethod
    def from_planes(cls, planes: Sequence) -> "SignHypermatrix":
        """Stack horizontal planes, bottom plane first."""
        if len(planes) == 0:
            raise ShapeError("need at least one plane")
        return cls(np.stack([as_array(p) for p in planes], axis=2))

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.entries.shape

    @property
    def n(self) -> int:
        m, n, p = self.shape
        if not m == n == p:
            raise ShapeError(f"hypermatrix of shape {self.shape} is not cubic")
        return n

    @property
    def planes(self) -> list[SignMatrix]:
        return [SignMatrix(self.entries[:, :, k]) for k in range(self.shape[2])]

    def tolist(self) -> list[list[list[int]]]:
        """Planes bottom first, each as a list of rows."""
        return [self.entries[:, :, k].astype(int).tolist() for k in range(self.shape[2])]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    def __eq__(self, other) -> bool:
        other = getattr(other, "inner", other)
        if not isinstance(other, SignHypermatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.entries, other.entries))

    def __hash__(self) -> int:
        return hash((self.shape, self.entries.tobytes()))

    def __repr__(self) -> str:
        return f"SignHypermatrix(shape={self.shape}, planes={self.tolist()})"


def as_array(x) -> np.ndarray:
    """Integer ndarray view of any matrix-like object (wrappers, lists, arrays)."""
    x = getattr(x, "inner", x)
    if isinstance(x, (SignMatrix, SignHypermatrix)):
        x = x.entries
    return np.asarray(x, dtype=np.int64)


# ---------------------------------------------------------------------------
# line predicates

class AltKind(enum.Enum):
    FULL = "full"
    ONE_STAR = "one_star"
    STAR_ONE = "star_one"
    ONE_STAR_AND_STAR_ONE = "one_star_and_star_one"
    NEITHER = "neither"


def _prefix_ok(arr: np.ndarray, axis: int) -> np.ndarray:
    ps = np.cumsum(arr, axis=axis)
    return ((ps == 0) | (ps == 1)).all(axis=axis)


def is_one_star(seq) -> bool:
    """Nonzeros alternate and the first one is +1 (all-zero qualifies)."""
    arr = as_array(seq)
    return bool(np.isin(arr, (-1, 0, 1)).all() and _prefix_ok(arr, -1))


def is_star_one(seq) -> bool:
    """Nonzeros alternate and the last one is +1 (all-zero qualifies)."""
    return is_one_star(as_array(seq)[::-1])


def alternating_kind(seq) -> AltKind:
    arr = as_array(seq)
    one_star, star_one = is_one_star(arr), is_star_one(arr)
    if one_star and star_one:
        return AltKind.FULL if arr.sum() == 1 else AltKind.ONE_STAR_AND_STAR_ONE
    if one_star:
        return AltKind.ONE_STAR
    if star_one:
        return AltKind.STAR_ONE
    return AltKind.NEITHER


def lines_alternate(arr: np.ndarray, axis: int) -> np.ndarray:
    """Boolean mask: which lines along ``axis`` are fully alternating."""
    ps = np.cumsum(arr, axis=axis)
    good = ((ps == 0) | (ps == 1)).all(axis=axis)
    return good & (np.take(ps, -1, axis=axis) == 1)


def _line_error(values: np.ndarray, **where) -> AshmError:
    ps = np.cumsum(values)
    label = " ".join(f"{k} {v}" for k, v in where.items())
    if ((ps == 0) | (ps == 1)).all():
        return BadLineSum(f"{label}: sums to {int(ps[-1])}", **where)
    return NotAlternating(f"{label}: entries {values.tolist()} do not alternate", **where)


# ---------------------------------------------------------------------------
# validated wrappers

def _check_asm(arr: np.ndarray, **context) -> None:
    n, m = arr.shape
    if n != m:
        raise ShapeError(f"matrix of shape {arr.shape} is not square", **context)
    for axis, name in ((1, "row"), (0, "column")):
        good = lines_alternate(arr, axis)
        if not good.all():
            i = int(np.argmin(good))
            line = arr[i, :] if axis == 1 else arr[:, i]
            raise _line_error(line, **context, line=name, index=i + 1)


def _check_ashm(arr: np.ndarray) -> None:
    m, n, p = arr.shape
    if not m == n == p:
        raise ShapeError(f"hypermatrix of shape {arr.shape} is not cubic")
    for k in range(n):
        _check_asm(arr[:, :, k], plane="horizontal", plane_index=k + 1)
    good = lines_alternate(arr, 2)
    if not good.all():
        i, j = (int(x) for x in np.argwhere(~good)[0])
        raise _line_error(arr[i, j, :], plane="row_vertical", plane_index=i + 1,
                          line="vertical", index=j + 1)


def _check_pashm(arr: np.ndarray) -> None:
    m, n, p = arr.shape
    if not m == n == p:
        raise ShapeError(f"hypermatrix of shape {arr.shape} is not cubic")
    for k in range(n):
        try:
            _check_asm(arr[:, :, k])
        except AshmError as exc:
            raise PlaneNotAsm(f"horizontal plane {k + 1} is not an ASM: {exc}",
                              plane_index=k + 1, cause=exc.info) from exc
    sums = arr.sum(axis=2)
    if (sums != 1).any():
        i, j = (int(x) for x in np.argwhere(sums != 1)[0])
        raise BadVerticalSum(f"vertical line ({i + 1},{j + 1}) sums to {int(sums[i, j])}",
                             i=i + 1, j=j + 1)


@dataclass(frozen=True, eq=False)
class Asm:
    inner: SignMatrix

    def __post_init__(self):
        if not isinstance(self.inner, SignMatrix):
            object.__setattr__(self, "inner", SignMatrix(as_array(self.inner)))
        _check_asm(as_array(self.inner))

    @property
    def n(self) -> int:
        return self.inner.n

    @property
    def entries(self) -> np.ndarray:
        return self.inner.entries

    def tolist(self):
        return self.inner.tolist()

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.inner.entries, dtype=dtype)

    def __eq__(self, other):
        return self.inner.__eq__(other)

    def __hash__(self):
        return hash(self.inner)

    def __repr__(self):
        return f"Asm({self.tolist()})"


class _Hyper:
    inner: SignHypermatrix

    @property
    def n(self) -> int:
        return self.inner.n

    @property
    def entries(self) -> np.ndarray:
        return self.inner.entries

    @property
    def planes(self) -> list[SignMatrix]:
        return self.inner.planes

    def plane(self, k: int) -> SignMatrix:
        """Horizontal plane ``k`` (1-based)."""
        return extract_plane(self.inner, "horizontal", k)

    def tolist(self):
        return self.inner.tolist()

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.inner.entries, dtype=dtype)

    def __eq__(self, other):
        return self.inner.__eq__(other)

    def __hash__(self):
        return hash(self.inner)


@dataclass(frozen=True, eq=False)
class Ashm(_Hyper):
    inner: SignHypermatrix

    def __post_init__(self):
        if not isinstance(self.inner, SignHypermatrix):
            object.__setattr__(self, "inner", SignHypermatrix(as_array(self.inner)))
        _check_ashm(as_array(self.inner))

    def __repr__(self):
        return f"Ashm(planes={self.tolist()})"


@dataclass(frozen=True, eq=False)
class Pashm(_Hyper):
    inner: SignHypermatrix

    def __post_init__(self):
        if not isinstance(self.inner, SignHypermatrix):
            object.__setattr__(self, "inner", SignHypermatrix(as_array(self.inner)))
        _check_pashm(as_array(self.inner))

    def __repr__(self):
        return f"Pashm(planes={self.tolist()})"


def _as_sign_matrix(m) -> SignMatrix:
    m = getattr(m, "inner", m)
    return m if isinstance(m, SignMatrix) else SignMatrix(as_array(m))


def _as_sign_hyper(h) -> SignHypermatrix:
    h = getattr(h, "inner", h)
    return h if isinstance(h, SignHypermatrix) else SignHypermatrix(as_array(h))


def validate_asm(m) -> Asm:
    if isinstance(m, Asm):
        return m
    return Asm(_as_sign_matrix(m))


def validate_ashm(h) -> Ashm:
    if isinstance(h, Ashm):
        return h
    return Ashm(_as_sign_hyper(h))


def validate_pashm(h) -> Pashm:
    if isinstance(h, Pashm):
        return h
    return Pashm(_as_sign_hyper(h))


def is_asm(m) -> bool:
    try:
        validate_asm(m)
    except AshmError:
        return False
    return True


def is_ashm(h) -> bool:
    try:
        validate_ashm(h)
    except AshmError:
        return False
    return True


def is_pashm(h) -> bool:
    try:
        validate_pashm(h)
    except AshmError:
        return False
    return True


def is_semi_asm(m) -> bool:
    arr = as_array(m)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"matrix of shape {arr.shape} is not square")
    return bool(np.isin(arr, (-1, 0, 1)).all()
                and (arr.sum(axis=0) == 1).all() and (arr.sum(axis=1) == 1).all())


def is_permutation_matrix(m) -> bool:
    arr = as_array(m)
    return bool(arr.ndim == 2 and arr.shape[0] == arr.shape[1] and np.isin(arr, (0, 1)).all()
                and (arr.sum(axis=0) == 1).all() and (arr.sum(axis=1) == 1).all())


def is_permutation_hypermatrix(h) -> bool:
    arr = as_array(h)
    if arr.ndim != 3 or len(set(arr.shape)) != 1 or not np.isin(arr, (0, 1)).all():
        return False
    return all((arr.sum(axis=ax) == 1).all() for ax in range(3))


# ---------------------------------------------------------------------------
# planes and counts

class PlaneKind(str, enum.Enum):
    HORIZONTAL = "horizontal"
    ROW_VERTICAL = "row_vertical"
    COLUMN_VERTICAL = "column_vertical"


def plane_array(arr: np.ndarray, kind, index: int, downward: bool = False) -> np.ndarray:
    kind = PlaneKind(kind)
    axis = {PlaneKind.HORIZONTAL: 2, PlaneKind.ROW_VERTICAL: 0, PlaneKind.COLUMN_VERTICAL: 1}[kind]
    size = arr.shape[axis]
    if not 1 <= index <= size:
        raise IndexOutOfRange(f"{kind.value} plane index {index} not in 1..{size}",
                              kind=kind.value, index=index)
    if kind is PlaneKind.HORIZONTAL:
        return arr[:, :, index - 1]
    # rows of a vertical plane are layers
    out = arr[index - 1, :, :].T if kind is PlaneKind.ROW_VERTICAL else arr[:, index - 1, :].T
    return out[::-1] if downward else out


def extract_plane(h, kind, index: int, downward: bool = False) -> SignMatrix:
    return SignMatrix(plane_array(as_array(h), kind, index, downward))


class Sigma(NamedTuple):
    plus: int
    minus: int
    total: int


def sigma_counts(x) -> Sigma:
    arr = as_array(x)
    plus, minus = int((arr == 1).sum()), int((arr == -1).sum())
    return Sigma(plus, minus, plus + minus)


def zn(n: int) -> np.ndarray:
    """The weight vector (n, n-1, ..., 1)."""
    return np.arange(n, 0, -1, dtype=np.int64)


# ---------------------------------------------------------------------------
# symmetries of the cube

@dataclass(frozen=True)
class SymmetryElement:
    """``Y = flip(transpose(X, perm), flips)``: axis ``a`` of Y is axis ``perm[a]`` of X."""

    perm: tuple[int, int, int] = (0, 1, 2)
    flips: tuple[bool, bool, bool] = (False, False, False)

    def __post_init__(self):
        perm = tuple(int(p) for p in self.perm)
        flips = tuple(bool(f) for f in self.flips)
        if sorted(perm) != [0, 1, 2] or len(flips) != 3:
            raise AshmError(f"bad symmetry element {perm}, {flips}")
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "flips", flips)

    def act(self, arr: np.ndarray) -> np.ndarray:
        out = np.transpose(arr, self.perm)
        axes = tuple(a for a in range(3) if self.flips[a])
        return np.flip(out, axes) if axes else out

    def after(self, first: "SymmetryElement") -> "SymmetryElement":
        """The element acting as ``first`` followed by ``self``."""
        p1, f1 = first.perm, first.flips
        perm = tuple(p1[self.perm[a]] for a in range(3))
        flips = tuple(self.flips[a] ^ f1[self.perm[a]] for a in range(3))
        return SymmetryElement(perm, flips)

    def inverse(self) -> "SymmetryElement":
        return next(g for g in all_symmetries() if g.after(self) == SymmetryElement())


def all_symmetries() -> list[SymmetryElement]:
    return [SymmetryElement(p, f) for p in itertools.permutations(range(3))
            for f in itertools.product((False, True), repeat=3)]


def apply_symmetry(a, g: SymmetryElement) -> Ashm:
    out = g.act(as_array(a))
    try:
        return Ashm(SignHypermatrix(out))
    except AshmError as exc:  # pragma: no cover - would be a bug
        raise RuntimeError(f"symmetry {g} broke the ASHM property: {exc}") from exc


# ---------------------------------------------------------------------------
# structural flags

@dataclass(frozen=True)
class StructureFlags:
    convex: bool
    minus_convex: bool
    near_permutation: bool
    sign_disjoint: bool | None = None
    even_zero_lines: bool | None = None


def _lines(arr: np.ndarray) -> Iterable[np.ndarray]:
    yield from arr
    yield from arr.T


def _gapless(mask: np.ndarray) -> bool:
    idx = np.flatnonzero(mask)
    return idx.size == 0 or idx[-1] - idx[0] + 1 == idx.size


def is_convex(m) -> bool:
    return all(_gapless(line != 0) for line in _lines(as_array(m)))


def is_minus_convex(m) -> bool:
    for line in _lines(as_array(m)):
        neg = np.flatnonzero(line == -1)
        if neg.size and (line[neg[0]:neg[-1] + 1] == 0).any():
            return False
    return True


def is_near_permutation(x) -> bool:
    arr = as_array(x)
    return all(((arr == -1).sum(axis=ax) <= 1).all() for ax in range(arr.ndim))


def sign_disjoint(x, y) -> bool:
    s = as_array(x) + as_array(y)
    return bool(((s >= -1) & (s <= 1)).all())


def structure_predicates(m, other=None) -> StructureFlags:
    arr = as_array(m)
    disjoint = parity = None
    if other is not None:
        oth = as_array(other)
        if oth.shape != arr.shape:
            raise ShapeError("operands must have equal order")
        disjoint = sign_disjoint(arr, oth)
        if disjoint and arr.shape[0] % 2 == 0:
            zeros = (arr + oth) == 0
            parity = bool((zeros.sum(axis=0) % 2 == 0).all() and (zeros.sum(axis=1) % 2 == 0).all())
    return StructureFlags(is_convex(arr), is_minus_convex(arr), is_near_permutation(arr),
                          disjoint, parity)
