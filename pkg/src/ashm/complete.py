"""Completion, extension and embedding algorithms for ASMs and ASHMs."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .construct import (diamond_array, fkrs, fnk_array, latin_to_hypermatrix, truncation_for)
from .core import (AshmError, Ashm, Asm, SignHypermatrix, SignMatrix, as_array, is_ashm,
                   is_convex, is_semi_asm, sign_disjoint, validate_asm)
from .matching import birkhoff_arrays, perfect_matching, regular_zero_one, subpermutation_arrays


class AlternationViolation(AshmError):
    pass


class MajorizationViolation(AshmError):
    pass


class SNotZeroOne(AshmError):
    pass


class NoNegative(AshmError):
    """Signal: the matrix has no -1 left to cancel."""


class NotConvex(AshmError):
    pass


class OrderNotOdd(AshmError):
    pass


class OrderNotEven(AshmError):
    pass


class NotSignDisjoint(AshmError):
    pass


class NoPairEmbedding(AshmError):
    """Sign-disjoint pair that admits no permutation planes below it."""


class TOutOfRange(AshmError):
    pass


class Cancelled(AshmError):
    pass


class Corner(str, enum.Enum):
    UPPER_LEFT = "upper_left"
    UPPER_RIGHT = "upper_right"
    LOWER_LEFT = "lower_left"
    LOWER_RIGHT = "lower_right"


@dataclass(frozen=True)
class PartialHypermatrix:
    """Known horizontal layers of an n x n x n hypermatrix, as (1-based index, plane) pairs."""

    n: int
    layers: tuple

    def __post_init__(self):
        layers = tuple((int(k), validate_asm(p)) for k, p in self.layers)
        idx = [k for k, _ in layers]
        if idx != sorted(set(idx)) or any(not 1 <= k <= self.n for k in idx):
            raise AshmError(f"layer indices {idx} must be strictly increasing within 1..{self.n}")
        if any(p.n != self.n for _, p in layers):
            raise AshmError(f"every layer must have order {self.n}")
        object.__setattr__(self, "layers", layers)

    @classmethod
    def without(cls, a, k: int) -> "PartialHypermatrix":
        """Drop horizontal layer ``k`` of a full hypermatrix."""
        arr = as_array(a)
        n = arr.shape[2]
        return cls(n, tuple((s, arr[:, :, s - 1]) for s in range(1, n + 1) if s != k))


def _stack(planes: Sequence, n: int) -> np.ndarray:
    if not planes:
        return np.zeros((n, n, 0), dtype=np.int64)
    return np.stack([as_array(p) for p in planes], axis=2)


def _first_bad_line(ok: np.ndarray) -> tuple[int, int]:
    i, j = np.argwhere(~ok)[0]
    return int(i) + 1, int(j) + 1


def _one_star_mask(arr: np.ndarray) -> np.ndarray:
    ps = np.cumsum(arr, axis=2)
    return ((ps == 0) | (ps == 1)).all(axis=2)


# ---------------------------------------------------------------------------
# layer completion and prefix extension

def complete_layer(partial: PartialHypermatrix, k: int | None = None) -> Ashm:
    """Fill the single missing layer; the completion is unique when it exists."""
    n = partial.n
    known = [s for s, _ in partial.layers]
    missing = [s for s in range(1, n + 1) if s not in known]
    if len(missing) != 1 or (k is not None and missing != [k]):
        raise AshmError(f"expected exactly layer {k} missing, have {known}")
    k = missing[0]
    planes = dict(partial.layers)
    lower = _stack([planes[s] for s in range(1, k)], n)
    upper = _stack([planes[s] for s in range(k + 1, n + 1)], n)
    for part, name, arr in (("below", "(1,*)", lower), ("above", "(*,1)", upper[:, :, ::-1])):
        ok = _one_star_mask(arr)
        if not ok.all():
            i, j = _first_bad_line(ok)
            raise AlternationViolation(f"vertical line ({i},{j}) {part} layer {k} is not {name}-alternating",
                                       i=i, j=j, part=part)
    x = lower.sum(axis=2) + upper.sum(axis=2)
    for name, lines in (("row", x), ("column", x.T)):
        ps = np.cumsum(lines, axis=1)
        for i, line in enumerate(ps):
            over = np.flatnonzero(line[:-1] > np.arange(1, n))
            if over.size:
                p = int(over[0]) + 1
                raise MajorizationViolation(f"{name} {i + 1} of X has prefix sum {int(line[p - 1])} > {p}",
                                            line=name, index=i + 1, prefix=p)
            if line[-1] != n - 1:
                raise MajorizationViolation(f"{name} {i + 1} of X sums to {int(line[-1])}, not {n - 1}",
                                            line=name, index=i + 1, prefix=n)
    y = 1 - x
    full = np.concatenate([lower, y[:, :, None], upper], axis=2)
    return Ashm(SignHypermatrix(full))


def extend_prefix(prefix: Sequence, rng: np.random.Generator | None = None) -> Ashm:
    """Append permutation planes to a prefix whose vertical lines are (1,*)-alternating."""
    if len(prefix) == 0:
        raise AshmError("prefix must contain at least one plane")
    planes = [validate_asm(p) for p in prefix]
    n = planes[0].n
    if any(p.n != n for p in planes) or len(planes) > n:
        raise AshmError(f"prefix must hold at most {n} planes of order {n}")
    arr = _stack(planes, n)
    ok = _one_star_mask(arr)
    if not ok.all():
        i, j = _first_bad_line(ok)
        raise AlternationViolation(f"vertical line ({i},{j}) of the prefix is not (1,*)-alternating",
                                   i=i, j=j)
    s = arr.sum(axis=2)
    if not np.isin(s, (0, 1)).all():
        raise SNotZeroOne("sum of the prefix planes is not a (0,1) matrix")
    rest = birkhoff_arrays(1 - s, rng) if len(planes) < n else []
    return Ashm(SignHypermatrix(_stack([*planes, *rest], n)))


# ---------------------------------------------------------------------------
# corner transforms

def _orient(arr: np.ndarray, corner: Corner) -> np.ndarray:
    if corner in (Corner.UPPER_RIGHT, Corner.LOWER_RIGHT):
        arr = arr[:, ::-1]
    if corner in (Corner.LOWER_LEFT, Corner.LOWER_RIGHT):
        arr = arr[::-1, :]
    return arr


def _ul_cells(arr: np.ndarray, k: int, l: int):
    """Cells touched by an upper-left transform at the -1 (k, l), or None if not applicable."""
    if (arr[:k + 1, :l + 1] == -1).sum() != 1:
        return None
    lp = int(np.flatnonzero(arr[k, :l])[-1])
    kp = int(np.flatnonzero(arr[:k, l])[-1])
    return kp, lp


def corner_transform(a, corner: Corner | str = Corner.UPPER_LEFT) -> Asm:
    """Cancel one -1 next to the given corner with a 2x2 update.

    For the upper-left corner the -1 at (k, l) with k + l minimal (then k
    minimal) is chosen; a_kl, a_k'l and a_kl' become 0 and a_k'l' becomes 1.
    The other corners are the same rule applied to the flipped matrix.
    """
    corner = Corner(corner)
    arr = _orient(as_array(validate_asm(a)).copy(), corner)
    neg = np.argwhere(arr == -1)
    if neg.size == 0:
        raise NoNegative("matrix has no -1 entries")
    k, l = (int(x) for x in min(neg.tolist(), key=lambda p: (p[0] + p[1], p[0])))
    kp, lp = _ul_cells(arr, k, l)
    arr[k, l] = arr[kp, l] = arr[k, lp] = 0
    arr[kp, lp] = 1
    return Asm(SignMatrix(_orient(arr, corner)))


def asm_to_permutation_chain(a) -> list[Asm]:
    chain = [validate_asm(a)]
    while True:
        try:
            chain.append(corner_transform(chain[-1], Corner.UPPER_LEFT))
        except NoNegative:
            return chain


def _find_diamond_witness(b: np.ndarray) -> np.ndarray | None:
    n = b.shape[0]
    nz = b != 0
    for k in range(1, n + 1):
        f = fnk_array(n, k)
        if np.array_equal(f[nz], b[nz]):
            return f
    return None


def _complete_partial_permutation(b: np.ndarray) -> np.ndarray:
    free = (b.sum(axis=1) == 0)[:, None] & (b.sum(axis=0) == 0)[None, :]
    p = perfect_matching(free | (b == 1))
    if p is None:  # pragma: no cover - a partial permutation always completes
        raise AshmError("cannot complete partial permutation")
    return p


def convex_complete(b, witness=None) -> Asm:
    """Complete a convex matrix cut from an ASM by turning some zeros into ones.

    ``witness`` is the ASM ``b`` was cut from. Without it a diamond F_n^k
    agreeing with ``b`` is used, or, when ``b`` has no -1, a permutation.
    """
    b = as_array(b)
    if b.ndim != 2 or b.shape[0] != b.shape[1] or not is_convex(b):
        raise NotConvex("input matrix is not convex")
    if witness is None:
        if not (b == -1).any():
            return Asm(SignMatrix(_complete_partial_permutation(b)))
        witness = _find_diamond_witness(b)
        if witness is None:
            raise AshmError("no witness ASM given and no F_n^k agrees with the input")
    a = as_array(validate_asm(witness)).copy()
    nz = b != 0
    if not np.array_equal(a[nz], b[nz]):
        raise AshmError("witness does not agree with the input on its nonzeros")
    while True:
        todo = np.argwhere((a == -1) & (b == 0)).tolist()
        if not todo:
            break
        for k, l in todo:
            step = _corner_step(a, b, k, l)
            if step is not None:
                a = step
                break
        else:
            # every remaining transform would erase a nonzero of b
            found = _search_completion(b)
            if found is None:
                raise AshmError("no ASM extends the input by changing zeros to ones")
            return Asm(SignMatrix(found))
    return Asm(SignMatrix(a))


def _search_completion(b: np.ndarray) -> np.ndarray | None:
    """Exact search for an ASM b + X with X a (0,1) matrix supported on the zeros of b.

    Rows are chosen top to bottom; the state is the vector of partial column
    sums, which must stay in {0,1}. Dead (row, state) pairs are memoized.
    """
    n = b.shape[0]
    dead: set = set()
    rows: list[tuple[int, ...]] = []

    def options(i: int, state: tuple[int, ...]):
        out = []

        def walk(j, partial, row):
            if j == n:
                if partial == 1:
                    out.append(tuple(row))
                return
            vals = (int(b[i, j]),) if b[i, j] else (0, 1)
            for r in vals:
                if 0 <= partial + r <= 1 and 0 <= state[j] + r <= 1:
                    row.append(r)
                    walk(j + 1, partial + r, row)
                    row.pop()

        walk(0, 0, [])
        return out

    def solve(i: int, state: tuple[int, ...]) -> bool:
        if i == n:
            return all(state)
        if (i, state) in dead or n - i < state.count(0):
            return False
        for row in options(i, state):
            rows.append(row)
            if solve(i + 1, tuple(s + r for s, r in zip(state, row))):
                return True
            rows.pop()
        dead.add((i, state))
        return False

    return np.array(rows, dtype=np.int64) if solve(0, (0,) * n) else None


def _corner_step(a: np.ndarray, b: np.ndarray, k: int, l: int) -> np.ndarray | None:
    n = a.shape[0]
    for corner in Corner:
        fa, fb = _orient(a, corner), _orient(b, corner)
        kk = n - 1 - k if corner in (Corner.LOWER_LEFT, Corner.LOWER_RIGHT) else k
        ll = n - 1 - l if corner in (Corner.UPPER_RIGHT, Corner.LOWER_RIGHT) else l
        cells = _ul_cells(fa, kk, ll)
        if cells is None:
            continue
        kp, lp = cells
        if fb[kp, ll] != 0 or fb[kk, lp] != 0:
            continue
        out = fa.copy()
        out[kk, ll] = out[kp, ll] = out[kk, lp] = 0
        out[kp, lp] = 1
        return _orient(out, corner).copy()
    return None


# ---------------------------------------------------------------------------
# semi-ASM cycle extension and central embeddings

def _shortest_cycle(zero: np.ndarray) -> list[tuple[int, int]] | None:
    """Cells of a shortest cycle of the zero graph through its first vertex."""
    n = zero.shape[0]
    # vertices 0..n-1 are rows, n..2n-1 are columns
    adj = [[] for _ in range(2 * n)]
    for i, j in np.argwhere(zero).tolist():
        adj[i].append(n + j)
        adj[n + j].append(i)
    start = next((v for v in range(2 * n) if adj[v]), None)
    if start is None:
        return None
    best = None
    for u in adj[start]:
        prev = {u: None}
        queue = [u]
        for x in queue:
            if x == start:
                break
            for y in adj[x]:
                if y in prev or (x == u and y == start):
                    continue
                prev[y] = x
                queue.append(y)
        if start not in prev:
            continue
        path = [start]
        while path[-1] != u:
            path.append(prev[path[-1]])
        walk = [start] + path[::-1]  # start -> u -> ... -> start
        if best is None or len(walk) < len(best):
            best = walk
    cells = []
    for x, y in zip(best, best[1:]):
        cells.append((x, y - n) if x < n else (y, x - n))
    return cells


def cycle_extend_full(a) -> np.ndarray:
    """Fill every zero of an odd-order semi-ASM by alternating +1/-1 along zero-graph cycles."""
    arr = as_array(a).copy()
    n = arr.shape[0]
    if n % 2 == 0:
        raise OrderNotOdd(f"order {n} is even")
    if not is_semi_asm(arr):
        raise AshmError("input is not a semi-ASM")
    while (arr == 0).any():
        cycle = _shortest_cycle(arr == 0)
        if cycle is None:  # pragma: no cover - excluded by parity
            raise AshmError("zero graph has no cycle")
        for t, (i, j) in enumerate(cycle):
            arr[i, j] = 1 if t % 2 == 0 else -1
    return arr


def disjoint_perm_cover(a) -> list[np.ndarray]:
    """n disjoint permutations summing to J: the first k cover the -1's, the rest the +1's."""
    full = cycle_extend_full(a)
    return birkhoff_arrays((full == -1).astype(np.int64)) + birkhoff_arrays((full == 1).astype(np.int64))


def embed_asm_central(b) -> Ashm:
    """An ASHM with ``b`` as middle plane k+1 of n = 2k+1 and permutations elsewhere."""
    b = validate_asm(b)
    n = b.n
    if n % 2 == 0:
        raise OrderNotOdd(f"order {n} is even")
    cover = disjoint_perm_cover(b)
    return extend_prefix([*cover[:n // 2], b])


def embed_pair_central(b1, b2) -> Ashm:
    """An ASHM with ``b1``, ``b2`` as planes n/2 and n/2+1 and permutations elsewhere.

    The leading permutations sum to a (0,1) matrix S0 with line sums n/2-1
    that is 1 wherever the line (S0, b1, b2) needs a leading +1 and 0 where a
    leading +1 would break alternation. S0 is found by max flow.
    """
    b1, b2 = validate_asm(b1), validate_asm(b2)
    n = b1.n
    if n % 2 == 1:
        raise OrderNotEven(f"order {n} is odd")
    if b2.n != n or not sign_disjoint(b1, b2):
        raise NotSignDisjoint("b1 + b2 is not a (0,+-1) matrix")
    x, y = as_array(b1), as_array(b2)
    forced_one = (x == -1) | ((x == 0) & (y == -1))
    forced_zero = (x == 1) | ((x == 0) & (y == 1))
    s0 = regular_zero_one(n, forced_one, forced_zero, n // 2 - 1)
    if s0 is None:
        raise NoPairEmbedding("no permutation planes below b1 keep every vertical line alternating")
    lead = birkhoff_arrays(s0) if n > 2 else []
    return extend_prefix([*lead, b1, b2])


def asm_mate(a) -> np.ndarray:
    """A permutation matrix P with a + P a (0,+-1) matrix."""
    a = validate_asm(a)
    n = a.n
    if n < 2:
        raise AshmError("an ASM of order 1 has no mate")
    if n % 2 == 1:
        return disjoint_perm_cover(a)[0]
    p = perfect_matching(as_array(a) != 1)
    if p is None:  # pragma: no cover - excluded by Hall's condition
        raise AshmError("no mate found")
    return p


# ---------------------------------------------------------------------------
# ASHMs with a prescribed number of -1's

def max_negatives(n: int) -> int:
    """Largest number of -1's in an n x n x n ASHM (attained by the diamond)."""
    return n * (n - 1) * (n - 2) // 6


def _permutation_ashm(n: int) -> Ashm:
    return extend_prefix([np.eye(n, dtype=np.int64)])


def ashm_with_negatives(n: int, t: int) -> Ashm:
    if not 0 <= t <= max_negatives(n):
        raise TOutOfRange(f"t={t} not in 0..{max_negatives(n)}", n=n, t=t)
    if t == 0:
        return _permutation_ashm(n)
    total, k = 0, 1
    while total + (k - 1) * (n - k) < t:
        total += (k - 1) * (n - k)
        k += 1
    plane = fkrs(truncation_for(n, k, t - total))
    return extend_prefix([*(fnk_array(n, s) for s in range(1, k)), plane])


def ashm_negatives_one_layer(n: int, k: int, t: int) -> Ashm:
    """An ASHM whose -1's, exactly t of them, all lie in horizontal plane k."""
    if not 1 <= k <= n:
        raise TOutOfRange(f"layer {k} not in 1..{n}", n=n, k=k)
    if not 0 <= t <= (k - 1) * (n - k):
        raise TOutOfRange(f"t={t} not in 0..{(k - 1) * (n - k)}", n=n, k=k, t=t)
    if t == 0:
        return _permutation_ashm(n)
    plane = fkrs(truncation_for(n, k, t))
    upper = as_array(extend_prefix([*(fnk_array(n, s) for s in range(1, k)), plane]))
    tail = upper[:, :, k - 1:][:, :, ::-1]
    full = as_array(extend_prefix([tail[:, :, s] for s in range(tail.shape[2])]))
    return Ashm(SignHypermatrix(full[:, :, ::-1]))


# ---------------------------------------------------------------------------
# embedding arbitrary (0,+-1) hypermatrices

def defect_matrix(a, k: int) -> np.ndarray:
    """C^{A,k}: +1 where plane k repeats a -1 after a -1 (or opens with -1), -1 where it repeats a +1.

    ``k`` is 1-based. The state of a partial vertical line is its sum, so a
    line with no nonzero yet behaves like one ending in -1.
    """
    arr = as_array(a)
    state = arr[:, :, :k - 1].sum(axis=2)
    plane = arr[:, :, k - 1]
    c = np.zeros_like(plane)
    c[(state == 0) & (plane == -1)] = 1
    c[(state == 1) & (plane == 1)] = -1
    return c


def insert_planes(arr: np.ndarray, axis: int) -> tuple[np.ndarray, list[int]]:
    """Make every line along ``axis`` alternate by inserting subpermutation planes.

    Returns the new array and the new 0-based positions of the original planes.
    """
    x = np.moveaxis(as_array(arr), axis, -1)
    state = np.zeros(x.shape[:-1], dtype=np.int64)
    planes, where = [], []
    for t in range(x.shape[-1]):
        cur = x[..., t]
        c = np.zeros_like(state)
        c[(state == 0) & (cur == -1)] = 1
        c[(state == 1) & (cur == 1)] = -1
        planes += subpermutation_arrays((c == 1).astype(np.int64))
        planes += [-q for q in subpermutation_arrays((c == -1).astype(np.int64))]
        state = state + c + cur
        where.append(len(planes))
        planes.append(cur)
    planes += subpermutation_arrays((state == 0).astype(np.int64))
    return np.moveaxis(np.stack(planes, axis=-1), -1, axis), where


@dataclass(frozen=True)
class Embedding:
    """An ASHM plus 1-based maps sending the input's rows, columns and layers into it."""

    ashm: Ashm
    rows: tuple[int, ...]
    cols: tuple[int, ...]
    layers: tuple[int, ...]
    method: str

    def extract(self) -> np.ndarray:
        arr = as_array(self.ashm)
        idx = np.ix_([r - 1 for r in self.rows], [c - 1 for c in self.cols],
                     [k - 1 for k in self.layers])
        return arr[idx]


def _inner_blocks() -> dict[int, np.ndarray]:
    """3x3x3 ASHMs whose centre entry is -1, 0 and +1."""
    return {
        -1: diamond_array(3),
        0: as_array(latin_to_hypermatrix([[1, 2, 3], [2, 3, 1], [3, 1, 2]])),
        1: as_array(latin_to_hypermatrix([[3, 1, 2], [1, 2, 3], [2, 3, 1]])),
    }


def _diamond_window(support: np.ndarray, limit: int = 200):
    """Smallest s and offset so the diamond D_s is nonzero on the shifted support."""
    cells = np.argwhere(support)
    dims = support.shape
    s = max(dims)
    while s <= limit:
        nz = diamond_array(s) != 0
        for off in np.ndindex(*(s - d + 1 for d in dims)):
            if cells.size == 0 or nz[tuple((cells + off).T)].all():
                return s, off
        s += 1
    raise AshmError("no diamond window found")  # pragma: no cover


def _substitute(a: np.ndarray) -> Embedding:
    """Replace each nonzero b of an outer diamond by b * X with X a 3x3x3 ASHM.

    Along any line the pieces b * (line of X) concatenate to an alternating
    line, so the result is an ASHM of order 3s. The centre entries of the
    blocks over the window reproduce ``a``.
    """
    s, off = _diamond_window(a != 0)
    outer = diamond_array(s)
    blocks = _inner_blocks()
    big = np.zeros((3 * s,) * 3, dtype=np.int64)
    for cell in np.argwhere(outer != 0).tolist():
        b = outer[tuple(cell)]
        local = tuple(c - o for c, o in zip(cell, off))
        want = 0
        if all(0 <= x < d for x, d in zip(local, a.shape)):
            want = int(a[local]) * b
        i, j, k = (3 * c for c in cell)
        big[i:i + 3, j:j + 3, k:k + 3] = b * blocks[want]
    maps = tuple(tuple(3 * (o + t) + 2 for t in range(d)) for o, d in zip(off, a.shape))
    return Embedding(Ashm(SignHypermatrix(big)), *maps, method="substitution")


def embed_subhypermatrix(a_prime, progress: Callable[[str], object] | None = None) -> Embedding:
    """An ASHM containing ``a_prime`` (any m' x n' x k' (0,+-1) array) as a subhypermatrix.

    First the three plane-insertion passes are run (vertical, then row and
    column directions). If they end in an ASHM it is returned. Otherwise the
    block substitution above is used, which always succeeds.
    """
    a = as_array(a_prime)
    if a.ndim != 3 or 0 in a.shape or not np.isin(a, (-1, 0, 1)).all():
        raise AshmError("input must be a non-empty 3-dimensional (0,+-1) array")

    def tick(msg):
        if progress is not None and progress(msg) is False:
            raise Cancelled(msg)

    maps = [list(range(d)) for d in a.shape]
    cur = a
    for axis in (2, 0, 1):
        tick(f"insertion pass along axis {axis}")
        cur, where = insert_planes(cur, axis)
        maps[axis] = [where[t] for t in maps[axis]]
    if is_ashm(cur):
        return Embedding(Ashm(SignHypermatrix(cur)), *(tuple(p + 1 for p in m) for m in maps),
                         method="insertion")
    tick("block substitution")
    return _substitute(a)
