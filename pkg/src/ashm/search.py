"""Exhaustive enumeration, exact 3D term rank, orthogonality and small-n experiments."""
from __future__ import annotations

import enum
import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from .complete import OrderNotOdd, extend_prefix
from .construct import cyclic_latin_square, fnk_array, is_latin_square, latin_to_hypermatrix
from .core import (AshmError, Ashm, Asm, Pashm, SignHypermatrix, SignMatrix, all_symmetries,
                   as_array, is_permutation_matrix, sigma_counts, validate_asm)
from .latin import latin_of, majorize, weighted_projections
from .matching import BipartiteGraph, maximum_matching

BOUNDS = {"asm": 6, "ashm": 4, "pashm": 4}
CHECKPOINT_HEADER = "ashm-enumeration-checkpoint 1"


class BoundExceeded(AshmError):
    pass


class BudgetExceeded(AshmError):
    pass


class OrderMismatch(AshmError):
    pass


class Kind(str, enum.Enum):
    ASM = "asm"
    ASHM = "ashm"
    PASHM = "pashm"


class Mode(str, enum.Enum):
    COUNT = "count"
    COLLECT = "collect"
    STREAM = "stream"


@dataclass(frozen=True)
class EnumerationConfig:
    n: int
    kind: Kind = Kind.ASM
    mode: Mode = Mode.COLLECT
    parallel: bool = False
    override: bool = False
    workers: int | None = None
    checkpoint: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.n < 1:
            raise AshmError(f"order must be positive, got {self.n}")
        limit = BOUNDS[self.kind.value]
        if self.n > limit and not self.override:
            raise BoundExceeded(f"{self.kind.value} enumeration is bounded by n <= {limit}",
                                n=self.n, bound=limit)


def _check_bound(n: int, kind: str, override: bool = False) -> None:
    EnumerationConfig(n, kind, override=override)


# ---------------------------------------------------------------------------
# ASMs: rows are generated from the partial column sums, each in {0, 1}

@lru_cache(maxsize=None)
def _next_rows(state: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]:
    """All rows r making a (1,*)-alternating row with state + r still in {0,1}^n."""
    n = len(state)
    out = []

    def walk(j: int, partial: int, row: list[int]):
        if j == n:
            if partial == 1:
                out.append((tuple(row), tuple(s + r for s, r in zip(state, row))))
            return
        # a column with partial sum 1 may take -1, one with 0 may take +1
        options = (-1, 0) if state[j] else (0, 1)
        for r in options:
            p = partial + r
            if p in (0, 1):
                row.append(r)
                walk(j + 1, p, row)
                row.pop()

    walk(0, 0, [])
    return tuple(out)


@lru_cache(maxsize=None)
def _asm_count(state: tuple[int, ...], left: int) -> int:
    if left == 0:
        return int(all(state))
    return sum(_asm_count(nxt, left - 1) for _, nxt in _next_rows(state))


def _asm_arrays(n: int) -> Iterator[np.ndarray]:
    rows: list[tuple[int, ...]] = []

    def walk(state, left):
        if left == 0:
            if all(state):
                yield np.array(rows, dtype=np.int64)
            return
        for row, nxt in _next_rows(state):
            # prune states that cannot reach all ones in time
            if sum(1 - s for s in nxt) > left - 1:
                continue
            rows.append(row)
            yield from walk(nxt, left - 1)
            rows.pop()

    yield from walk((0,) * n, n)


@lru_cache(maxsize=8)
def all_asm_arrays(n: int) -> tuple[np.ndarray, ...]:
    out = []
    for a in _asm_arrays(n):
        a.flags.writeable = False
        out.append(a)
    return tuple(out)


def enumerate_asms(cfg: EnumerationConfig | int):
    """Count, list or stream every n x n ASM in a fixed order."""
    if not isinstance(cfg, EnumerationConfig):
        cfg = EnumerationConfig(int(cfg), Kind.ASM)
    n = cfg.n
    if cfg.mode is Mode.COUNT:
        return _asm_count((0,) * n, n)
    gen = (Asm(SignMatrix(a)) for a in _asm_arrays(n))
    return gen if cfg.mode is Mode.STREAM else list(gen)


# ---------------------------------------------------------------------------
# ASHMs and PASHMs: layered search over ASM planes

def _ashm_subtree(n: int, kind: str, root: int, collect: bool):
    """Count (and optionally collect) every hypermatrix whose first plane is ASM #root."""
    asms = np.stack(all_asm_arrays(n))
    index = {a.tobytes(): t for t, a in enumerate(asms)}
    planes = [asms[root]]
    found: list[np.ndarray] = []
    count = 0

    def walk(s: np.ndarray):
        nonlocal count
        if len(planes) == n - 1:
            last = (1 - s).astype(np.int64)
            if last.tobytes() in index:
                count += 1
                if collect:
                    found.append(np.stack([*planes, last], axis=2))
            return
        if kind == "ashm":
            nxt = s[None] + asms
            ok = ((nxt >= 0) & (nxt <= 1)).all(axis=(1, 2))
            cand = np.flatnonzero(ok)
        else:
            cand = range(len(asms))
        for t in cand:
            planes.append(asms[t])
            walk(s + asms[t])
            planes.pop()

    if n == 1:
        return (1, [asms[0][:, :, None]] if collect else [])
    if kind == "ashm" and not np.isin(asms[root], (0, 1)).all():
        return (0, [])
    walk(asms[root].copy())
    return count, found


def _read_checkpoint(path: str, n: int, kind: str) -> tuple[int, int]:
    """Return (next root, count so far) from a checkpoint file, or (0, 0) if absent."""
    if not path or not os.path.exists(path):
        return 0, 0
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != CHECKPOINT_HEADER:
        raise AshmError(f"{path} is not an enumeration checkpoint")
    rec = dict(ln.split(None, 1) for ln in lines[1:])
    if rec.get("kind") != kind or int(rec.get("n", -1)) != n:
        raise AshmError(f"checkpoint {path} belongs to a different enumeration")
    return int(rec["next_root"]), int(rec["count"])


def _write_checkpoint(path: str, n: int, kind: str, next_root: int, count: int) -> None:
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(f"{CHECKPOINT_HEADER}\nkind {kind}\nn {n}\nnext_root {next_root}\ncount {count}\n")
    os.replace(tmp, path)


def _hyper_enumerate(cfg: EnumerationConfig):
    n, kind = cfg.n, cfg.kind.value
    roots = len(all_asm_arrays(n))
    collect = cfg.mode is not Mode.COUNT
    wrap = Ashm if kind == "ashm" else Pashm

    if cfg.mode is Mode.STREAM and not cfg.parallel:
        def stream():
            for r in range(roots):
                for arr in _ashm_subtree(n, kind, r, True)[1]:
                    yield wrap(SignHypermatrix(arr))
        return stream()

    start, total = (0, 0)
    if cfg.checkpoint and not collect:
        start, total = _read_checkpoint(cfg.checkpoint, n, kind)
    todo = list(range(start, roots))
    if cfg.parallel:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            # map keeps root order, so the merge is canonical
            results = pool.map(_ashm_subtree, *zip(*[(n, kind, r, collect) for r in todo]))
            results = list(results) if todo else []
    else:
        results = (_ashm_subtree(n, kind, r, collect) for r in todo)
    found = []
    for r, (c, arrs) in zip(todo, results):
        total += c
        found.extend(arrs)
        if cfg.checkpoint and not collect:
            _write_checkpoint(cfg.checkpoint, n, kind, r + 1, total)
    if not collect:
        return total
    out = [wrap(SignHypermatrix(a)) for a in found]
    return iter(out) if cfg.mode is Mode.STREAM else out


def enumerate_ashms(cfg: EnumerationConfig | int):
    if not isinstance(cfg, EnumerationConfig):
        cfg = EnumerationConfig(int(cfg), Kind.ASHM)
    if cfg.kind is not Kind.ASHM:
        cfg = EnumerationConfig(cfg.n, Kind.ASHM, cfg.mode, cfg.parallel, cfg.override,
                                cfg.workers, cfg.checkpoint)
    return _hyper_enumerate(cfg)


def enumerate_pashms(cfg: EnumerationConfig | int):
    if not isinstance(cfg, EnumerationConfig):
        cfg = EnumerationConfig(int(cfg), Kind.PASHM)
    if cfg.kind is not Kind.PASHM:
        cfg = EnumerationConfig(cfg.n, Kind.PASHM, cfg.mode, cfg.parallel, cfg.override,
                                cfg.workers, cfg.checkpoint)
    return _hyper_enumerate(cfg)


# ---------------------------------------------------------------------------
# term rank: nonzeros pairwise sharing no coordinate

def _matching_bound(cells: list[tuple[int, int, int]]) -> int:
    if not cells:
        return 0
    best = len(cells)
    for a, b in ((0, 1), (0, 2), (1, 2)):
        edges = {(c[a], c[b]) for c in cells}
        n_l = 1 + max(e[0] for e in edges)
        n_r = 1 + max(e[1] for e in edges)
        best = min(best, len(maximum_matching(BipartiteGraph(n_l, n_r, frozenset(edges)))))
    return best


def term_rank_3d(h, budget: int = 64) -> int:
    """Largest set of nonzeros with no two sharing a row, column or layer index.

    Branch and bound; the bound is the smallest 2D matching over the three
    coordinate projections of the still-compatible cells.
    """
    arr = as_array(h)
    cells = [tuple(c) for c in np.argwhere(arr != 0).tolist()]
    if len(cells) > budget:
        raise BudgetExceeded(f"{len(cells)} nonzeros exceed the budget of {budget}",
                             nonzeros=len(cells), budget=budget)
    best = 0

    def walk(chosen: int, cand: list):
        nonlocal best
        if chosen > best:
            best = chosen
        if not cand or chosen + _matching_bound(cand) <= best:
            return
        c, rest = cand[0], cand[1:]
        walk(chosen + 1, [d for d in rest if d[0] != c[0] and d[1] != c[1] and d[2] != c[2]])
        walk(chosen, rest)

    walk(0, cells)
    return best


# ---------------------------------------------------------------------------
# orthogonality

@dataclass(frozen=True)
class OrthogonalityReport:
    grid: tuple[tuple[int, ...], ...]
    orthogonal: bool


def asm_inner_product(x, y) -> int:
    a, b = as_array(x), as_array(y)
    if a.shape != b.shape:
        raise OrderMismatch(f"orders differ: {a.shape} vs {b.shape}")
    return int((a * b).sum())


def orthogonality_report(a, b) -> OrthogonalityReport:
    """Inner products of the horizontal planes, grid[i][j] = <A_i, B_j>."""
    x, y = as_array(a), as_array(b)
    if x.shape != y.shape:
        raise OrderMismatch(f"orders differ: {x.shape} vs {y.shape}")
    grid = np.einsum("abi,abj->ij", x, y)
    return OrthogonalityReport(tuple(map(tuple, grid.tolist())), bool((grid == 1).all()))


def permutation_arrays(n: int) -> Iterator[np.ndarray]:
    for perm in itertools.permutations(range(n)):
        p = np.zeros((n, n), dtype=np.int64)
        p[np.arange(n), perm] = 1
        yield p


def find_orthogonal_asm_mates(x, candidates: str | Iterable = "asms", override: bool = False) -> list[Asm]:
    """All candidates y with <x, y> = 1. ``candidates`` is "asms", "permutations" or an iterable."""
    a = as_array(validate_asm(x))
    n = a.shape[0]
    if candidates == "asms":
        _check_bound(n, "asm", override)
        pool = all_asm_arrays(n)
    elif candidates == "permutations":
        if n > 8 and not override:
            raise BoundExceeded("permutation candidates are bounded by n <= 8", n=n, bound=8)
        pool = permutation_arrays(n)
    else:
        pool = (as_array(c) for c in candidates)
    return [Asm(SignMatrix(y)) for y in pool if int((a * y).sum()) == 1]


# ---------------------------------------------------------------------------
# exploratory reports

@dataclass(frozen=True)
class ConjectureReport:
    n: int
    candidates: int
    reached: int
    unreached: tuple = ()

    @property
    def verified(self) -> bool:
        return not self.unreached


def verify_projection_conjecture(n: int, override: bool = False) -> ConjectureReport:
    """Is every positive vector c with c majorized by z_n the projection v(A) of some ASM?"""
    if n > 5 and not override:
        raise BoundExceeded("projection conjecture search is bounded by n <= 5", n=n, bound=5)
    z = tuple(range(n, 0, -1))
    total = n * (n + 1) // 2
    cands = [c for c in itertools.product(range(1, n + 1), repeat=n)
             if sum(c) == total and majorize(c, z).holds]
    reached = {weighted_projections(a)[0] for a in all_asm_arrays(n)}
    missing = tuple(c for c in cands if c not in reached)
    return ConjectureReport(n, len(cands), len(cands) - len(missing), missing)


@dataclass(frozen=True)
class InjectivityReport:
    n: int
    total: int
    distinct: int
    collisions: tuple = ()
    latin_collisions: int = 0
    sampled: bool = False

    @property
    def injective(self) -> bool:
        return not self.collisions


def random_ashm(n: int, rng: np.random.Generator) -> Ashm:
    """A random ASHM: a symmetric image of a diamond prefix, completed by random Birkhoff peeling."""
    from .complete import ashm_with_negatives, max_negatives

    if n >= 3:
        arr = as_array(ashm_with_negatives(n, int(rng.integers(0, max_negatives(n) + 1))))
    else:
        arr = as_array(latin_to_hypermatrix(cyclic_latin_square(n)))
    g = all_symmetries()[int(rng.integers(0, 48))]
    arr = g.act(arr)
    k = int(rng.integers(1, n + 1))
    return extend_prefix([arr[:, :, t] for t in range(k)], rng)


def ls_map_injectivity(n: int, samples: int | None = None, seed: int = 0) -> InjectivityReport:
    """Collisions of A -> L(A): exhaustive for n <= 3, sampled when ``samples`` is given."""
    if samples is None:
        if n > 3:
            raise BoundExceeded("exhaustive injectivity check is bounded by n <= 3; pass samples",
                                n=n, bound=3)
        pool = [as_array(a) for a in enumerate_ashms(EnumerationConfig(n, Kind.ASHM))]
    else:
        rng = np.random.default_rng(seed)
        seen = {}
        for _ in range(samples):
            arr = as_array(random_ashm(n, rng))
            seen[arr.tobytes()] = arr
        pool = list(seen.values())
    by_square: dict[bytes, list[np.ndarray]] = {}
    for arr in pool:
        sq = latin_of(arr).entries
        by_square.setdefault(sq.tobytes(), []).append(arr)
    collisions = []
    latin = 0
    for group in by_square.values():
        if len(group) > 1:
            sq = latin_of(group[0]).entries
            latin += int(is_latin_square(sq))
            collisions.append((sq.tolist(), [g.tolist() for g in group]))
    return InjectivityReport(n, len(pool), len(by_square), tuple(collisions), latin, samples is not None)


@dataclass(frozen=True)
class MultiplicityReport:
    n: int
    value: int
    count: int
    ashm: Ashm = field(repr=False)
    method: str = "construction"


def multiplicity_family(n: int) -> Ashm:
    """[F^1, ..., F^m] with m = (n-1)/2, then permutation planes chosen to make many entries m.

    A cell left empty by the prefix gets the value w + k from plane k, where w is
    its weighted prefix sum; each plane is an assignment maximizing w + k == m.
    """
    from scipy.optimize import linear_sum_assignment

    if n % 2 == 0 or n < 3:
        raise OrderNotOdd(f"the construction needs odd n >= 3, got {n}", n=n)
    m = (n - 1) // 2
    prefix = np.stack([fnk_array(n, k) for k in range(1, m + 1)], axis=2)
    w = prefix @ np.arange(1, m + 1)
    free = 1 - prefix.sum(axis=2)
    planes = [prefix[:, :, t] for t in range(m)]
    for k in range(m + 1, n + 1):
        cost = np.where(free == 1, -(w + k == m).astype(np.int64), n * n)
        rows, cols = linear_sum_assignment(cost)
        p = np.zeros((n, n), dtype=np.int64)
        p[rows, cols] = 1
        planes.append(p)
        free = free - p
    return Ashm(SignHypermatrix(np.stack(planes, axis=2)))


def entry_multiplicity_extremes(n: int) -> MultiplicityReport:
    """Exhaustive maximum multiplicity for n = 3, the (n-1)/2 construction for odd n >= 5."""
    if n == 3:
        best = None
        for a in enumerate_ashms(EnumerationConfig(3, Kind.ASHM)):
            sq = latin_of(a).entries
            vals, counts = np.unique(sq, return_counts=True)
            t = int(np.argmax(counts))
            if best is None or counts[t] > best[1]:
                best = (int(vals[t]), int(counts[t]), a)
        return MultiplicityReport(3, best[0], best[1], best[2], "exhaustive")
    a = multiplicity_family(n)
    m = (n - 1) // 2
    return MultiplicityReport(n, m, int((latin_of(a).entries == m).sum()), a)


@dataclass(frozen=True)
class SamplerReport:
    n: int
    trials: int
    found: bool
    pair: tuple | None = None

    def summary(self) -> str:
        return f"{'found' if self.found else 'not found'} after {self.trials} trials"


def sample_orthogonal_pair(n: int, trials: int = 1000, seed: int = 0) -> SamplerReport:
    """Heuristic: random ASHM pairs, looking for orthogonal ASHM-Latin squares."""
    rng = np.random.default_rng(seed)
    pool = []
    for t in range(1, trials + 1):
        a = as_array(random_ashm(n, rng))
        for b in pool:
            if orthogonality_report(a, b).orthogonal:
                return SamplerReport(n, t, True, (a.tolist(), b.tolist()))
        pool.append(a)
    return SamplerReport(n, trials, False)


def max_sigma(n: int) -> tuple[int, list]:
    """Largest number of nonzeros over all n x n x n ASHMs and the ASHMs attaining it."""
    best, arg = -1, []
    for a in enumerate_ashms(EnumerationConfig(n, Kind.ASHM)):
        s = sigma_counts(a).total
        if s > best:
            best, arg = s, [a]
        elif s == best:
            arg.append(a)
    return best, arg


def is_permutation_ashm(a) -> bool:
    arr = as_array(a)
    return all(is_permutation_matrix(arr[:, :, k]) for k in range(arr.shape[2]))
