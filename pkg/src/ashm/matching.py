"""Bipartite matching, Birkhoff peeling and subpermutation decomposition."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import AshmError, SignMatrix, as_array


class UnequalLineSums(AshmError):
    pass


@dataclass(frozen=True)
class BipartiteGraph:
    n_left: int
    n_right: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        edges = frozenset((int(u), int(v)) for u, v in self.edges)
        for u, v in edges:
            if not (0 <= u < self.n_left and 0 <= v < self.n_right):
                raise AshmError(f"edge {(u, v)} out of range")
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_mask(cls, mask) -> "BipartiteGraph":
        mask = np.asarray(mask, dtype=bool)
        return cls(mask.shape[0], mask.shape[1], frozenset(map(tuple, np.argwhere(mask).tolist())))

    def adjacency(self) -> list[list[int]]:
        adj = [[] for _ in range(self.n_left)]
        for u, v in sorted(self.edges):
            adj[u].append(v)
        return adj


def _kuhn(adj: list[list[int]], n_right: int) -> list[int]:
    """match_left[u] = v or -1, augmenting from left vertices in index order."""
    match_right = [-1] * n_right
    match_left = [-1] * len(adj)
    for root in range(len(adj)):
        # iterative DFS over alternating paths
        seen = [False] * n_right
        stack = [(root, 0)]
        parent: dict[int, tuple[int, int]] = {}
        found = -1
        while stack and found < 0:
            u, pos = stack.pop()
            while pos < len(adj[u]):
                v = adj[u][pos]
                pos += 1
                if seen[v]:
                    continue
                seen[v] = True
                parent[v] = (u, pos)
                if match_right[v] < 0:
                    found = v
                    break
                stack.append((u, pos))
                stack.append((match_right[v], 0))
                break
        if found < 0:
            continue
        v = found
        while True:
            u = parent[v][0]
            prev = match_left[u]
            match_left[u], match_right[v] = v, u
            if u == root:
                break
            v = prev
    return match_left


def maximum_matching(g: BipartiteGraph) -> set[tuple[int, int]]:
    """Maximum matching as a set of 0-based (left, right) pairs; deterministic."""
    ml = _kuhn(g.adjacency(), g.n_right)
    return {(u, v) for u, v in enumerate(ml) if v >= 0}


def perfect_matching(mask) -> np.ndarray | None:
    """A permutation matrix inside ``mask`` or None when none exists."""
    mask = np.asarray(mask, dtype=bool)
    n = mask.shape[0]
    adj = [list(np.flatnonzero(row)) for row in mask]
    ml = _kuhn(adj, mask.shape[1])
    if min(ml, default=0) < 0:
        return None
    p = np.zeros(mask.shape, dtype=np.int64)
    p[np.arange(n), ml] = 1
    return p


def _line_sum(m: np.ndarray) -> int:
    rows, cols = m.sum(axis=1), m.sum(axis=0)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise UnequalLineSums(f"matrix of shape {m.shape} is not square")
    if (m < 0).any():
        raise UnequalLineSums("matrix has negative entries")
    k = int(rows[0])
    if (rows != k).any() or (cols != k).any():
        raise UnequalLineSums(f"line sums are not all equal: rows {rows.tolist()}, columns {cols.tolist()}")
    return k


def birkhoff_arrays(m, rng: np.random.Generator | None = None) -> list[np.ndarray]:
    """Deterministic unless ``rng`` is given, which relabels rows and columns first."""
    m = as_array(m).copy()
    k = _line_sum(m)
    if rng is not None:
        rp, cp = rng.permutation(m.shape[0]), rng.permutation(m.shape[0])
        parts = birkhoff_arrays(m[np.ix_(rp, cp)])
        out = []
        for p in parts:
            q = np.zeros_like(p)
            q[np.ix_(rp, cp)] = p
            out.append(q)
        return [out[t] for t in rng.permutation(k)] if k else out
    out = []
    for _ in range(k):
        p = perfect_matching(m > 0)
        if p is None:  # pragma: no cover - excluded by regularity
            raise RuntimeError("regular matrix without a perfect matching")
        out.append(p)
        m -= p
    return out


def birkhoff_decompose(m, rng: np.random.Generator | None = None) -> list[SignMatrix]:
    """Peel k permutation matrices from a nonnegative integral matrix with line sums k."""
    return [SignMatrix(p) for p in birkhoff_arrays(m, rng)]


def subpermutation_arrays(m) -> list[np.ndarray]:
    """Colour the ones of a (0,1) matrix with t = max line sum colours (Konig).

    Each colour class is a subpermutation matrix. Conflicts are repaired by
    swapping two colours along an alternating path.
    """
    m = as_array(m)
    if not np.isin(m, (0, 1)).all():
        raise AshmError("subpermutation decomposition needs a (0,1) matrix")
    rows, cols = m.shape
    t = int(max(m.sum(axis=1).max(initial=0), m.sum(axis=0).max(initial=0)))
    at_row = [dict() for _ in range(rows)]  # colour -> column
    at_col = [dict() for _ in range(cols)]  # colour -> row
    for i, j in np.argwhere(m == 1).tolist():
        a = next(c for c in range(t) if c not in at_row[i])
        b = next(c for c in range(t) if c not in at_col[j])
        if a in at_col[j]:
            # walk the a/b path that starts at column j and swap its colours
            path, side, node, c = [], "col", j, a
            while True:
                nxt = (at_col if side == "col" else at_row)[node].get(c)
                if nxt is None:
                    break
                path.append((nxt, node, c) if side == "col" else (node, nxt, c))
                side, node = ("row", nxt) if side == "col" else ("col", nxt)
                c = b if c == a else a
            for r, q, c in path:
                del at_row[r][c], at_col[q][c]
            for r, q, c in path:
                c = b if c == a else a
                at_row[r][c], at_col[q][c] = q, r
        at_row[i][a], at_col[j][a] = j, i
    out = []
    for c in range(t):
        p = np.zeros((rows, cols), dtype=np.int64)
        for i in range(rows):
            if c in at_row[i]:
                p[i, at_row[i][c]] = 1
        out.append(p)
    return out


def subpermutation_decompose(m) -> list[np.ndarray]:
    return subpermutation_arrays(m)


def term_rank_2d(m) -> int:
    """Maximum number of nonzeros with no two in a line (Konig)."""
    arr = as_array(m)
    return len(maximum_matching(BipartiteGraph.from_mask(arr != 0)))


def regular_zero_one(n: int, forced_one, forced_zero, k: int) -> np.ndarray | None:
    """A (0,1) n x n matrix with line sums k, ones on ``forced_one`` and zeros on ``forced_zero``.

    Solved as a max-flow problem (source -> rows -> columns -> sink). Returns
    None when infeasible.
    """
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import maximum_flow

    one = np.asarray(forced_one, dtype=bool)
    zero = np.asarray(forced_zero, dtype=bool)
    if (one & zero).any():
        return None
    need_r = k - one.sum(axis=1)
    need_c = k - one.sum(axis=0)
    if (need_r < 0).any() or (need_c < 0).any():
        return None
    free = ~(one | zero)
    src, sink = 2 * n, 2 * n + 1
    u, v, cap = [], [], []
    for i in range(n):
        u.append(src), v.append(i), cap.append(int(need_r[i]))
        u.append(n + i), v.append(sink), cap.append(int(need_c[i]))
    for i, j in np.argwhere(free).tolist():
        u.append(i), v.append(n + j), cap.append(1)
    graph = csr_matrix((np.array(cap, dtype=np.int32), (u, v)), shape=(2 * n + 2, 2 * n + 2))
    res = maximum_flow(graph, src, sink)
    if res.flow_value != int(need_r.sum()) or need_r.sum() != need_c.sum():
        return None
    flow = res.flow.toarray()[:n, n:2 * n]
    return (one | (free & (flow > 0))).astype(np.int64)
