"""Independent oracles shared by the test modules.

Nothing here calls into the library's validators or search code, so the
checks below can disagree with it.
"""
import itertools
from math import factorial

import numpy as np
import pytest

from ashm.search import random_ashm


def alternates(seq) -> bool:
    """Nonzeros alternate in sign, starting and ending with +1."""
    nz = [int(x) for x in seq if x != 0]
    return bool(nz) and nz[0] == 1 and nz[-1] == 1 and all(a == -b for a, b in zip(nz, nz[1:]))


def oracle_is_asm(m) -> bool:
    m = np.asarray(m)
    return m.shape[0] == m.shape[1] and all(alternates(r) for r in m) and all(alternates(c) for c in m.T)


def oracle_is_ashm(h) -> bool:
    h = np.asarray(h)
    n = h.shape[0]
    return all(alternates(h[i, j, :]) and alternates(h[i, :, j]) and alternates(h[:, i, j])
               for i in range(n) for j in range(n))


def asm_count_formula(n: int) -> int:
    """prod_{k=0}^{n-1} (3k+1)! / (n+k)!"""
    num = den = 1
    for k in range(n):
        num *= factorial(3 * k + 1)
        den *= factorial(n + k)
    return num // den


def brute_asms(n: int) -> list[np.ndarray]:
    """Every n x n ASM by filtering all (0,+-1) matrices; n <= 3."""
    out = []
    for cells in itertools.product((-1, 0, 1), repeat=n * n):
        m = np.array(cells).reshape(n, n)
        if oracle_is_asm(m):
            out.append(m)
    return out


def brute_ashms(n: int) -> list[np.ndarray]:
    """Every n x n x n ASHM from all plane tuples of brute-force ASMs."""
    asms = brute_asms(n)
    out = []
    for planes in itertools.product(asms, repeat=n):
        h = np.stack(planes, axis=2)
        if oracle_is_ashm(h):
            out.append(h)
    return out


def brute_term_rank(h) -> int:
    cells = [tuple(c) for c in np.argwhere(np.asarray(h) != 0)]
    best = 0
    for size in range(1, len(cells) + 1):
        found = False
        for sub in itertools.combinations(cells, size):
            if all(len({c[a] for c in sub}) == size for a in range(3)):
                found = True
                break
        if not found:
            break
        best = size
    return best


def brute_term_rank_2d(m) -> int:
    cells = [tuple(c) for c in np.argwhere(np.asarray(m) != 0)]
    best = 0
    for size in range(1, len(cells) + 1):
        if not any(len({c[0] for c in s}) == size and len({c[1] for c in s}) == size
                   for s in itertools.combinations(cells, size)):
            break
        best = size
    return best


@pytest.fixture(scope="session")
def asms3():
    return brute_asms(3)


@pytest.fixture(scope="session")
def ashms3():
    return brute_ashms(3)


@pytest.fixture(scope="session")
def random_ashms():
    """Random ASHMs of orders 4..7, fixed seed."""
    rng = np.random.default_rng(2024)
    return [np.asarray(random_ashm(int(n), rng)) for n in rng.integers(4, 8, size=60)]
