"""Cached index tables over N-subsets of d orbitals (0-based, lexicographic)."""

from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np


@lru_cache(maxsize=None)
def subsets(n, d):
    """All sorted n-subsets of range(d) as an int64 array of shape (C(d, n), n)."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    out = np.array(list(combinations(range(d), n)), dtype=np.int64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=None)
def subset_index(n, d):
    """Mapping from sorted 0-based tuple to its row in ``subsets(n, d)``."""
    return {tuple(int(x) for x in row): i for i, row in enumerate(subsets(n, d))}


class CreationTable:
    """Scatter table linking n-subsets J to (n-1)-subsets L = J minus one orbital.

    Row r of the flat arrays describes the pair (J, p): orbital ``k = J[p]``
    is removed, leaving ``L``; ``sign = (-1)**p`` is the sign of moving k
    to the front of the wedge product.
    """

    __slots__ = ("n", "d", "j", "l", "k", "sign", "sub_rows")

    def __init__(self, n, d):
        self.n = n
        self.d = d
        rows = subsets(n, d)
        lower = subset_index(n - 1, d)
        nj = rows.shape[0]
        self.j = np.repeat(np.arange(nj, dtype=np.int64), n)
        self.k = rows.reshape(-1).copy()
        self.sign = np.tile(np.array([(-1.0) ** p for p in range(n)]), nj)
        ls = np.empty(nj * n, dtype=np.int64)
        r = 0
        for row in rows:
            t = tuple(int(x) for x in row)
            for p in range(n):
                ls[r] = lower[t[:p] + t[p + 1:]]
                r += 1
        self.l = ls
        self.sub_rows = subsets(n - 1, d)
        for a in (self.j, self.k, self.sign, self.l):
            a.setflags(write=False)

    def __repr__(self):
        return f"CreationTable(n={self.n}, d={self.d}, entries={self.j.size})"


@lru_cache(maxsize=None)
def creation_table(n, d):
    if n < 1:
        raise ValueError("creation table needs n >= 1")
    return CreationTable(n, d)


def dimension(n, d):
    return comb(d, n)
