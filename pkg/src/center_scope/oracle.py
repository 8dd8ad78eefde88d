"""Exhaustive enumeration of decompositions, for cross-checking the solver.

Pruning is entrywise only: the residual must stay non-negative, and every
positive residual entry must still be reachable by some remaining candidate
column. No reduction, no positive-semidefiniteness test, no algebraic
conditions.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import product

import numpy as np

__all__ = ["brute_force_decompositions", "MAX_SIZE", "MAX_TRACE"]

MAX_SIZE = 6
MAX_TRACE = 24


def brute_force_decompositions(M) -> list[tuple[tuple[int, ...], ...]]:
    """All multisets of nonzero non-negative integer columns ``w`` with ``sum w w^T = M``.

    Each multiset is returned as a tuple of columns in decreasing lexicographic
    order; the list is sorted by (number of columns, columns).
    """
    M = np.asarray(M, dtype=np.int64)
    n = M.shape[0]
    if M.shape != (n, n):
        raise ValueError("M must be square")
    if n > MAX_SIZE or int(np.trace(M)) > MAX_TRACE:
        raise ValueError(f"brute force limited to n <= {MAX_SIZE} and trace <= {MAX_TRACE}")
    if (M != M.T).any() or (M < 0).any():
        return []

    ranges = [range(math.isqrt(int(M[i, i])), -1, -1) for i in range(n)]
    columns = [w for w in product(*ranges) if any(w)]  # decreasing lex order
    outers = [np.outer(w, w) for w in columns]
    # reach[k] is nonzero exactly where some column k, k+1, ... has a nonzero outer product
    reach = [np.zeros((n, n), dtype=np.int64)] * (len(columns) + 1)
    for k in range(len(columns) - 1, -1, -1):
        reach[k] = np.maximum(reach[k + 1], outers[k])

    @lru_cache(maxsize=None)
    def completions(key: bytes, start: int) -> tuple[tuple[int, ...], ...]:
        # all index sequences start <= k1 <= k2 <= ... whose outer products sum to the residual
        residual = np.frombuffer(key, dtype=np.int64).reshape(n, n)
        if not residual.any():
            return ((),)
        out = []
        for k in range(start, len(columns)):
            if ((residual > 0) & (reach[k] == 0)).any():
                break
            rest = residual - outers[k]
            if (rest >= 0).all():
                out.extend((k,) + tail for tail in completions(rest.tobytes(), k))
        return tuple(out)

    found = [tuple(columns[k] for k in seq) for seq in completions(M.tobytes(), 0)]
    found.sort(key=lambda cols: (len(cols), cols))
    return found
