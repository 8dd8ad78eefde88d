"""Exact rational/integer matrix algebra used by the reduction step.

Integer matrices are plain nested lists or integer numpy arrays; rational
matrices are nested lists of :class:`fractions.Fraction`.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np

from .cyclotomic import CycloNumber
from .errors import InvariantViolation

__all__ = [
    "as_int_rows",
    "rank_rational",
    "determinant",
    "select_nonsingular_minor",
    "compute_reduction",
    "is_psd_exact",
    "is_psd_integer",
    "min_eigenvalue_estimate",
    "field_kernel",
]


def as_int_rows(M) -> list[list[int]]:
    return [[int(x) for x in row] for row in np.asarray(M, dtype=object).tolist()]


def _bareiss(rows: list[list]) -> tuple[int, object]:
    """Fraction-free elimination in place. Returns (rank, last nonzero pivot).

    Works for integer entries (exact divisions) and for Fractions.
    """
    n_rows = len(rows)
    n_cols = len(rows[0]) if rows else 0
    prev = 1
    rank = 0
    for c in range(n_cols):
        pivot_row = next((i for i in range(rank, n_rows) if rows[i][c] != 0), None)
        if pivot_row is None:
            continue
        rows[rank], rows[pivot_row] = rows[pivot_row], rows[rank]
        p = rows[rank][c]
        for i in range(rank + 1, n_rows):
            f = rows[i][c]
            ri = rows[i]
            rr = rows[rank]
            for j in range(c + 1, n_cols):
                v = p * ri[j] - f * rr[j]
                ri[j] = v // prev if isinstance(v, int) else v / prev
            ri[c] = 0
        prev = p
        rank += 1
    return rank, prev


def rank_rational(M) -> int:
    """Exact rank over Q."""
    rows = as_int_rows(M) if not _has_fractions(M) else [list(map(Fraction, r)) for r in M]
    if not rows or not rows[0]:
        return 0
    return _bareiss(rows)[0]


def _has_fractions(M) -> bool:
    return any(isinstance(x, Fraction) for row in M for x in row)


def determinant(M) -> int | Fraction:
    """Exact determinant of a square integer or rational matrix."""
    rows = [list(r) for r in (M if _has_fractions(M) else as_int_rows(M))]
    n = len(rows)
    if n == 0:
        return 1
    if any(len(r) != n for r in rows):
        raise ValueError("determinant of a non-square matrix")
    # track the row swaps ourselves so the sign is right
    sign = 1
    prev = 1
    for c in range(n):
        pivot_row = next((i for i in range(c, n) if rows[i][c] != 0), None)
        if pivot_row is None:
            return 0
        if pivot_row != c:
            rows[c], rows[pivot_row] = rows[pivot_row], rows[c]
            sign = -sign
        p = rows[c][c]
        for i in range(c + 1, n):
            f = rows[i][c]
            for j in range(c + 1, n):
                v = p * rows[i][j] - f * rows[c][j]
                rows[i][j] = v // prev if isinstance(v, int) else v / prev
            rows[i][c] = 0
        prev = p
    return sign * rows[n - 1][n - 1]


def _principal(M: list[list], idx: Sequence[int]) -> list[list]:
    return [[M[i][j] for j in idx] for i in idx]


def select_nonsingular_minor(M, r: int | None = None) -> tuple[list[int], list[int]]:
    """Pick the principal submatrix used for the rank reduction.

    Rows/columns are first stably sorted by increasing diagonal entry. In that
    order the lexicographically least ``r``-subset with a nonsingular principal
    submatrix is chosen.

    Returns ``(perm, subset)`` where ``perm[k]`` is the original index at sorted
    position ``k`` and ``subset`` holds sorted positions. The original indices
    are ``[perm[s] for s in subset]``.
    """
    rows = as_int_rows(M)
    n = len(rows)
    if r is None:
        r = rank_rational(rows)
    perm = sorted(range(n), key=lambda i: (rows[i][i], i))
    P = [[rows[perm[i]][perm[j]] for j in range(n)] for i in range(n)]
    if r == 0:
        return perm, []

    # Greedy is exact when principal nonsingularity forms a matroid (e.g. PSD
    # input, where it is linear independence of Gram factor rows).
    chosen: list[int] = []
    for i in range(n):
        if len(chosen) == r:
            break
        if determinant(_principal(P, chosen + [i])) != 0:
            chosen.append(i)
    if len(chosen) == r:
        best = chosen
        # confirm no lexicographically smaller subset exists (only matters off the matroid case)
        if not _is_psd_int(P):
            best = _lex_least_subset(P, r)
    else:
        best = _lex_least_subset(P, r)
    if determinant(_principal(P, best)) == 0:
        raise InvariantViolation("selected principal minor is singular")
    return perm, best


def _lex_least_subset(P: list[list[int]], r: int) -> list[int]:
    for subset in combinations(range(len(P)), r):
        if determinant(_principal(P, subset)) != 0:
            return list(subset)
    raise InvariantViolation(f"no nonsingular {r}x{r} principal submatrix exists")


def compute_reduction(M, subset: Sequence[int]) -> list[list[Fraction]]:
    """The unique rational n x r matrix R with ``M = R M[S,S] R^T``.

    ``subset`` lists original indices; rows of R follow the original order,
    columns follow ``subset``. Rows of R indexed by ``subset`` form the identity.
    """
    rows = as_int_rows(M)
    n = len(rows)
    S = list(subset)
    r = len(S)
    Mp = [[Fraction(rows[i][j]) for j in S] for i in S]
    if determinant(Mp) == 0:
        raise ValueError("selected principal submatrix is singular")
    inv = _inverse(Mp)
    R = [
        [sum((rows[i][S[k]] * inv[k][j] for k in range(r)), Fraction(0)) for j in range(r)]
        for i in range(n)
    ]
    # R M' R^T must reproduce M; fails when rank(M) > |S|
    RMp = [[sum((R[i][k] * Mp[k][j] for k in range(r)), Fraction(0)) for j in range(r)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            if sum((RMp[i][k] * R[j][k] for k in range(r)), Fraction(0)) != rows[i][j]:
                raise ValueError("rank of M exceeds the size of the selected subset")
    return R


def _inverse(A: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(A)
    aug = [list(A[i]) + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for c in range(n):
        p = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[p] = aug[p], aug[c]
        pv = aug[c][c]
        aug[c] = [x / pv for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]


def _check_symmetric(rows: list[list]) -> None:
    n = len(rows)
    for i in range(n):
        if len(rows[i]) != n:
            raise ValueError("matrix is not square")
        for j in range(i):
            if rows[i][j] != rows[j][i]:
                raise ValueError(f"matrix is not symmetric at ({i}, {j})")


def is_psd_exact(M) -> bool:
    """Exact positive-semidefiniteness by symmetric elimination with diagonal pivoting.

    At each step the largest remaining diagonal entry is the pivot. A negative
    pivot means not PSD; a zero pivot means every remaining entry must vanish.
    """
    rows = [[Fraction(x) for x in r] for r in M]
    _check_symmetric(rows)
    return _psd_eliminate(rows)


def is_psd_integer(M) -> bool:
    """Same decision as :func:`is_psd_exact` for integer input, fraction-free."""
    rows = as_int_rows(M)
    _check_symmetric(rows)
    return _is_psd_int(rows)


def _is_psd_int(rows: list[list[int]]) -> bool:
    A = [list(r) for r in rows]
    n = len(A)
    active = list(range(n))
    prev = 1
    while active:
        p = max(active, key=lambda i: A[i][i])
        piv = A[p][p]
        if piv < 0:
            return False
        if piv == 0:
            return all(A[i][j] == 0 for i in active for j in active)
        active.remove(p)
        # Bareiss update; every entry stays an integer and the scale stays positive
        for i in active:
            Api = A[p][i]
            for j in active:
                A[i][j] = (piv * A[i][j] - Api * A[p][j]) // prev
        prev = piv
    return True


def _psd_eliminate(A: list[list[Fraction]]) -> bool:
    active = list(range(len(A)))
    while active:
        p = max(active, key=lambda i: A[i][i])
        piv = A[p][p]
        if piv < 0:
            return False
        if piv == 0:
            return all(A[i][j] == 0 for i in active for j in active)
        active.remove(p)
        for i in active:
            f = A[i][p] / piv
            if f:
                for j in active:
                    A[i][j] -= f * A[p][j]
    return True


def min_eigenvalue_estimate(M) -> float:
    """Least eigenvalue of a symmetric matrix in double precision (LAPACK)."""
    A = np.asarray(M, dtype=float)
    if A.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(A)[0])


def field_kernel(M: Sequence[Sequence[CycloNumber]]) -> list[list[CycloNumber]]:
    """Basis of the right nullspace of a matrix over Q(zeta_n)."""
    rows = [list(r) for r in M]
    if not rows:
        return []
    n_cols = len(rows[0])
    conductor = next(x.conductor for r in rows for x in r)
    zero = CycloNumber.from_rational(conductor, 0)
    one = CycloNumber.from_rational(conductor, 1)
    rows = [[x if isinstance(x, CycloNumber) else CycloNumber.from_rational(conductor, x) for x in r] for r in rows]

    pivots: list[int] = []
    rank = 0
    for c in range(n_cols):
        p = next((i for i in range(rank, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[rank], rows[p] = rows[p], rows[rank]
        inv = rows[rank][c].inv()
        rows[rank] = [x * inv for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[rank])]
        pivots.append(c)
        rank += 1
        if rank == len(rows):
            break

    basis = []
    for free in (c for c in range(n_cols) if c not in pivots):
        vec = [zero] * n_cols
        vec[free] = one
        for i, pc in enumerate(pivots):
            vec[pc] = -rows[i][free]
        basis.append(vec)
    return basis
