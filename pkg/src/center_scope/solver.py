"""Enumeration of algebraic decompositions ``M = A A^T``.

The search works on the rank-reduced problem ``M = R M' R^T``: columns of a
decomposition of ``M'`` are built one at a time in decreasing lexicographic
order, and each one is lifted through ``R`` as soon as it is proposed.

Everything that depends only on a single column (integrality of the lift,
the d-number and divisibility tests, the entrywise bound against ``M'``) is
decided once up front, producing a sorted table of admissible columns. The
depth-first search then only has to intersect that table with the residual
bounds and the positive-semidefiniteness test at every node.
"""

from __future__ import annotations

import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .cyclotomic import CycloNumber, divides_as_algebraic_integer, is_d_number
from .exact_linalg import (
    _is_psd_int,
    compute_reduction,
    rank_rational,
    select_nonsingular_minor,
)
from .fusion_data import DecompositionProblem

__all__ = [
    "SolverConfig",
    "ReducedProblem",
    "PartialDecomposition",
    "InductionResult",
    "SearchOutcome",
    "reduce_problem",
    "identity_reduction",
    "new_column_candidates",
    "admissible_columns",
    "search_all",
    "lift_column",
    "verify_decomposition",
    "check_decomposition",
    "split_blocks",
    "canonical_columns",
]

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    psd_mode: str = "numeric"
    eig_tolerance: float = -1e-3
    max_solutions: int | None = None
    max_columns: int | None = None
    time_limit: float | None = None
    thread_count: int = 1
    forbid_zero_dots: bool = False
    reduce: bool = True
    minor_subset: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.psd_mode not in ("numeric", "exact"):
            raise ValueError(f"psd_mode must be 'numeric' or 'exact', not {self.psd_mode!r}")
        if self.eig_tolerance > 0:
            raise ValueError("eig_tolerance must be <= 0")
        if self.thread_count < 1:
            raise ValueError("thread_count must be >= 1")
        if self.max_solutions is not None and self.max_solutions < 0:
            raise ValueError("max_solutions must be >= 0")


@dataclass(frozen=True, eq=False)
class ReducedProblem:
    """``M = R M' R^T`` with ``M' = M[subset, subset]``.

    ``permutation`` is the diagonal-sorting order used to pick ``subset``;
    ``subset`` holds original indices in selection order, and ``R`` has rows in
    the original order with columns following ``subset``.
    """

    M_prime: np.ndarray
    R: tuple[tuple[Fraction, ...], ...]
    vs_reduced: tuple[tuple[CycloNumber, ...], ...]
    permutation: tuple[int, ...]
    subset: tuple[int, ...]

    @property
    def rank(self) -> int:
        return self.M_prime.shape[0]

    @property
    def R_scaled(self) -> tuple[np.ndarray, int]:
        """``R`` as an integer matrix over one common denominator."""
        den = 1
        for row in self.R:
            for x in row:
                den = den * x.denominator // math.gcd(den, x.denominator)
        return np.array([[int(x * den) for x in row] for row in self.R], dtype=np.int64), den


def _dot_vectors(vs: Sequence[Sequence[CycloNumber]], R: Sequence[Sequence[Fraction]]) -> tuple:
    out = []
    for v in vs:
        zero = 0 * v[0]
        r = len(R[0]) if R else 0
        out.append(tuple(sum((v[i] * R[i][j] for i in range(len(v)) if R[i][j]), zero) for j in range(r)))
    return tuple(out)


def reduce_problem(p: DecompositionProblem, minor_subset: Sequence[int] | None = None) -> ReducedProblem:
    """Rank reduction with the diagonal-sort / lex-least-subset heuristic.

    ``minor_subset`` (original indices) overrides the heuristic.
    """
    r = rank_rational(p.M)
    if minor_subset is not None:
        subset = list(minor_subset)
        if len(subset) != r:
            raise ValueError(f"subset has {len(subset)} indices but rank(M) = {r}")
        perm = list(range(p.size))
    else:
        perm, positions = select_nonsingular_minor(p.M, r)
        subset = [perm[s] for s in positions]
    R = compute_reduction(p.M, subset)
    M_prime = p.M[np.ix_(subset, subset)]
    return ReducedProblem(
        M_prime=M_prime,
        R=tuple(tuple(row) for row in R),
        vs_reduced=_dot_vectors(p.vs, R),
        permutation=tuple(perm),
        subset=tuple(subset),
    )


def identity_reduction(p: DecompositionProblem) -> ReducedProblem:
    """Search directly on ``M`` (no rank reduction)."""
    n = p.size
    R = tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
    return ReducedProblem(p.M.copy(), R, tuple(tuple(v) for v in p.vs), tuple(range(n)), tuple(range(n)))


@dataclass(frozen=True, eq=False)
class PartialDecomposition:
    columns: tuple[tuple[int, ...], ...]
    residual: np.ndarray

    @classmethod
    def empty(cls, M_prime: np.ndarray) -> "PartialDecomposition":
        return cls((), np.asarray(M_prime, dtype=np.int64).copy())

    def append(self, w: Sequence[int]) -> "PartialDecomposition":
        w = np.asarray(w, dtype=np.int64)
        return PartialDecomposition(self.columns + (tuple(int(x) for x in w),), self.residual - np.outer(w, w))

    @property
    def zero_prefix(self) -> int:
        return _zero_prefix(self.residual)


def _zero_prefix(residual: np.ndarray) -> int:
    r = residual.shape[0]
    p = 0
    while p < r and not residual[p, : p + 1].any():
        p += 1
    return p


# -- per-column conditions ----------------------------------------------------


def lift_column(w: Sequence[int], R) -> tuple[int, ...] | None:
    """``R w`` if it is a non-negative integer vector, else ``None``."""
    out = []
    for row in R:
        x = sum((Fraction(c) * int(wi) for c, wi in zip(row, w)), Fraction(0))
        if x.denominator != 1 or x < 0:
            return None
        out.append(int(x))
    return tuple(out)


@lru_cache(maxsize=1 << 18)
def _value_passes(x: CycloNumber, D: CycloNumber, forbid_zero: bool) -> bool:
    if x.is_zero():
        return not forbid_zero
    return is_d_number(x) and divides_as_algebraic_integer(x, D)


def column_algebraic(dots: Sequence[CycloNumber], D: CycloNumber, forbid_zero_dots: bool = False) -> bool:
    return all(_value_passes(x, D, forbid_zero_dots) for x in dots)


class _DotEvaluator:
    """Evaluates ``v . w`` for many integer vectors ``w`` with integer arithmetic."""

    def __init__(self, vs: Sequence[Sequence[CycloNumber]]):
        self.parts = []
        for v in vs:
            den = 1
            for x in v:
                den = den * x.den // math.gcd(den, x.den)
            num = np.array([[c * (den // x.den) for c in x.num] for x in v], dtype=object)
            self.parts.append((v[0].conductor if v else 1, num, den))

    def __call__(self, w: Sequence[int]) -> list[CycloNumber]:
        from .cyclotomic import _normalize

        w = np.asarray(list(w), dtype=object)
        out = []
        for conductor, num, den in self.parts:
            coeffs = (w @ num).tolist() if len(w) else [0] * num.shape[1]
            out.append(CycloNumber(conductor, *_normalize([int(c) for c in coeffs], den)))
        return out


def _column_bounds_iter(residual: np.ndarray, prefix_zero: int | None = None) -> Iterator[tuple[int, ...]]:
    """Non-negative vectors with ``w_i w_j <= residual_ij``; entries below ``prefix_zero`` are 0."""
    r = residual.shape[0]
    w = [0] * r
    diag_bounds = [math.isqrt(max(int(residual[i, i]), 0)) for i in range(r)]

    def rec(i: int):
        if i == r:
            yield tuple(w)
            return
        if prefix_zero is not None and i < prefix_zero:
            w[i] = 0
            yield from rec(i + 1)
            return
        bound = diag_bounds[i]
        for j in range(i):
            if w[j]:
                bound = min(bound, int(residual[i, j]) // w[j])
        for x in range(bound, -1, -1):
            w[i] = x
            yield from rec(i + 1)
        w[i] = 0

    yield from rec(0)


def _psd_ok(mat: np.ndarray, cfg: SolverConfig) -> bool:
    if cfg.psd_mode == "exact":
        return _is_psd_int(mat.tolist())
    if mat.size == 0:
        return True
    return float(np.linalg.eigvalsh(mat.astype(float))[0]) >= cfg.eig_tolerance


def new_column_candidates(
    B: PartialDecomposition, rp: ReducedProblem, D: CycloNumber, cfg: SolverConfig = SolverConfig()
) -> list[tuple[int, ...]]:
    """Every admissible next column for ``B``, in decreasing lexicographic order.

    A column ``w`` qualifies when it is non-negative, is positive at the first
    row not yet covered, is lexicographically at most the last column,
    respects ``w_i w_j <= residual_ij``, lifts through ``R`` to a non-negative
    integer column, passes the d-number and divisibility tests for every
    dimension vector, and leaves a positive semidefinite residual.
    """
    res = B.residual
    r = res.shape[0]
    p = B.zero_prefix
    if p == r:
        return []
    last = B.columns[-1] if B.columns else None
    dots = _DotEvaluator(rp.vs_reduced)
    out = []
    for w in _column_bounds_iter(res, prefix_zero=p):
        if w[p] == 0:
            continue
        if last is not None and w > last:
            continue
        if lift_column(w, rp.R) is None:
            continue
        if not column_algebraic(dots(w), D, cfg.forbid_zero_dots):
            continue
        wv = np.array(w, dtype=np.int64)
        if not _psd_ok(res - np.outer(wv, wv), cfg):
            continue
        out.append(w)
    return out


def admissible_columns(
    rp: ReducedProblem, D: CycloNumber, forbid_zero_dots: bool = False, M: np.ndarray | None = None
) -> list[tuple[int, ...]]:
    """All columns that could appear in some decomposition, decreasing lex order.

    These are the column-local conditions evaluated against the empty
    decomposition: entrywise bound against ``M'``, integral non-negative lift,
    algebraic tests. If the full ``M`` is given the lifted column must also
    satisfy ``x x^T <= M`` entrywise.
    """
    R_int, den = rp.R_scaled
    dots = _DotEvaluator(rp.vs_reduced)
    out = []
    for w in _column_bounds_iter(rp.M_prime):
        if not any(w):
            continue
        x = R_int @ np.array(w, dtype=np.int64)
        if (x < 0).any() or (x % den).any():
            continue
        if M is not None:
            x = x // den
            if (np.outer(x, x) > M).any():
                continue
        if not column_algebraic(dots(w), D, forbid_zero_dots):
            continue
        out.append(w)
    return out  # _column_bounds_iter already yields in decreasing lex order


# -- results -----------------------------------------------------------------


def canonical_columns(A: np.ndarray) -> np.ndarray:
    """Columns of ``A`` sorted into decreasing lexicographic order."""
    A = np.asarray(A, dtype=np.int64)
    if A.shape[1] == 0:
        return A.copy()
    order = sorted(range(A.shape[1]), key=lambda j: tuple(A[:, j]), reverse=True)
    return A[:, order]


def split_blocks(A: np.ndarray, layout: Sequence[int]) -> list[np.ndarray]:
    """Consecutive row slices of ``A`` of the given sizes."""
    A = np.asarray(A)
    if sum(layout) != A.shape[0] or any(k < 0 for k in layout):
        raise ValueError(f"layout {tuple(layout)} does not match {A.shape[0]} rows")
    out = []
    start = 0
    for k in layout:
        out.append(A[start : start + k])
        start += k
    return out


@dataclass(eq=False)
class InductionResult:
    """A decomposition of the original ``M``.

    Columns are ordered by decreasing lexicographic order of their entries on
    the reduction rows (``ReducedProblem.subset``, in that order).
    """

    A: np.ndarray
    blocks: list[np.ndarray]
    names: tuple[str, ...]
    dots: list[list[CycloNumber]]  # dots[j][i] = v_i . (column j)

    @property
    def column_count(self) -> int:
        return self.A.shape[1]


@dataclass(eq=False)
class SearchOutcome:
    solutions: list[InductionResult]
    truncated: bool
    nodes: int
    elapsed: float
    reduced: ReducedProblem
    admissible_count: int
    stats: dict = field(default_factory=dict)


def check_decomposition(A, p: DecompositionProblem, forbid_zero_dots: bool = False) -> list[str]:
    """Human-readable list of failed conditions; empty when ``A`` is valid."""
    A = np.asarray(A, dtype=np.int64)
    if A.ndim != 2 or A.shape[0] != p.size:
        raise ValueError(f"candidate has shape {A.shape}, problem has {p.size} rows")
    problems = []
    if (A < 0).any():
        j = int(np.nonzero((A < 0).any(axis=0))[0][0])
        problems.append(f"column {j}: negative entry")
    G = A @ A.T
    bad = np.argwhere(G != p.M)
    if len(bad):
        i, j = bad[0]
        problems.append(f"AAᵀ mismatch at ({i + 1},{j + 1}): {G[i, j]} != {p.M[i, j]}")
    dots = _DotEvaluator(p.vs)
    for j in range(A.shape[1]):
        for i, x in enumerate(dots(A[:, j])):
            if x.is_zero():
                if forbid_zero_dots:
                    problems.append(f"column {j}: zero dot with v[{i}]")
                    break
                continue
            if not is_d_number(x):
                problems.append(f"column {j}: v[{i}] . w = {x} is not a d-number")
                break
            if not divides_as_algebraic_integer(x, p.D):
                problems.append(f"column {j}: v[{i}] . w = {x} does not divide D")
                break
    return problems


def verify_decomposition(A, p: DecompositionProblem, forbid_zero_dots: bool = False) -> bool:
    """``A A^T = M`` exactly, ``A >= 0``, and every column passes the algebraic tests."""
    return not check_decomposition(A, p, forbid_zero_dots)


def _make_result(A_prime: np.ndarray, rp: ReducedProblem, p: DecompositionProblem) -> InductionResult:
    R_int, den = rp.R_scaled
    # columns keep the search order: decreasing lex on the rows of M'
    A = (R_int @ A_prime) // den
    dots = _DotEvaluator(p.vs)
    return InductionResult(
        A=A,
        blocks=split_blocks(A, p.layout),
        names=p.names,
        dots=[dots(A[:, j]) for j in range(A.shape[1])],
    )


# -- search ------------------------------------------------------------------


class _Search:
    """Depth-first enumeration over the admissible column table."""

    def __init__(self, M_prime: np.ndarray, W: np.ndarray, cfg: SolverConfig, deadline: float | None):
        self.M_prime = M_prime
        self.W = W
        self.cfg = cfg
        self.deadline = deadline
        self.outer = np.einsum("ki,kj->kij", W, W)
        r = M_prime.shape[0]
        K = W.shape[0]
        # columns whose first nonzero entry is at p form one contiguous run
        first_nz = np.array([int(np.nonzero(w)[0][0]) for w in W], dtype=np.int64) if K else np.zeros(0, int)
        self.lo = [int(np.searchsorted(first_nz, p, side="left")) for p in range(r)]
        self.hi = [int(np.searchsorted(first_nz, p, side="right")) for p in range(r)]
        self.nodes = 0
        self.truncated = False
        self.solutions: list[list[int]] = []

    def _out_of_budget(self) -> bool:
        if self.deadline is not None and self.nodes % 256 == 0 and time.monotonic() > self.deadline:
            self.truncated = True
            return True
        return False

    def children(self, residual: np.ndarray, start: int) -> np.ndarray:
        p = _zero_prefix(residual)
        lo = max(start, self.lo[p])
        hi = self.hi[p]
        if lo >= hi:
            return np.zeros(0, dtype=np.int64)
        cand = self.outer[lo:hi]
        idx = np.nonzero((cand <= residual).all(axis=(1, 2)))[0]
        if not len(idx):
            return idx
        rem = residual - cand[idx]
        if self.cfg.psd_mode == "numeric":
            ev = np.linalg.eigvalsh(rem.astype(float))[:, 0]
            idx = idx[ev >= self.cfg.eig_tolerance]
        else:
            keep = [k for k, m in zip(idx, rem) if _is_psd_int(m.tolist())]
            idx = np.array(keep, dtype=np.int64)
        return idx + lo

    def run(self, residual: np.ndarray, start: int, path: list[int]) -> None:
        if self.truncated or self._out_of_budget():
            return
        self.nodes += 1
        if not residual.any():
            self.solutions.append(list(path))
            if self.cfg.max_solutions is not None and len(self.solutions) >= self.cfg.max_solutions:
                self.truncated = True
            return
        if self.cfg.max_columns is not None and len(path) >= self.cfg.max_columns:
            return
        for k in self.children(residual, start):
            path.append(int(k))
            self.run(residual - self.outer[k], int(k), path)
            path.pop()
            if self.truncated:
                return


_WORKER: dict = {}


def _worker_init(M_prime, W, cfg, deadline):
    _WORKER["search"] = (M_prime, W, cfg, deadline)


def _worker_branch(k: int):
    M_prime, W, cfg, deadline = _WORKER["search"]
    s = _Search(M_prime, W, cfg, deadline)
    s.run(M_prime - s.outer[k], k, [k])
    return s.solutions, s.nodes, s.truncated


def search_all(p: DecompositionProblem, cfg: SolverConfig = SolverConfig()) -> SearchOutcome:
    """Enumerate every algebraic decomposition of ``p``.

    Results are lifted to ``M``, verified exactly, and sorted by
    (column count, matrix). With ``thread_count > 1`` the top-level branches
    are searched in worker processes; the merged output is identical to the
    single-process run.
    """
    t0 = time.monotonic()
    deadline = t0 + cfg.time_limit if cfg.time_limit is not None else None
    rp = reduce_problem(p, cfg.minor_subset) if cfg.reduce else identity_reduction(p)
    table = admissible_columns(rp, p.D, cfg.forbid_zero_dots, M=p.M)
    r = rp.rank
    W = np.array(table, dtype=np.int64).reshape(len(table), r)
    log.info("rank %d, %d admissible columns", r, len(table))

    search = _Search(rp.M_prime.astype(np.int64), W, cfg, deadline)
    if cfg.max_solutions == 0:
        search.truncated = True
    elif cfg.thread_count == 1 or r == 0:
        search.run(search.M_prime.copy(), 0, [])
    else:
        search.nodes += 1
        if not search.M_prime.any():
            search.solutions.append([])
        else:
            roots = search.children(search.M_prime, 0).tolist()
            with ProcessPoolExecutor(
                max_workers=cfg.thread_count,
                initializer=_worker_init,
                initargs=(search.M_prime, W, cfg, deadline),
            ) as pool:
                # merge in branch order so truncation by max_solutions matches the serial run
                for sols, nodes, trunc in pool.map(_worker_branch, roots):
                    search.nodes += nodes
                    search.solutions.extend(sols)
                    if cfg.max_solutions is not None and len(search.solutions) >= cfg.max_solutions:
                        del search.solutions[cfg.max_solutions :]
                        search.truncated = True
                        break
                    search.truncated |= trunc

    results = []
    for path in search.solutions:
        A_prime = W[path].T if path else np.zeros((r, 0), dtype=np.int64)
        res = _make_result(A_prime, rp, p)
        problems = check_decomposition(res.A, p, cfg.forbid_zero_dots)
        if problems:
            raise AssertionError(f"search produced an invalid decomposition: {problems[0]}")
        results.append(res)
    results.sort(key=lambda res: (res.column_count, tuple(map(tuple, res.A.tolist()))))
    elapsed = time.monotonic() - t0
    return SearchOutcome(
        solutions=results,
        truncated=search.truncated,
        nodes=search.nodes,
        elapsed=elapsed,
        reduced=rp,
        admissible_count=len(table),
    )


def default_thread_count() -> int:
    try:
        return max(1, int(os.environ.get("CENTER_SCOPE_THREADS", "1")))
    except ValueError:
        return 1
