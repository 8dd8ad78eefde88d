from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from center_scope.cyclotomic import CycloNumber, make
from center_scope.exact_linalg import (
    compute_reduction,
    determinant,
    field_kernel,
    is_psd_exact,
    is_psd_integer,
    min_eigenvalue_estimate,
    rank_rational,
    select_nonsingular_minor,
)


def leibniz_det(M):
    n = len(M)
    total = 0
    for perm in permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = -1 if inversions % 2 else 1
        for i in range(n):
            term *= M[i][perm[i]]
        total += term
    return total


def int_matrices(max_n=4, lo=-3, hi=3):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=n, max_size=n)
    )


@st.composite
def gram_matrices(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    k = draw(st.integers(1, max_n))
    A = np.array(draw(st.lists(st.integers(0, 2), min_size=n * k, max_size=n * k))).reshape(n, k)
    return A @ A.T


# -- rank and determinant -----------------------------------------------------


def test_rank_examples(eh_reference):
    assert rank_rational(np.array(eh_reference["M"])) == 6
    assert rank_rational(np.eye(5, dtype=int)) == 5
    assert rank_rational(np.zeros((3, 3), dtype=int)) == 0


@settings(max_examples=100, deadline=None)
@given(int_matrices())
def test_rank_matches_numeric_rank(M):
    assert rank_rational(M) == np.linalg.matrix_rank(np.array(M, dtype=float))


@settings(max_examples=100, deadline=None)
@given(int_matrices())
def test_determinant_matches_leibniz(M):
    assert determinant(M) == leibniz_det(M)


def test_determinant_of_fractions():
    assert determinant([[Fraction(1, 2), 1], [1, 4]]) == 1


# -- principal minor selection and reduction ------------------------------------


def test_minor_selection_on_eh(eh_reference):
    M = np.array(eh_reference["M"])
    perm, subset = select_nonsingular_minor(M)
    original = [perm[s] for s in subset]
    assert sorted(M[i, i] for i in original) == [6, 8, 15, 17, 79, 181]
    assert original == [0, 6, 12, 7, 5, 3]


def test_minor_selection_increasing_diagonal():
    M = [[2, 1, 0], [1, 3, 1], [0, 1, 4]]
    assert select_nonsingular_minor(M) == ([0, 1, 2], [0, 1, 2])


def test_minor_selection_duplicated_row():
    perm, subset = select_nonsingular_minor([[1, 1], [1, 1]])
    assert [perm[s] for s in subset] == [0]


def test_reduction_examples():
    assert compute_reduction([[1, 1], [1, 1]], [0]) == [[1], [1]]
    M = [[2, 1], [1, 3]]
    assert compute_reduction(M, [0, 1]) == [[1, 0], [0, 1]]


def test_reduction_rejects_too_small_subset():
    with pytest.raises(ValueError):
        compute_reduction([[2, 0], [0, 3]], [0])
    with pytest.raises(ValueError):
        compute_reduction([[0, 0], [0, 1]], [0])


def test_reduction_on_eh(eh_reference):
    M = np.array(eh_reference["M"])
    R = compute_reduction(M, [0, 6, 12, 7, 5, 3])
    reference = [[Fraction(x) for x in row] for row in eh_reference["R"]]
    assert R == reference


@settings(max_examples=80, deadline=None)
@given(gram_matrices())
def test_reduction_round_trip(M):
    perm, subset = select_nonsingular_minor(M)
    S = [perm[s] for s in subset]
    assert len(S) == rank_rational(M)
    if not S:
        assert not M.any()
        return
    R = compute_reduction(M, S)
    Mp = [[Fraction(int(M[i, j])) for j in S] for i in S]
    n, r = M.shape[0], len(S)
    back = [
        [sum(R[i][a] * Mp[a][b] * R[j][b] for a in range(r) for b in range(r)) for j in range(n)]
        for i in range(n)
    ]
    assert back == M.tolist()
    for k, i in enumerate(S):
        assert R[i] == [int(k == c) for c in range(r)]


# -- positive semidefiniteness -------------------------------------------------


def test_psd_examples(eh_reference):
    assert is_psd_exact(np.eye(3, dtype=int))
    assert not is_psd_exact([[1, 2], [2, 1]])
    assert is_psd_exact(eh_reference["M"])
    assert is_psd_integer(eh_reference["M"])
    assert is_psd_exact([[Fraction(1, 2), Fraction(1, 2)], [Fraction(1, 2), Fraction(1, 2)]])
    assert not is_psd_exact([[0, 1], [1, 0]])


def test_psd_rejects_asymmetric():
    with pytest.raises(ValueError):
        is_psd_exact([[1, 2], [0, 1]])


def test_min_eigenvalue_examples(eh_reference):
    assert min_eigenvalue_estimate(np.eye(4)) == pytest.approx(1.0, abs=1e-9)
    assert min_eigenvalue_estimate([[1, 2], [2, 1]]) == pytest.approx(-1.0, abs=1e-9)
    assert min_eigenvalue_estimate(eh_reference["M"]) >= -1e-9


@settings(max_examples=150, deadline=None)
@given(int_matrices(max_n=5))
def test_psd_exact_agrees_with_eigenvalues(X):
    S = np.array(X) + np.array(X).T
    lam = np.linalg.eigvalsh(S.astype(float))[0]
    if abs(lam) < 1e-7:
        assert is_psd_exact(S) == is_psd_integer(S)
        return
    assert is_psd_exact(S) == (lam > 0)
    assert is_psd_integer(S) == (lam > 0)


@settings(max_examples=80, deadline=None)
@given(gram_matrices())
def test_gram_matrices_are_psd(M):
    assert is_psd_exact(M) and is_psd_integer(M)


@settings(max_examples=80, deadline=None)
@given(gram_matrices(), st.integers(0, 4), st.integers(0, 4))
def test_perturbed_gram_matrix(M, i, j):
    n = M.shape[0]
    i, j = i % n, j % n
    S = M.copy()
    S[i, j] -= 1
    if i != j:
        S[j, i] -= 1
    lam = np.linalg.eigvalsh(S.astype(float))[0]
    if abs(lam) > 1e-7:
        assert is_psd_integer(S) == (lam > 0)


# -- kernels over Q(zeta_n) ----------------------------------------------------


def test_kernel_examples():
    one, zero = CycloNumber.from_rational(5, 1), CycloNumber.from_rational(5, 0)
    assert field_kernel([[one, zero], [zero, one]]) == []
    assert len(field_kernel([[zero, zero], [zero, zero]])) == 2


def test_kernel_of_fibonacci_eigenproblem():
    phi = make(5, {0: 1, 1: 1, 4: 1})
    zero, one = phi * 0, phi * 0 + 1
    A = [[zero - phi, one], [one, one - phi]]
    basis = field_kernel(A)
    assert len(basis) == 1
    a, b = basis[0]
    assert b / a == phi
    for row in A:
        assert (row[0] * a + row[1] * b).is_zero()
