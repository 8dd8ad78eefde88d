import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from center_scope.cyclotomic import (
    CycloNumber,
    cyclotomic_polynomial,
    divides_as_algebraic_integer,
    euler_phi,
    galois_conjugates,
    is_algebraic_integer,
    is_d_number,
    make,
    minimal_polynomial,
    to_complex_approx,
    zeta,
)

CONDUCTORS = (1, 3, 4, 5, 7, 8, 12, 13)


def golden():
    return make(5, {0: 1, 1: 1, 4: 1})


def sqrt13_half():
    """(1 + sqrt 13) / 2 from the Gauss period over quadratic residues mod 13."""
    return make(13, {r: 1 for r in (1, 3, 4, 9, 10, 12)}) + 1


def charpoly_oracle(x: CycloNumber) -> np.ndarray:
    """Integer coefficients (descending) of prod over all embeddings of (T - x)."""
    n = x.conductor
    roots = []
    for k in range(1, n + 1):
        if math.gcd(k, n) != 1:
            continue
        z = cmath.exp(2j * math.pi * k / n)
        roots.append(sum(float(c) * z**i for i, c in enumerate(x.coeffs)))
    return np.rint(np.real(np.poly(roots))).astype(np.int64)


@st.composite
def cyclo(draw, conductor=None, lo=-4, hi=4, rational_den=False):
    n = conductor if conductor is not None else draw(st.sampled_from(CONDUCTORS))
    coeffs = draw(st.lists(st.integers(lo, hi), min_size=n, max_size=n))
    den = draw(st.integers(1, 3)) if rational_den else 1
    return make(n, [Fraction(c, den) for c in coeffs])


# -- construction ------------------------------------------------------------


def test_make_reduces_zeta_to_the_n():
    assert make(13, {13: 1}) == 1


def test_make_sum_of_all_powers_is_zero():
    assert make(13, [1] * 13).is_zero()


def test_make_zeta4_squared():
    assert make(4, {2: 1}) == -1


@pytest.mark.parametrize("n", range(1, 25))
def test_cyclotomic_polynomial_degree_and_root(n):
    phi = cyclotomic_polynomial(n)
    assert len(phi) - 1 == euler_phi(n)
    z = cmath.exp(2j * math.pi / n)
    assert abs(sum(c * z**i for i, c in enumerate(phi))) < 1e-8


# -- field operations ----------------------------------------------------------


def test_mul_inverse_roots():
    assert zeta(13, 7) * zeta(13, 6) == 1
    assert CycloNumber.from_rational(13, 2).inv() == Fraction(1, 2)
    assert zeta(13).inv() == zeta(13, 12)


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        CycloNumber.from_rational(5, 0).inv()


def test_conductor_mismatch_raises():
    with pytest.raises(ValueError):
        zeta(5) + zeta(13)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(CONDUCTORS).flatmap(lambda n: st.tuples(*(cyclo(conductor=n, rational_den=True),) * 3)))
def test_field_axioms(xyz):
    x, y, z = xyz
    assert x + y == y + x
    assert x * y == y * x
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x - x == 0
    if not x.is_zero():
        assert x * x.inv() == 1
        assert (y / x) * x == y


@settings(max_examples=60, deadline=None)
@given(cyclo(rational_den=True), cyclo(rational_den=True))
def test_complex_embedding_is_a_ring_map(x, y):
    if x.conductor != y.conductor:
        return
    assert abs(complex(x + y) - (complex(x) + complex(y))) < 1e-6
    assert abs(complex(x * y) - complex(x) * complex(y)) < 1e-6 * (1 + abs(complex(x) * complex(y)))


def test_json_round_trip():
    x = make(13, [Fraction(1, 3), 0, -2, 5])
    assert CycloNumber.from_json(x.to_json()) == x


# -- Galois action -------------------------------------------------------------


def test_conjugates_of_rational():
    assert galois_conjugates(CycloNumber.from_rational(13, 5)) == [5] * 12


def test_conjugates_of_i():
    conj = galois_conjugates(zeta(4))
    assert sorted(complex(c).imag for c in conj) == pytest.approx([-1.0, 1.0])


def test_conjugates_of_zeta13_are_the_primitive_roots():
    conj = galois_conjugates(zeta(13))
    assert len(set(conj)) == 12
    assert set(conj) == {zeta(13, k) for k in range(1, 13)}


@settings(max_examples=40, deadline=None)
@given(cyclo())
def test_conjugation_is_a_field_automorphism(x):
    n = x.conductor
    y = x * x + 3
    for k in range(1, n + 1):
        if math.gcd(k, n) == 1:
            assert y.conjugate_by(k) == x.conjugate_by(k) * x.conjugate_by(k) + 3


# -- minimal polynomials -------------------------------------------------------


def test_minpoly_examples():
    assert minimal_polynomial(CycloNumber.from_rational(7, 3)).coeffs == (-3, 1)
    assert minimal_polynomial(zeta(4)).coeffs == (1, 0, 1)
    assert minimal_polynomial(golden()).coeffs == (-1, -1, 1)
    assert minimal_polynomial(sqrt13_half()).coeffs == (-3, -1, 1)


def test_minpoly_of_eh_dimension_entry():
    x = make(13, {11: 1, 10: 1, 3: 1, 2: 1, 0: 2})
    # frozen from the charpoly oracle: prod over 12 embeddings = (T^3 - 5T^2 + 4T + 5)^4
    assert minimal_polynomial(x).coeffs == (5, 4, -5, 1)
    mp = np.array(minimal_polynomial(x).coeffs[::-1], dtype=np.int64)
    assert (charpoly_oracle(x) == np.polynomial.polynomial.polypow(mp[::-1], 4)[::-1]).all()


@settings(max_examples=50, deadline=None)
@given(cyclo(lo=-2, hi=2))
def test_minpoly_divides_charpoly_and_vanishes(x):
    mp = minimal_polynomial(x)
    assert mp.is_monic
    assert mp(x).is_zero()
    deg = mp.degree
    assert euler_phi(x.conductor) % deg == 0
    expected = charpoly_oracle(x)
    power = np.polynomial.polynomial.polypow([int(c) for c in mp.coeffs], euler_phi(x.conductor) // deg)
    assert (expected == np.rint(power[::-1]).astype(np.int64)).all()


# -- integrality predicates ----------------------------------------------------


def test_algebraic_integer_examples():
    assert not is_algebraic_integer(CycloNumber.from_rational(1, Fraction(1, 2)))
    assert is_algebraic_integer(zeta(13))
    assert is_algebraic_integer(golden())


def test_half_integer_combination_can_be_integral():
    # (1 + sqrt 5)/2 written with rational coefficients is still an algebraic integer
    sqrt5 = make(5, {0: 1, 1: 2, 4: 2})
    assert is_algebraic_integer((sqrt5 + 1) / 2)
    assert not is_algebraic_integer((sqrt5 + 2) / 2)


@settings(max_examples=60, deadline=None)
@given(cyclo(rational_den=True))
def test_algebraic_integer_matches_minpoly_integrality(x):
    assert is_algebraic_integer(x) == minimal_polynomial(x).is_integral


def test_d_number_examples():
    for k in (-7, -1, 0, 1, 6, 1000):
        assert is_d_number(CycloNumber.from_rational(13, k))
    assert is_d_number(golden())
    assert not is_d_number(sqrt13_half())
    assert not is_d_number(CycloNumber.from_rational(1, Fraction(1, 2)))


def test_eh_dimension_entry_is_not_a_d_number():
    # T^3 - 5T^2 + 4T + 5: 5^2 does not divide 4^3
    assert not is_d_number(make(13, {11: 1, 10: 1, 3: 1, 2: 1, 0: 2}))


@settings(max_examples=60, deadline=None)
@given(cyclo(rational_den=True))
def test_d_number_implies_algebraic_integer(x):
    if is_d_number(x):
        assert is_algebraic_integer(x)


@settings(max_examples=40, deadline=None)
@given(cyclo(lo=-2, hi=2))
def test_d_number_is_galois_invariant(x):
    n = x.conductor
    verdict = is_d_number(x)
    for k in range(1, n + 1):
        if math.gcd(k, n) == 1:
            assert is_d_number(x.conjugate_by(k)) == verdict


def test_divisibility_examples():
    D = make(13, {0: 170, 2: 50, 3: 50, 10: 50, 11: 50, 4: -125, 6: -125, 7: -125, 9: -125})
    assert divides_as_algebraic_integer(CycloNumber.from_rational(13, 1), D)
    assert not divides_as_algebraic_integer(CycloNumber.from_rational(1, 2), CycloNumber.from_rational(1, 3))
    assert divides_as_algebraic_integer(CycloNumber.from_rational(1, 3), CycloNumber.from_rational(1, 12))
    assert divides_as_algebraic_integer(CycloNumber.from_rational(1, 0), CycloNumber.from_rational(1, 3))


@settings(max_examples=40, deadline=None)
@given(st.integers(-30, 30).filter(bool), st.integers(-200, 200))
def test_divisibility_on_rational_integers(a, b):
    x, y = CycloNumber.from_rational(1, a), CycloNumber.from_rational(1, b)
    assert divides_as_algebraic_integer(x, y) == (b % a == 0)


@settings(max_examples=40, deadline=None)
@given(cyclo(conductor=5, lo=-3, hi=3), cyclo(conductor=5, lo=-3, hi=3))
def test_product_is_divisible_by_factor(x, y):
    if not x.is_zero():
        assert divides_as_algebraic_integer(x, x * y)


# -- numerics ------------------------------------------------------------------


def test_complex_values():
    D = make(13, {0: 170, 2: 50, 3: 50, 10: 50, 11: 50, 4: -125, 6: -125, 7: -125, 9: -125})
    z = to_complex_approx(D)
    assert abs(z.imag) < 1e-9
    assert z.real == pytest.approx(570.2468, abs=1e-4)
    assert to_complex_approx(zeta(4)) == pytest.approx(1j)
    assert to_complex_approx(CycloNumber.from_rational(7, 0)) == 0
