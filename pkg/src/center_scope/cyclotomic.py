"""Exact arithmetic in cyclotomic fields Q(zeta_n).

Elements are stored on the power basis ``1, z, ..., z^(phi(n)-1)`` reduced
modulo the n-th cyclotomic polynomial, as an integer numerator vector over a
single positive denominator. That representation is canonical, so equality is
a tuple comparison and values can be used as dictionary keys.

The ring of integers of Q(zeta_n) is Z[zeta_n] with exactly this power basis,
which gives a cheap exact algebraic-integer test.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational
from typing import Iterable, Mapping, Sequence

from .errors import InvariantViolation

__all__ = [
    "CycloNumber",
    "RationalPolynomial",
    "make",
    "zeta",
    "galois_conjugates",
    "minimal_polynomial",
    "is_algebraic_integer",
    "is_d_number",
    "divides_as_algebraic_integer",
    "to_complex_approx",
    "euler_phi",
    "cyclotomic_polynomial",
]


def euler_phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def _poly_divmod_exact(num: list[int], den: list[int]) -> list[int]:
    """Quotient of integer polynomials (ascending coefficients), den monic."""
    num = list(num)
    dq = len(den) - 1
    q = [0] * (len(num) - dq)
    for i in range(len(num) - 1, dq - 1, -1):
        c = num[i]
        if c:
            q[i - dq] = c
            for j in range(dq + 1):
                num[i - dq + j] -= c * den[j]
    if any(num[:dq]):
        raise InvariantViolation("cyclotomic division left a remainder")
    return q


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Ascending integer coefficients of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError(f"conductor must be positive, got {n}")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_divmod_exact(poly, list(cyclotomic_polynomial(d)))
    return tuple(poly)


class _Field:
    """Per-conductor tables: reductions of z^k and Galois permutation data."""

    def __init__(self, n: int):
        self.n = n
        self.phi = euler_phi(n)
        self.units = tuple(k for k in range(1, n + 1) if math.gcd(k, n) == 1)
        phi_poly = cyclotomic_polynomial(n)
        # power_table[k] = reduced coordinates of z^k for 0 <= k < 2n
        table: list[tuple[int, ...]] = []
        cur = [0] * self.phi
        cur[0] = 1
        for _ in range(2 * n):
            table.append(tuple(cur))
            # multiply by z: shift up, then replace z^phi using phi_poly (monic)
            top = cur[-1]
            cur = [0] + cur[:-1]
            if top:
                for j in range(self.phi):
                    cur[j] -= top * phi_poly[j]
        self.power_table = tuple(table)
        self.high_table = tuple(table[self.phi : 2 * self.phi - 1])
        # conjugation by z -> z^k: coordinate j maps to the reduction of z^(jk mod n)
        self.conj_rows = {
            k: tuple(table[(j * k) % n] for j in range(self.phi)) for k in self.units
        }

    def reduce(self, raw: Sequence[int]) -> list[int]:
        """Reduce a raw integer vector indexed by powers of z (any length)."""
        out = [0] * self.phi
        n = self.n
        for k, c in enumerate(raw):
            if c:
                row = self.power_table[k % n]
                for j in range(self.phi):
                    if row[j]:
                        out[j] += c * row[j]
        return out

    def mul(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        phi = self.phi
        prod = [0] * (2 * phi - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        prod[i + j] += ai * bj
        out = prod[:phi]
        for k, c in enumerate(prod[phi:]):
            if c:
                row = self.high_table[k]
                for j in range(phi):
                    if row[j]:
                        out[j] += c * row[j]
        return out

    def conjugate(self, a: Sequence[int], k: int) -> list[int]:
        out = [0] * self.phi
        for c, row in zip(a, self.conj_rows[k]):
            if c:
                for j in range(self.phi):
                    if row[j]:
                        out[j] += c * row[j]
        return out


@lru_cache(maxsize=None)
def _field(n: int) -> _Field:
    if n < 1:
        raise ValueError(f"conductor must be positive, got {n}")
    return _Field(n)


def _normalize(num: Sequence[int], den: int) -> tuple[tuple[int, ...], int]:
    if den == 0:
        raise ZeroDivisionError("zero denominator")
    if den < 0:
        num = [-c for c in num]
        den = -den
    g = den
    for c in num:
        if g == 1:
            break
        g = math.gcd(g, c)
    if g != 1:
        num = [c // g for c in num]
        den //= g
    return tuple(num), den


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as a rational number")


def _common_denominator(values: Iterable[Fraction]) -> tuple[list[int], int]:
    values = list(values)
    den = 1
    for v in values:
        den = den * v.denominator // math.gcd(den, v.denominator)
    return [int(v * den) for v in values], den


@dataclass(frozen=True, eq=True)
class CycloNumber:
    """An element of Q(zeta_n) in canonical reduced form.

    Build values with :func:`make`, :func:`zeta`, :meth:`from_coeffs` or
    :meth:`from_rational`; the raw constructor expects already-normalized data.
    """

    conductor: int
    num: tuple[int, ...]
    den: int = 1

    # -- construction -----------------------------------------------------
    @classmethod
    def from_coeffs(cls, conductor: int, coeffs: Sequence) -> "CycloNumber":
        """Build from reduced power-basis coordinates (length phi(n))."""
        field = _field(conductor)
        if len(coeffs) != field.phi:
            raise ValueError(
                f"expected {field.phi} coefficients for conductor {conductor}, got {len(coeffs)}"
            )
        num, den = _common_denominator(_as_fraction(c) for c in coeffs)
        return cls(conductor, *_normalize(num, den))

    @classmethod
    def from_rational(cls, conductor: int, value) -> "CycloNumber":
        field = _field(conductor)
        q = _as_fraction(value)
        num = [0] * field.phi
        num[0] = q.numerator
        return cls(conductor, *_normalize(num, q.denominator))

    # -- views ------------------------------------------------------------
    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, self.den) for c in self.num)

    @property
    def phi(self) -> int:
        return len(self.num)

    def is_zero(self) -> bool:
        return not any(self.num)

    def is_rational(self) -> bool:
        return not any(self.num[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self} is not rational")
        return Fraction(self.num[0], self.den)

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "CycloNumber":
        if isinstance(other, CycloNumber):
            if other.conductor != self.conductor:
                raise ValueError(
                    f"conductor mismatch: {self.conductor} vs {other.conductor}"
                )
            return other
        if isinstance(other, (int, Rational)):
            return CycloNumber.from_rational(self.conductor, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        d1, d2 = self.den, other.den
        num = [a * d2 + b * d1 for a, b in zip(self.num, other.num)]
        return CycloNumber(self.conductor, *_normalize(num, d1 * d2))

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber(self.conductor, tuple(-c for c in self.num), self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        num = _field(self.conductor).mul(self.num, other.num)
        return CycloNumber(self.conductor, *_normalize(num, self.den * other.den))

    __rmul__ = __mul__

    def inv(self) -> "CycloNumber":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_n)")
        if self.is_rational():
            return CycloNumber.from_rational(self.conductor, 1 / self.rational_value())
        # x * prod(other distinct conjugates) = +-(constant term of minpoly), rational
        rest = CycloNumber.from_rational(self.conductor, 1)
        for c in _distinct_conjugates(self):
            if c != self:
                rest = rest * c
        norm = (self * rest).rational_value()
        return rest * (1 / norm)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inv()

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        result = CycloNumber.from_rational(self.conductor, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, CycloNumber):
            return (self.conductor, self.num, self.den) == (other.conductor, other.num, other.den)
        if isinstance(other, (int, Rational)):
            return self.is_rational() and Fraction(self.num[0], self.den) == other
        return NotImplemented

    def __hash__(self):
        return hash((self.conductor, self.num, self.den))

    # -- misc -------------------------------------------------------------
    def conjugate_by(self, k: int) -> "CycloNumber":
        """Apply the Galois automorphism z -> z^k (k coprime to the conductor)."""
        field = _field(self.conductor)
        k %= self.conductor
        if self.conductor == 1:
            k = 1
        if k not in field.conj_rows:
            raise ValueError(f"{k} is not a unit modulo {self.conductor}")
        return CycloNumber(self.conductor, *_normalize(field.conjugate(self.num, k), self.den))

    def __complex__(self) -> complex:
        return to_complex_approx(self)

    def to_json(self) -> dict:
        return {"conductor": self.conductor, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, data, conductor: int | None = None) -> "CycloNumber":
        """Parse a serialized value.

        Accepts the canonical ``{"conductor", "coeffs"}`` form, an unreduced
        ``{"conductor", "powers": {k: q}}`` form, or a bare rational (int or
        ``"p/q"`` string) when ``conductor`` is given.
        """
        if isinstance(data, dict):
            n = data.get("conductor", conductor)
            if n is None:
                raise ValueError("cyclotomic value without a conductor")
            if conductor is not None and n != conductor:
                raise ValueError(f"conductor mismatch: {n} vs {conductor}")
            if "coeffs" in data:
                return cls.from_coeffs(n, data["coeffs"])
            if "powers" in data:
                return make(n, {int(k): v for k, v in data["powers"].items()})
            raise ValueError("cyclotomic value needs 'coeffs' or 'powers'")
        if conductor is None:
            raise ValueError("a bare rational needs an explicit conductor")
        return cls.from_rational(conductor, data)

    def __str__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if not c:
                continue
            if k == 0:
                terms.append(str(c))
            else:
                mono = "z" if k == 1 else f"z^{k}"
                terms.append(mono if c == 1 else f"-{mono}" if c == -1 else f"{c}*{mono}")
        if not terms:
            return "0"
        return " + ".join(terms).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"CycloNumber({self.conductor}, {self})"


def make(conductor: int, raw: Sequence | Mapping[int, object]) -> CycloNumber:
    """Canonical element ``sum_k raw[k] z^k`` of Q(zeta_conductor).

    ``raw`` is indexed by powers of ``z`` and may be longer than phi(n) or
    even n; a mapping ``{power: coefficient}`` is also accepted.
    """
    if conductor < 1:
        raise ValueError(f"conductor must be positive, got {conductor}")
    items = raw.items() if isinstance(raw, Mapping) else enumerate(raw)
    fracs = {int(k): _as_fraction(v) for k, v in items}
    if any(k < 0 for k in fracs):
        raise ValueError("negative powers are not accepted; use z^(n-k)")
    size = max(fracs, default=0) + 1
    ints, den = _common_denominator(fracs.get(k, Fraction(0)) for k in range(size))
    return CycloNumber(conductor, *_normalize(_field(conductor).reduce(ints), den))


def zeta(conductor: int, power: int = 1) -> CycloNumber:
    return make(conductor, {power % conductor: 1})


def galois_conjugates(x: CycloNumber) -> list[CycloNumber]:
    """All images sigma_k(x) for k coprime to n, in increasing k (k = 1 first)."""
    field = _field(x.conductor)
    return [
        CycloNumber(x.conductor, *_normalize(field.conjugate(x.num, k), x.den))
        for k in field.units
    ]


@lru_cache(maxsize=1 << 16)
def _distinct_conjugates(x: CycloNumber) -> tuple[CycloNumber, ...]:
    seen: dict[CycloNumber, None] = {}
    for c in galois_conjugates(x):
        seen.setdefault(c, None)
    return tuple(seen)


@dataclass(frozen=True)
class RationalPolynomial:
    """Polynomial with rational coefficients, ascending degree."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = tuple(Fraction(c) for c in self.coeffs)
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs = coeffs[:-1]
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        if len(self.coeffs) == 1 and self.coeffs[0] == 0:
            return -1
        return len(self.coeffs) - 1

    @property
    def is_monic(self) -> bool:
        return self.coeffs[-1] == 1

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coeffs)

    def __call__(self, x):
        acc = 0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __str__(self) -> str:
        parts = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else "T" if k == 1 else f"T^{k}"
            if mono and c == 1:
                parts.append(mono)
            elif mono and c == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{c}{'*' + mono if mono else ''}")
        return " + ".join(parts).replace("+ -", "- ") or "0"


@lru_cache(maxsize=1 << 16)
def minimal_polynomial(x: CycloNumber) -> RationalPolynomial:
    """Monic minimal polynomial of ``x`` over Q, as the product over its Galois orbit."""
    n = x.conductor
    one = CycloNumber.from_rational(n, 1)
    poly = [one]  # ascending coefficients in Q(zeta_n)
    for c in _distinct_conjugates(x):
        # multiply by (T - c)
        shifted = [CycloNumber.from_rational(n, 0)] + poly
        for i, p in enumerate(poly):
            shifted[i] = shifted[i] - p * c
        poly = shifted
    out = []
    for p in poly:
        if not p.is_rational():
            raise InvariantViolation(f"orbit product of {x} has non-rational coefficient {p}")
        out.append(p.rational_value())
    return RationalPolynomial(tuple(out))


def is_algebraic_integer(x: CycloNumber) -> bool:
    if x.den == 1:
        # integral power-basis coordinates: x lies in Z[zeta_n]
        return True
    mp = minimal_polynomial(x)
    return mp.is_monic and mp.is_integral


def _divides(a: int, b: int) -> bool:
    if a == 0:
        return b == 0
    return b % a == 0


@lru_cache(maxsize=1 << 16)
def is_d_number(x: CycloNumber) -> bool:
    """Ostrik d-number test: ``a_0^i | a_(m-i)^m`` for the integer minimal polynomial."""
    if not is_algebraic_integer(x):
        return False
    a = [int(c) for c in minimal_polynomial(x).coeffs]
    m = len(a) - 1
    return all(_divides(a[0] ** i, a[m - i] ** m) for i in range(m + 1))


@lru_cache(maxsize=1 << 16)
def divides_as_algebraic_integer(x: CycloNumber, D: CycloNumber) -> bool:
    """True if ``D / x`` is an algebraic integer; zero divides everything by convention."""
    if x.conductor != D.conductor:
        raise ValueError(f"conductor mismatch: {x.conductor} vs {D.conductor}")
    if x.is_zero():
        return True
    return is_algebraic_integer(D / x)


def to_complex_approx(x: CycloNumber) -> complex:
    """Evaluate under the embedding z -> exp(2 pi i / n)."""
    n = x.conductor
    total = 0j
    for k, c in enumerate(x.num):
        if c:
            total += c * cmath.exp(2j * math.pi * k / n)
    return total / x.den
