"""Exact arithmetic in the number field Q(sqrt3, sqrt26, i).

Every constant appearing in the Dyson pipeline (sqrt3 from the cubic
Hamiltonian terms, sqrt26 from the hyperbolic particular solution, i from
the algebrization) lives in this degree-8 tower, so all symbolic
computation downstream can use exact zero tests.

Elements are stored as 8 rational coordinates over the basis
{1, s3, s26, s78} x {1, i} with s78 = s3*s26.  The coordinate index packs
the three exponent bits as a | (b << 1) | (m << 2) where a, b, m are the
parities of sqrt3, sqrt26 and i.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

import mpmath as mp

_Q = Fraction

# index bits
_A = 1   # sqrt3
_B = 2   # sqrt26
_M = 4   # i

_ZERO8 = (Fraction(0),) * 8


def _basis_mul(i: int, j: int) -> tuple[Fraction, int]:
    """Product of basis monomials i and j -> (rational factor, monomial)."""
    f = Fraction(1)
    if i & j & _A:
        f *= 3
    if i & j & _B:
        f *= 26
    if i & j & _M:
        f *= -1
    return f, i ^ j


_MUL_TABLE = [[_basis_mul(i, j) for j in range(8)] for i in range(8)]


class FieldElement:
    """Immutable element of Q(sqrt3, sqrt26, i)."""

    __slots__ = ("c",)

    def __init__(self, coords=_ZERO8):
        if len(coords) != 8:
            raise ValueError("need 8 coordinates")
        object.__setattr__(self, "c", tuple(Fraction(x) for x in coords))

    def __setattr__(self, *a):
        raise AttributeError("FieldElement is immutable")

    # -- constructors -------------------------------------------------
    @staticmethod
    def from_rational(q) -> "FieldElement":
        c = [Fraction(0)] * 8
        c[0] = Fraction(q)
        return FieldElement(c)

    @staticmethod
    def monomial(q, idx: int) -> "FieldElement":
        c = [Fraction(0)] * 8
        c[idx] = Fraction(q)
        return FieldElement(c)

    # -- predicates ----------------------------------------------------
    def is_zero(self) -> bool:
        return all(x == 0 for x in self.c)

    def is_rational(self) -> bool:
        return all(x == 0 for x in self.c[1:])

    def as_rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("not a rational element: %s" % (self,))
        return self.c[0]

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        other = coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElement([a + b for a, b in zip(self.c, other.c)])

    __radd__ = __add__

    def __neg__(self):
        return FieldElement([-a for a in self.c])

    def __sub__(self, other):
        other = coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElement([a - b for a, b in zip(self.c, other.c)])

    def __rsub__(self, other):
        other = coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = [Fraction(0)] * 8
        for i, a in enumerate(self.c):
            if a == 0:
                continue
            for j, b in enumerate(other.c):
                if b == 0:
                    continue
                f, k = _MUL_TABLE[i][j]
                out[k] += a * b * f
        return FieldElement(out)

    __rmul__ = __mul__

    def conj_i(self) -> "FieldElement":
        return FieldElement([(-x if i & _M else x) for i, x in enumerate(self.c)])

    def conj_s26(self) -> "FieldElement":
        return FieldElement([(-x if i & _B else x) for i, x in enumerate(self.c)])

    def conj_s3(self) -> "FieldElement":
        return FieldElement([(-x if i & _A else x) for i, x in enumerate(self.c)])

    def inverse(self) -> "FieldElement":
        """Exact inverse via the conjugation tower; x * x.inverse() == 1."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        ci = self.conj_i()
        n1 = self * ci                 # lands in Q(sqrt3, sqrt26)
        n2 = n1 * n1.conj_s26()        # lands in Q(sqrt3)
        n3 = n2 * n2.conj_s3()         # rational
        q = n3.as_rational()
        return ci * n1.conj_s26() * n2.conj_s3() * FieldElement.from_rational(1 / q)

    def __truediv__(self, other):
        other = coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        other = coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        return hash(self.c)

    # -- embeddings ------------------------------------------------------
    def to_complex(self) -> complex:
        s3, s26 = 3 ** 0.5, 26 ** 0.5
        s78 = s3 * s26
        re = float(self.c[0]) + float(self.c[1]) * s3 + float(self.c[2]) * s26 + float(self.c[3]) * s78
        im = float(self.c[4]) + float(self.c[5]) * s3 + float(self.c[6]) * s26 + float(self.c[7]) * s78
        return complex(re, im)

    def to_mpc(self, prec: int = 128) -> mp.mpc:
        with mp.workprec(prec + 10):
            s3 = mp.sqrt(3)
            s26 = mp.sqrt(26)
            s78 = s3 * s26
            basis = (mp.mpf(1), s3, s26, s78)
            re = mp.fsum(mp.mpf(x.numerator) / x.denominator * b
                         for x, b in zip(self.c[:4], basis) if x)
            im = mp.fsum(mp.mpf(x.numerator) / x.denominator * b
                         for x, b in zip(self.c[4:], basis) if x)
            return mp.mpc(re, im)

    # -- display --------------------------------------------------------
    _NAMES = ("", "*s3", "*s26", "*s78", "*i", "*i*s3", "*i*s26", "*i*s78")

    def __repr__(self):
        terms = [f"{x}{n}" for x, n in zip(self.c, self._NAMES) if x != 0]
        return "FE(" + (" + ".join(terms) if terms else "0") + ")"


def coerce(x) -> Union[FieldElement, type(NotImplemented)]:
    if isinstance(x, FieldElement):
        return x
    if isinstance(x, (int, Fraction)):
        return FieldElement.from_rational(x)
    return NotImplemented


ZERO = FieldElement()
ONE = FieldElement.from_rational(1)
SQRT3 = FieldElement.monomial(1, _A)
SQRT26 = FieldElement.monomial(1, _B)
SQRT78 = FieldElement.monomial(1, _A | _B)
I = FieldElement.monomial(1, _M)


def FE(q) -> FieldElement:
    """Shorthand: rational -> FieldElement."""
    return FieldElement.from_rational(Fraction(q))


def _rational_square_root(q: Fraction):
    """sqrt of a non-negative rational, or None if irrational."""
    if q < 0:
        return None
    from math import isqrt
    n, d = q.numerator, q.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def field_sqrt(x: FieldElement):
    """Square root of a *rational* field element inside the tower.

    Returns a FieldElement y with y*y == x, or None when the root does
    not live in the tower (or x is not rational).  Covers all square
    roots the Dyson pipeline needs: sqrt(q), sqrt(3q), sqrt(26q),
    sqrt(78q) and their negatives.
    """
    if not x.is_rational():
        return None
    q = x.as_rational()
    if q == 0:
        return ZERO
    neg = q < 0
    if neg:
        q = -q
    for scale, idx in ((Fraction(1), 0), (Fraction(3), _A),
                       (Fraction(26), _B), (Fraction(78), _A | _B)):
        r = _rational_square_root(q / scale)
        if r is not None:
            root = FieldElement.monomial(r, idx)
            return I * root if neg else root
    return None
