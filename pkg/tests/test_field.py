"""Exact arithmetic in the number field Q(sqrt3, sqrt26, i)."""
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dyson3.field import (FE, I, ONE, SQRT3, SQRT26, SQRT78, ZERO,
                          FieldElement, field_sqrt)


def test_basis_squares():
    assert SQRT3 * SQRT3 == FE(3)
    assert SQRT26 * SQRT26 == FE(26)
    assert SQRT78 * SQRT78 == FE(78)
    assert I * I == FE(-1)
    assert SQRT3 * SQRT26 == SQRT78


def test_rational_predicates():
    assert FE(Fraction(5, 7)).is_rational()
    assert FE(Fraction(5, 7)).as_rational() == Fraction(5, 7)
    assert not (SQRT3 + FE(1)).is_rational()
    with pytest.raises(ValueError):
        (SQRT3 + FE(1)).as_rational()


def test_inverse_of_mixed_element():
    x = FE(Fraction(2, 3)) + SQRT3 * FE(5) - SQRT26 * FE(Fraction(1, 4)) + I
    assert x * x.inverse() == ONE
    assert (ONE / x) * x == ONE


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        ONE / ZERO


def test_to_complex_matches_numeric_surds():
    x = SQRT3 + SQRT26 * I
    z = x.to_complex()
    assert abs(z.real - 3 ** 0.5) < 1e-15
    assert abs(z.imag - 26 ** 0.5) < 1e-15


def test_field_sqrt_rational_cases():
    assert field_sqrt(FE(Fraction(9, 4))) == FE(Fraction(3, 2))
    assert field_sqrt(FE(12)) == SQRT3 * FE(2)
    assert field_sqrt(FE(26)) == SQRT26
    assert field_sqrt(FE(Fraction(78, 49))) == SQRT78 * FE(Fraction(1, 7))
    # negative radicands pick up the imaginary unit
    s = field_sqrt(FE(-3))
    assert s == I * SQRT3
    assert s * s == FE(-3)
    # not expressible in the tower
    assert field_sqrt(FE(5)) is None
    assert field_sqrt(SQRT3) is None


_fracs = st.fractions(min_value=-40, max_value=40, max_denominator=12)


@st.composite
def field_elements(draw):
    return (FE(draw(_fracs)) + SQRT3 * FE(draw(_fracs))
            + SQRT26 * FE(draw(_fracs)) + I * FE(draw(_fracs)))


@settings(max_examples=60, deadline=None)
@given(field_elements(), field_elements())
def test_ring_axioms_and_numeric_homomorphism(a, b):
    assert a * b == b * a
    assert (a + b) * (a - b) == a * a - b * b
    za, zb = a.to_complex(), b.to_complex()
    assert abs((a * b).to_complex() - za * zb) < 1e-9 * (1 + abs(za * zb))


@settings(max_examples=60, deadline=None)
@given(field_elements())
def test_inverse_roundtrip(a):
    if a.is_zero():
        return
    assert a.inverse() * a == ONE


def test_conjugations_fix_products():
    x = SQRT3 * FE(2) + I * SQRT26
    assert x.conj_i().conj_i() == x
    assert x.conj_s3().conj_s3() == x
    assert x.conj_s26().conj_s26() == x


def test_field_elements_hashable_and_immutable():
    x = SQRT3 + FE(1)
    assert hash(x) == hash(SQRT3 + FE(1))
    with pytest.raises(AttributeError):
        x.coords = None
