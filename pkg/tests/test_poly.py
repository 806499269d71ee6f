"""Univariate polynomials and rational functions over the tower."""
from fractions import Fraction

import mpmath as mp
import pytest

from dyson3.field import FE, I, SQRT3, FieldElement
from dyson3.poly import (EXACT, NumericDomain, Poly, RationalFunction,
                         exact_roots, partial_fractions, poly_complex_roots,
                         poly_squarefree_factor, recombine)


def _p(*coeffs):
    return Poly([FE(Fraction(c)) if not isinstance(c, FieldElement) else c
                 for c in coeffs])


def test_arithmetic_and_divmod():
    a = _p(1, 0, 2)          # 1 + 2w^2
    b = _p(-1, 1)            # w - 1
    q, r = a.divmod(b)
    assert q * b + r == a
    assert r.degree == 0
    assert a.exact_div(Poly([FE(2)])) == _p(Fraction(1, 2), 0, 1)


def test_derivative_product_rule():
    a = _p(3, 1, Fraction(1, 2))
    b = _p(0, 0, 1, 4)
    assert (a * b).derivative() == a.derivative() * b + a * b.derivative()


def test_gcd_and_squarefree_multiplicities():
    w = Poly.x()
    p = (w - 1) ** 3 * (w + 2) * (w * w + 3)
    fac = poly_squarefree_factor(p)
    mults = sorted(m for _, m in fac)
    assert mults == [1, 3]
    prod = Poly([1])
    for f, m in fac:
        prod = prod * f ** m
    assert prod == p.monic()


def test_exact_roots_in_tower():
    w = Poly.x()
    # (w^2 - 3)(w - 1/2): roots +-sqrt3 and 1/2, all in the tower
    p = (w * w - 3) * (w - Poly.const(FE(Fraction(1, 2))))
    roots, solved = exact_roots(p)
    assert solved
    assert {r for r, _ in roots} == {SQRT3, -SQRT3, FE(Fraction(1, 2))}
    # w^2 - 5 has no root in the tower
    _, solved = exact_roots(w * w - 5)
    assert not solved


def test_complex_roots_with_multiplicity():
    w = Poly.x()
    p = (w - 2) ** 2 * (w * w + 1)
    roots = poly_complex_roots(p, prec=128)
    assert sorted(m for _, m in roots) == [1, 1, 2]
    assert sum(m for _, m in roots) == p.degree
    two = [r for r, m in roots if m == 2][0]
    assert abs(two - 2) < 1e-30


def test_partial_fraction_roundtrip_exact():
    w = Poly.x()
    f = RationalFunction(_p(1, 2, 0, 1), (w - 1) ** 2 * (w + 3))
    poly_part, terms = partial_fractions(f)
    assert recombine(poly_part, terms) == f


def test_partial_fraction_roundtrip_numeric_128bit():
    dom = NumericDomain(128)
    w = Poly.x(dom)
    num = Poly([mp.mpf(1), mp.mpf(3)], dom)
    den = (w * w + 2) * (w - mp.mpf("0.25"))
    with mp.workprec(160):
        f = RationalFunction(num, den)
        poly_part, terms = partial_fractions(f, prec=128)
        worst = mp.mpf(0)
        for x in (mp.mpc(2, 0.3), mp.mpc(5, 0.3), mp.mpc(-3, 0.3)):
            acc = poly_part(x)
            for pole, order, ladder in terms:
                for j, c in enumerate(ladder):
                    acc += c / (x - pole) ** (order - j)
            worst = max(worst, abs(acc - f(x)))
    assert worst < mp.mpf(1e-30)


def test_rational_function_reduction_and_order():
    w = Poly.x()
    f = RationalFunction((w - 1) * (w + 2), (w - 1) * w)
    assert f.den == w
    assert f.order_at_infinity() == 0
    assert RationalFunction(Poly([1]), w * w * w).order_at_infinity() == 3
    assert (f - f).is_zero()


def test_rational_function_field_ops():
    w = Poly.x()
    f = RationalFunction(Poly([1]), w)
    g = RationalFunction(w - 1, w + 1)
    assert (f + g) * (w + 1) * w == (w + 1) + (w - 1) * w
    assert (f / g) * g == f
    assert f ** -2 == RationalFunction(w * w, Poly([1]))
    assert f.derivative() == -(f * f)


def test_mixed_domain_rejected():
    with pytest.raises(TypeError):
        Poly([FE(1)]) + Poly([mp.mpf(1)], NumericDomain(64))


def test_numeric_domain_tolerant_equality():
    dom = NumericDomain(128)
    eps = mp.mpf(2) ** -100
    assert Poly([1, 1], dom) == Poly([1 + eps, 1], dom)
    assert Poly([1, 1], dom) != Poly([1.5, 1], dom)


def test_complex_coefficients_via_imaginary_unit():
    w = Poly.x()
    p = (w - I) * (w + I)
    assert p == w * w + 1
    roots, solved = exact_roots(p)
    assert solved and {r for r, _ in roots} == {I, -I}
