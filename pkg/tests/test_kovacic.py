"""Liouvillian-solvability decision procedure and the Lame sieve."""
from fractions import Fraction

import mpmath as mp
import pytest

from dyson3 import nve
from dyson3.field import FE, SQRT3, I
from dyson3.kovacic import kovacic, lame_sieve, pole_profile
from dyson3.model import taylor_truncate
from dyson3.poly import Poly, RationalFunction

W = Poly.x()
ONE = Poly([1])


def rf(num, den=ONE):
    return RationalFunction(num, den)


def test_corpus_zero_and_constant():
    res = kovacic(rf(Poly([0])))
    assert res.verdict == "liouvillian" and res.case == 1
    assert res.certificate == "exact"
    res = kovacic(rf(ONE))
    assert res.verdict == "liouvillian" and res.case == 1
    assert res.certificate == "exact"


def test_corpus_airy():
    res = kovacic(rf(W))
    assert res.verdict == "not_liouvillian"
    assert res.group == "SL(2,C)"
    assert res.numeric_rejections == 0


def test_corpus_regular_singular():
    """r = (3/16)/w^2 is Liouvillian, but its exponents (1 +- sqrt7/2)/2
    leave the coefficient tower, so the certificate is necessarily numeric
    with a reported residual."""
    res = kovacic(rf(Poly([FE(Fraction(3, 16))]), W * W))
    assert res.verdict == "liouvillian" and res.case == 1
    assert res.certificate == "numeric"
    assert res.residual < 1e-12


def test_exact_certificates_resubstitute():
    """omega' + omega^2 = r is checked exactly inside the solver for exact
    runs; a failed re-substitution would surface as a missing certificate."""
    for r in (rf(Poly([0])), rf(ONE)):
        res = kovacic(r)
        assert res.certificate == "exact"
        assert res.residual == 0.0
        assert res.omega is not None


def test_numeric_certificate_for_root_outside_tower():
    """xi = (w^2 - 5)^(1/4) solves xi'' = r xi for
    r = -(w^2 + 10) / (4 (w^2 - 5)^2); the poles +-sqrt5 leave the tower,
    so the certificate is numeric and must carry a tiny residual."""
    den = (W * W - Poly([FE(5)])) ** 2
    num = (W * W + Poly([FE(10)])).scale(FE(Fraction(-1, 4)))
    res = kovacic(rf(num, den))
    assert res.verdict == "liouvillian"
    assert res.case == 1
    if res.certificate == "numeric":
        assert res.residual is not None and res.residual < 1e-8


def test_moebius_shift_invariance():
    """Kovacic verdicts are invariant under w -> w + const; run the paper
    variant shifted by 1 and compare."""
    r = nve.algebrize(nve.paper_nve_l()).r
    res = kovacic(r)
    shifted = RationalFunction(r.num.shift_var(FE(1)), r.den.shift_var(FE(1)))
    res2 = kovacic(shifted)
    assert res.verdict == res2.verdict == "not_liouvillian"


def test_pole_profile_of_quartic_nve():
    r = nve.algebrize(nve.paper_nve_l()).r
    prof = pole_profile(r, 128)
    assert prof.o_inf == 2
    orders = sorted(p.order for p in prof.poles)
    assert orders == [2, 2, 2]
    zero_pole = [p for p in prof.poles if p.point == FE(0)][0]
    assert zero_pole.b == FE(6)
    others = [p for p in prof.poles if p.point != FE(0)]
    assert all(p.b == FE(Fraction(-3, 16)) for p in others)


def test_dyson_quartic_paper_variant_not_liouvillian():
    res = kovacic(nve.algebrize(nve.paper_nve_l()).r)
    assert res.verdict == "not_liouvillian"
    assert res.group == "SL(2,C)"
    assert res.numeric_rejections == 0, "verdict must rest on exact rejections"


def test_dyson_quartic_derived_transverse_not_liouvillian():
    vs = nve.derive_variational(taylor_truncate(4))
    r = nve.algebrize(nve.scalar_nve(vs, "antisymmetric")).r
    res = kovacic(r)
    assert res.verdict == "not_liouvillian"
    assert res.numeric_rejections == 0


def test_dyson_quartic_derived_tangential_liouvillian():
    """The symmetric derived coefficient is g'(q): the tangential variation
    psidot solves it, so Kovacic must find a Liouvillian solution."""
    vs = nve.derive_variational(taylor_truncate(4))
    r = nve.algebrize(nve.scalar_nve(vs, "symmetric")).r
    res = kovacic(r)
    assert res.verdict == "liouvillian"
    assert res.case == 1 and res.certificate == "exact"


def test_kovacic_log_is_deterministic():
    r = nve.algebrize(nve.paper_nve_l()).r
    assert kovacic(r).log == kovacic(r).log


def test_lame_sieve_paper_coupling():
    sv = lame_sieve(4)
    assert not sv["lame_hermite"]
    assert not sv["brioschi_halphen_crawford"]
    assert not sv["baldassarri_union"]
    assert not sv["admissible"]
    assert sv["index_n"] == []      # 1 + 4A = 17 is not a rational square


def test_lame_sieve_derived_coupling():
    sv = lame_sieve(-12)
    assert not sv["admissible"]     # negative discriminant, no real index


def test_lame_sieve_positive_families():
    assert lame_sieve(6)["lame_hermite"]            # n = 2
    assert lame_sieve(Fraction(3, 4))["brioschi_halphen_crawford"]  # n+1/2 = 1
    sv = lame_sieve(Fraction(-5, 36))               # n + 1/2 = 1/3
    assert sv["baldassarri_union"] and not sv["lame_hermite"]
    assert not sv["baldassarri_intersection"]


def test_lame_sieve_intersection_reading_is_empty():
    for a in (4, 6, Fraction(3, 4), Fraction(-5, 36), -12):
        assert lame_sieve(a)["baldassarri_intersection"] is False


def test_lame_sieve_rejects_irrational_coupling():
    with pytest.raises(ValueError):
        lame_sieve(SQRT3)
