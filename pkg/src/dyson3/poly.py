"""Dense univariate polynomials and rational functions.

Coefficients come from a pluggable domain: the exact tower field
(ExactDomain) or arbitrary-precision complex floats (NumericDomain).
Degrees stay small (< 30) throughout the pipeline, so everything is
dense and straightforward.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath as mp

from .field import FieldElement, field_sqrt, coerce as fe_coerce


class ExactDomain:
    """Coefficients in Q(sqrt3, sqrt26, i); zero tests are exact."""

    exact = True

    def __init__(self):
        self.zero = FieldElement()
        self.one = FieldElement.from_rational(1)

    def coerce(self, x):
        if isinstance(x, FieldElement):
            return x
        c = fe_coerce(x)
        if c is NotImplemented:
            raise TypeError(f"cannot coerce {x!r} into the tower field")
        return c

    def is_zero(self, x) -> bool:
        return x.is_zero()

    def inv(self, x):
        return x.inverse()

    def sqrt(self, x):
        return field_sqrt(x)          # may be None

    def abs_estimate(self, x) -> float:
        return abs(x.to_complex())

    def __eq__(self, other):
        return isinstance(other, ExactDomain)

    def __hash__(self):
        return hash("ExactDomain")


class NumericDomain:
    """mpmath complex coefficients with a relative zero threshold."""

    exact = False

    def __init__(self, prec: int = 128):
        self.prec = prec
        self.tol = mp.mpf(2) ** (-prec // 2)
        self.zero = mp.mpc(0)
        self.one = mp.mpc(1)

    def coerce(self, x):
        if isinstance(x, FieldElement):
            return x.to_mpc(self.prec)
        if isinstance(x, Fraction):
            return mp.mpc(mp.mpf(x.numerator) / x.denominator)
        return mp.mpc(x)

    def is_zero(self, x) -> bool:
        return abs(x) < self.tol

    def inv(self, x):
        return 1 / x

    def sqrt(self, x):
        return mp.sqrt(x)

    def abs_estimate(self, x) -> float:
        return float(abs(x))

    def __eq__(self, other):
        return isinstance(other, NumericDomain) and other.prec == self.prec

    def __hash__(self):
        return hash(("NumericDomain", self.prec))


EXACT = ExactDomain()


class Poly:
    """Dense polynomial; coeffs[k] multiplies w**k, no trailing zeros."""

    __slots__ = ("dom", "coeffs")

    def __init__(self, coeffs, dom=EXACT):
        cs = [dom.coerce(c) for c in coeffs]
        while cs and dom.is_zero(cs[-1]):
            cs.pop()
        self.dom = dom
        self.coeffs = cs

    # -- basics ----------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1          # -1 for the zero polynomial

    def is_zero(self) -> bool:
        return not self.coeffs

    def lc(self):
        if self.is_zero():
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coeff(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else self.dom.zero

    @staticmethod
    def const(c, dom=EXACT) -> "Poly":
        return Poly([c], dom)

    @staticmethod
    def x(dom=EXACT) -> "Poly":
        return Poly([0, 1], dom)

    # -- ring operations ---------------------------------------------------
    def _same(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.dom != self.dom:
                raise TypeError("mixed coefficient domains")
            return other
        return Poly.const(other, self.dom)

    def __add__(self, other):
        other = self._same(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly([self.coeff(k) + other.coeff(k) for k in range(n)], self.dom)

    __radd__ = __add__

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.dom)

    def __sub__(self, other):
        return self + (-self._same(other))

    def __rsub__(self, other):
        return self._same(other) - self

    def __mul__(self, other):
        other = self._same(other)
        if self.is_zero() or other.is_zero():
            return Poly([], self.dom)
        out = [self.dom.zero] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if self.dom.is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out, self.dom)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = Poly.const(self.dom.one, self.dom)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly.const(other, self.dom)
        return (self - other).is_zero()

    def __hash__(self):
        return hash((self.dom, tuple(self.coeffs)))

    # -- euclidean structure -------------------------------------------------
    def divmod(self, other: "Poly"):
        other = self._same(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        dom = self.dom
        rem = list(self.coeffs)
        dq = len(other.coeffs) - 1
        if len(rem) - 1 < dq:
            return Poly([], dom), self
        inv_lc = dom.inv(other.lc())
        quot = [dom.zero] * (len(rem) - dq)
        for k in range(len(rem) - 1, dq - 1, -1):
            c = rem[k]
            if dom.is_zero(c):
                continue
            f = c * inv_lc
            quot[k - dq] = f
            for j, b in enumerate(other.coeffs):
                rem[k - dq + j] = rem[k - dq + j] - f * b
        return Poly(quot, dom), Poly(rem, dom)

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def __mod__(self, other):
        return self.divmod(other)[1]

    def exact_div(self, other: "Poly") -> "Poly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ValueError("division is not exact")
        return q

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        inv = self.dom.inv(self.lc())
        return Poly([c * inv for c in self.coeffs], self.dom)

    def gcd(self, other: "Poly") -> "Poly":
        a, b = self, self._same(other)
        while not b.is_zero():
            a, b = b, a % b
        return a.monic() if not a.is_zero() else a

    # -- calculus / evaluation --------------------------------------------
    def derivative(self) -> "Poly":
        return Poly([k * c for k, c in enumerate(self.coeffs)][1:], self.dom)

    def __call__(self, x):
        acc = self.dom.zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose(self, inner: "Poly") -> "Poly":
        acc = Poly([], self.dom)
        for c in reversed(self.coeffs):
            acc = acc * inner + Poly.const(c, self.dom)
        return acc

    def shift_var(self, a) -> "Poly":
        """p(w) -> p(w + a)."""
        return self.compose(Poly([a, 1], self.dom))

    def scale(self, c) -> "Poly":
        return Poly([x * self.dom.coerce(c) for x in self.coeffs], self.dom)

    def to_numeric(self, prec: int = 128) -> "Poly":
        dom = NumericDomain(prec)
        return Poly([dom.coerce(c) for c in self.coeffs], dom)

    def __repr__(self):
        if self.is_zero():
            return "Poly(0)"
        return "Poly(" + " + ".join(f"({c!r})*w^{k}" for k, c in enumerate(self.coeffs)) + ")"


def poly_squarefree_factor(p: Poly):
    """Yun's algorithm: [(factor, multiplicity)], factors pairwise coprime.

    Product of factor**mult equals p up to a unit.
    """
    if p.is_zero():
        raise ValueError("square-free factorization of the zero polynomial")
    if p.degree == 0:
        return []
    p = p.monic()
    dp = p.derivative()
    g = p.gcd(dp)
    out = []
    if g.degree == 0:
        return [(p, 1)]
    c = p.exact_div(g)
    d = dp.exact_div(g) - c.derivative()
    m = 1
    while not c.degree <= 0:
        f = c.gcd(d)
        if f.degree > 0:
            out.append((f, m))
        c2 = c.exact_div(f)
        d = d.exact_div(f) - c2.derivative()
        c = c2
        m += 1
    return out


def poly_complex_roots(p: Poly, prec: int = 128):
    """Numeric roots with multiplicities from the square-free split.

    Each factor of the square-free decomposition has simple roots, so
    mpmath's solver converges cleanly and the multiplicity bookkeeping is
    exact.  Returns [(mpc root, multiplicity)]; multiplicities sum to deg p.
    """
    if p.is_zero() or p.degree < 1:
        raise ValueError("need a nonzero polynomial of degree >= 1")
    out = []
    with mp.workprec(prec + 30):
        for fac, mult in poly_squarefree_factor(p):
            if fac.degree == 0:
                continue
            cs = [c.to_mpc(prec + 30) if isinstance(c, FieldElement) else mp.mpc(c)
                  for c in reversed(fac.coeffs)]
            roots = mp.polyroots(cs, maxsteps=200, extraprec=prec)
            out.extend((mp.mpc(r), mult) for r in roots)
    residual = max(abs(_eval_numeric(p, r, prec)) for r, _ in out)
    bound = mp.mpf(2) ** (-prec // 2)
    scale = max(1.0, max(p.dom.abs_estimate(c) for c in p.coeffs))
    if residual > bound * scale:
        raise ArithmeticError(
            f"root refinement did not converge: residual {mp.nstr(residual, 5)}")
    return out


def _eval_numeric(p: Poly, x, prec: int):
    acc = mp.mpc(0)
    for c in reversed(p.coeffs):
        cv = c.to_mpc(prec) if isinstance(c, FieldElement) else mp.mpc(c)
        acc = acc * x + cv
    return acc


def exact_roots(p: Poly):
    """All roots of p expressible in the tower, with multiplicities.

    Pulls rational roots out of every square-free factor, then solves the
    residual quadratics with field_sqrt.  Returns (roots, fully_solved);
    when fully_solved is False a caller must fall back to numerics.
    """
    if p.dom is not EXACT and not isinstance(p.dom, ExactDomain):
        raise TypeError("exact_roots needs exact coefficients")
    roots = []
    solved = True
    for fac, mult in poly_squarefree_factor(p):
        rem = fac
        for r in _rational_roots(fac):
            roots.append((FieldElement.from_rational(r), mult))
            rem = rem.exact_div(Poly([-r, 1]))
        if rem.degree == 2:
            a, b, c = rem.coeffs[2], rem.coeffs[1], rem.coeffs[0]
            disc = b * b - 4 * a * c
            s = field_sqrt(disc)
            if s is None:
                solved = False
                continue
            inv2a = (2 * a).inverse()
            roots.append(((-b + s) * inv2a, mult))
            roots.append(((-b - s) * inv2a, mult))
        elif rem.degree >= 1:
            solved = False
    return roots, solved


def _rational_roots(p: Poly):
    """Rational roots of an exact polynomial (rational root theorem)."""
    if any(not c.is_rational() for c in p.coeffs):
        # irrational coefficients: try nothing (quadratic path may still work)
        return []
    den_lcm = 1
    for c in p.coeffs:
        d = c.as_rational().denominator
        den_lcm = den_lcm * d // _gcd(den_lcm, d)
    ints = [int(c.as_rational() * den_lcm) for c in p.coeffs]
    found = []
    a0, an = None, ints[-1]
    for c in ints:
        if c != 0:
            a0 = c
            break
    if a0 is None:
        return found
    cand = set()
    for pnum in _divisors(abs(a0)):
        for pden in _divisors(abs(an)):
            cand.add(Fraction(pnum, pden))
            cand.add(Fraction(-pnum, pden))
    if p(FieldElement.from_rational(0)).is_zero():
        found.append(Fraction(0))
    for q in sorted(cand):
        if p(FieldElement.from_rational(q)).is_zero():
            found.append(q)
    return found


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def _divisors(n: int):
    if n == 0:
        return [1]
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return sorted(set(out))


class RationalFunction:
    """Reduced num/den pair with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Poly):
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.dom != den.dom:
            raise TypeError("mixed coefficient domains")
        if not num.is_zero():
            g = num.gcd(den)
            if g.degree > 0:
                num = num.exact_div(g)
                den = den.exact_div(g)
        else:
            den = Poly.const(den.dom.one, den.dom)
        lc_inv = den.dom.inv(den.lc())
        object.__setattr__(self, "num", num.scale(lc_inv))
        object.__setattr__(self, "den", den.monic())

    def __setattr__(self, *a):
        raise AttributeError("RationalFunction is immutable")

    @property
    def dom(self):
        return self.num.dom if not self.num.is_zero() else self.den.dom

    @staticmethod
    def from_poly(p: Poly) -> "RationalFunction":
        return RationalFunction(p, Poly.const(p.dom.one, p.dom))

    @staticmethod
    def const(c, dom=EXACT) -> "RationalFunction":
        return RationalFunction.from_poly(Poly.const(c, dom))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.degree == 0

    # -- field operations ------------------------------------------------
    def _same(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Poly):
            return RationalFunction.from_poly(other)
        return RationalFunction.const(other, self.den.dom)

    def __add__(self, other):
        o = self._same(other)
        return RationalFunction(self.num * o.den + o.num * self.den,
                                self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._same(other))

    def __rsub__(self, other):
        return self._same(other) - self

    def __mul__(self, other):
        o = self._same(other)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._same(other)
        if o.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._same(other) / self

    def __pow__(self, n: int):
        out = RationalFunction.const(self.den.dom.one, self.den.dom)
        base = self
        if n < 0:
            base = RationalFunction(self.den, self.num)
            n = -n
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        return (self - self._same(other)).is_zero()

    def __hash__(self):
        return hash((self.num, self.den))

    def derivative(self) -> "RationalFunction":
        return RationalFunction(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den)

    def __call__(self, x):
        dv = self.den(x)
        dom = self.den.dom
        if isinstance(dv, FieldElement):
            if dv.is_zero():
                raise ZeroDivisionError("evaluation at a pole")
            return self.num(x) * dv.inverse()
        return self.num(x) / dv

    def shift_var(self, a) -> "RationalFunction":
        return RationalFunction(self.num.shift_var(a), self.den.shift_var(a))

    def order_at_infinity(self) -> int:
        """deg den - deg num; +inf order is represented by a large int."""
        if self.num.is_zero():
            return 10 ** 9
        return self.den.degree - self.num.degree

    def to_numeric(self, prec: int = 128) -> "RationalFunction":
        return RationalFunction(self.num.to_numeric(prec), self.den.to_numeric(prec))

    def __repr__(self):
        return f"RF({self.num!r} / {self.den!r})"


def partial_fractions(f: RationalFunction, roots=None, prec: int = 128):
    """Split f into polynomial part + Laurent ladders at each pole.

    Returns (poly_part, [(pole, order, ladder)]) where ladder[j] multiplies
    (w - pole)**-(order - j).  Works over either domain; `roots` may carry
    precomputed (root, multiplicity) pairs for the denominator, otherwise
    they are found exactly when possible and numerically otherwise.
    """
    if roots is None:
        if f.dom.exact:
            roots, solved = exact_roots(f.den)
            if not solved:
                roots = poly_complex_roots(f.den, prec)
        else:
            roots = poly_complex_roots(f.den, prec)
    if roots and f.dom.exact and not isinstance(roots[0][0], FieldElement):
        f = f.to_numeric(prec)
    poly_part, rem = f.num.divmod(f.den)
    terms = []
    for pole, order in roots:
        # h(w) = f(w + pole) * w**order is regular at 0; its Taylor
        # coefficients are the Laurent ladder of f at the pole.
        shifted_den = f.den.shift_var(pole)
        shifted_num = rem.shift_var(pole)
        core = Poly(shifted_den.coeffs[order:], f.den.dom)
        hj = RationalFunction(shifted_num, core)
        ladder = []
        fact = 1
        for j in range(order):
            if j > 0:
                hj = hj.derivative()
                fact *= j
            val = hj(f.den.dom.zero)
            if fact != 1:
                val = val * f.den.dom.inv(f.den.dom.coerce(fact))
            ladder.append(val)
        terms.append((pole, order, ladder))
    return poly_part, terms


def recombine(poly_part: Poly, terms, dom=None):
    """Inverse of partial_fractions, for round-trip checks."""
    dom = dom or poly_part.dom
    out = RationalFunction.from_poly(poly_part)
    for pole, order, ladder in terms:
        base = Poly([-pole, dom.one], dom)
        for j, c in enumerate(ladder):
            out = out + RationalFunction(Poly.const(c, dom), base ** (order - j))
    return out
