"""Periodic family on the invariant plane: turning points, period
function, and the branch monodromy of the closed-form radical B(c).

The diagonal system is qdot = p, pdot = -Vtilde'(q)/2 with
Vtilde(q) = -log(sin 2q) - 2 log(sin q), convex on (0, pi/2) with minimum
at pi/3.  Energies are parameterized by c = 1/(2 e^E); the orbit exists
for 0 < c <= c* = 3 sqrt3 / 16, shrinking to the equilibrium at c*.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath as mp


class PeriodDomainError(ValueError):
    pass


def potential_tilde(q):
    """Vtilde(q) = -log(sin 2q) - 2 log(sin q) on 0 < q < pi/2."""
    if isinstance(q, (int, float)) and not 0 < q < math.pi / 2:
        raise PeriodDomainError(f"q={q} outside (0, pi/2)")
    if isinstance(q, (int, float)):
        return -math.log(math.sin(2 * q)) - 2 * math.log(math.sin(q))
    return -mp.log(mp.sin(2 * q)) - 2 * mp.log(mp.sin(q))


def potential_tilde_prime(q):
    if isinstance(q, (int, float)):
        return -2 / math.tan(2 * q) - 2 / math.tan(q)
    return -2 * mp.cot(2 * q) - 2 * mp.cot(q)


def e_min(prec: int = 128):
    """Equilibrium energy -3 log(sqrt3/2)."""
    with mp.workprec(prec):
        return -3 * mp.log(mp.sqrt(3) / 2)


def c_star(prec: int = 128):
    with mp.workprec(prec):
        return 3 * mp.sqrt(3) / 16


def c_of_energy(e, prec: int = 128):
    with mp.workprec(prec):
        return mp.exp(-mp.mpf(e)) / 2


def energy_of_c(c, prec: int = 128):
    with mp.workprec(prec):
        return -mp.log(2 * mp.mpf(c))


@dataclass(frozen=True)
class TurningPointData:
    c: object
    energy: object
    big_b: object
    r1: object
    r2: object
    eps: object
    delta: object
    q_minus: object
    q_plus: object

    def quartic_residual(self):
        res = []
        for r in (self.r1, self.r2):
            res.append(abs((1 - r) ** 2 * (1 - r * r) - 16 * self.c ** 2))
        return max(res)


def _b_coeffs(prec):
    # B solves the resolvent B^3 - 64 c^2 B - 64 c^2 = 0 of the
    # turning-point quartic; Cardano gives
    #   B = K1 c^2 / t + K2 t,  t = (9c^2 - sqrt3 * sqrt(27c^4-256c^6))^(1/3)
    # with K1 = 16 (2/3)^(1/3) and K2 = (32/9)^(1/3).
    with mp.workprec(prec):
        return 16 * mp.cbrt(mp.mpf(2) / 3), mp.cbrt(mp.mpf(32) / 9)


def big_b(c, prec: int = 128):
    """Closed-form B(c) on the principal (real, 0 < c <= c*) branch."""
    with mp.workprec(prec):
        c = mp.mpf(c) if not isinstance(c, mp.mpc) else c
        rad = 27 * c ** 4 - 256 * c ** 6
        if not isinstance(c, mp.mpc) and rad < 0:
            # roundoff below the branch point c*: the radicand is >= 0
            # throughout (0, c*]
            rad = mp.mpf(0)
        inner = mp.sqrt(rad)
        t = mp.cbrt(9 * c ** 2 - mp.sqrt(3) * inner)
        k1, k2 = _b_coeffs(prec)
        return k1 * c ** 2 / t + k2 * t


def turning_points_closed(c, prec: int = 128) -> TurningPointData:
    """Closed forms: B(c), the quartic roots r_{1,2}, then eps/delta
    and q-+.

    The turning-point cosines satisfy r = cos 2q with q+ = pi/3 + eps and
    q- = pi/3 - delta, hence eps = (arccos r1 - 2pi/3)/2 and
    delta = (2pi/3 - arccos r2)/2.
    """
    with mp.workprec(prec):
        c = mp.mpf(c)
        cs = c_star(prec)
        if not 0 < c <= cs * (1 + mp.mpf(2) ** (5 - prec)):
            raise PeriodDomainError(f"c={float(c)} outside (0, 3*sqrt(3)/16]")
        b = big_b(c, prec)
        s1 = mp.sqrt(1 + b)
        arg = 2 - b + 2 / s1
        if arg < 0:
            # roundoff at the degenerate point c = c*
            arg = mp.mpf(0)
        s2 = mp.sqrt(arg)
        r1 = mp.mpf(1) / 2 - s1 / 2 - s2 / 2
        r2 = mp.mpf(1) / 2 - s1 / 2 + s2 / 2
        eps = (mp.acos(r1) - 2 * mp.pi / 3) / 2
        delta = (2 * mp.pi / 3 - mp.acos(r2)) / 2
        return TurningPointData(
            c=c, energy=energy_of_c(c, prec), big_b=b, r1=r1, r2=r2,
            eps=eps, delta=delta,
            q_minus=mp.pi / 3 - delta, q_plus=mp.pi / 3 + eps)


def turning_points_numeric(e, prec: int = 128):
    """Roots of E - Vtilde(q) = 0 bracketing pi/3, found by bisection plus
    Newton polish; residual below 2^-(prec-10)."""
    with mp.workprec(prec):
        e = mp.mpf(e)
        emin = e_min(prec)
        if e <= emin:
            raise PeriodDomainError("energy at or below the equilibrium energy")
        f = lambda q: e - potential_tilde(q)
        q_minus = _bracket_root(f, mp.mpf(2) ** (-prec), mp.pi / 3, prec)
        q_plus = _bracket_root(f, mp.pi / 3, mp.pi / 2 - mp.mpf(2) ** (-prec), prec)
        return q_minus, q_plus


def _bracket_root(f, lo, hi, prec):
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    # Vtilde - E changes sign exactly once per side of the minimum
    for _ in range(prec + 20):
        mid = (lo + hi) / 2
        fm = f(mid)
        if fm == 0:
            return mid
        if mp.sign(fm) == mp.sign(flo):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return (lo + hi) / 2


@dataclass(frozen=True)
class PeriodSample:
    c: object
    energy: object
    period: object
    log_eta: object
    phi: object


def period(e, tol: float = 1e-10, prec: int = 128) -> PeriodSample:
    """Full return-map period T = 2 * int dq / sqrt(E - Vtilde).

    The substitution q = q- + (q+ - q-) sin^2(theta) removes both
    inverse-square-root endpoint singularities; the integral is then done
    with mpmath's Gauss-Legendre quadrature.  Some published forms quote
    the half-period between turning points; we keep the true return time.
    """
    with mp.workprec(prec):
        q_minus, q_plus = turning_points_numeric(e, prec)
        span = q_plus - q_minus
        e = mp.mpf(e)

        def integrand(theta):
            s = mp.sin(theta)
            q = q_minus + span * s * s
            val = e - potential_tilde(q)
            if val <= 0:
                return mp.mpf(0)
            return 2 * span * s * mp.cos(theta) / mp.sqrt(val)

        val, err = mp.quad(integrand, [0, mp.pi / 2], method="gauss-legendre",
                           error=True)
        t = 2 * val
        if err > tol:
            raise ArithmeticError(
                f"quadrature error {mp.nstr(err, 3)} above tolerance {tol}")
        c = c_of_energy(e, prec)
        tp = turning_points_closed(c, prec) if c <= c_star(prec) else None
        if tp is not None and tp.eps > 0 and tp.delta > 0:
            log_eta = mp.log(tp.eps * tp.delta)
        else:
            log_eta = mp.ninf
        return PeriodSample(c=c, energy=e, period=t, log_eta=log_eta,
                            phi=t - log_eta)


# -- symplectic oracle --------------------------------------------------------

_W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
_W0 = 1.0 - 2.0 * _W1
_YOSHIDA = (_W1, _W0, _W1)


def _force(q: float) -> float:
    # pdot = -Vtilde'(q)/2 = cot q + cot 2q
    return 1.0 / math.tan(q) + 1.0 / math.tan(2.0 * q)


def _leapfrog_step(q: float, p: float, h: float):
    p += 0.5 * h * _force(q)
    q += h * p
    p += 0.5 * h * _force(q)
    return q, p


def _yoshida4_step(q: float, p: float, h: float):
    for w in _YOSHIDA:
        q, p = _leapfrog_step(q, p, w * h)
    return q, p


try:
    from numba import njit as _njit

    @_njit(cache=True)
    def _integrate_nb(q, p, h, nsteps, w1, w0):
        emax = 0.0
        e0 = p * p - math.log(math.sin(2 * q)) - 2 * math.log(math.sin(q))
        for _ in range(nsteps):
            for w in (w1, w0, w1):
                hh = w * h
                p += 0.5 * hh * (1.0 / math.tan(q) + 1.0 / math.tan(2.0 * q))
                q += hh * p
                p += 0.5 * hh * (1.0 / math.tan(q) + 1.0 / math.tan(2.0 * q))
            e = p * p - math.log(math.sin(2 * q)) - 2 * math.log(math.sin(q))
            d = abs(e - e0)
            if d > emax:
                emax = d
        return q, p, emax

    _HAVE_NUMBA = True
except Exception:  # pragma: no cover - numba optional
    _HAVE_NUMBA = False


def diagonal_energy(q: float, p: float) -> float:
    return p * p + potential_tilde(q)


def integrate_diagonal(q0: float, p0: float, h: float, nsteps: int):
    """Fourth-order Yoshida composition; returns final state and the max
    energy deviation seen along the way."""
    if _HAVE_NUMBA:
        return _integrate_nb(q0, p0, h, nsteps, _W1, _W0)
    q, p = q0, p0
    e0 = diagonal_energy(q, p)
    emax = 0.0
    for _ in range(nsteps):
        q, p = _yoshida4_step(q, p, h)
        emax = max(emax, abs(diagonal_energy(q, p) - e0))
    return q, p, emax


def return_map_period(e: float, h: float = 1e-4) -> float:
    """Period from the symplectic flow: start at the inner turning point
    and time two successive p=0 crossings (half period), refined by
    bisection with a fine-step integrator across the crossing step."""
    qm, qp = turning_points_numeric(e, prec=80)
    q, p = float(qm), 0.0
    # one nudge forward so the p=0 start is not re-detected
    q, p = _yoshida4_step(q, p, h)
    t = h
    prev_q, prev_p = q, p
    while True:
        q2, p2 = _yoshida4_step(q, p, h)
        t2 = t + h
        if p > 0 and p2 <= 0:
            break
        q, p, t = q2, p2, t2
        if t > 1e6:
            raise ArithmeticError("no return detected")
    # bisection on the crossing inside [t, t+h] using fine substeps
    lo, hi = 0.0, h
    q0, p0 = q, p
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        qq, pp = q0, p0
        nfine = 16
        dh = mid / nfine
        if dh > 0:
            for _ in range(nfine):
                qq, pp = _yoshida4_step(qq, pp, dh)
        if pp > 0:
            lo = mid
        else:
            hi = mid
    half = t + 0.5 * (lo + hi)
    return 2.0 * half


def energy_drift(e: float, h: float = 1e-3, n_periods: int = 1000) -> float:
    """Max |H - E| along n_periods of symplectic evolution."""
    qm, _ = turning_points_numeric(e, prec=80)
    t_total = n_periods * float(period(e, prec=80).period)
    nsteps = int(t_total / h) + 1
    _, _, emax = integrate_diagonal(float(qm), 0.0, h, nsteps)
    return emax


# -- branch monodromy ---------------------------------------------------------

@dataclass(frozen=True)
class MonodromyResult:
    b_before: complex
    b_after: complex
    branch_changed: bool        # did the defining inner radical flip sign?
    b_changed: bool
    roots_swapped: bool
    log_eta_increment: complex  # continuously tracked log(eps*delta) change
    eta_winding: int


class ContinuationAmbiguity(ArithmeticError):
    pass


def _sqrt_candidates(z):
    s = mp.sqrt(z)
    return (s, -s)


def _cbrt_candidates(z):
    r = mp.cbrt(z)
    w = mp.exp(2j * mp.pi / 3)
    return (r, r * w, r * w * w)


def _nearest(cands, prev, move_scale):
    """Branch-continuous pick with an ambiguity guard: the two
    closest candidates must be separated by at least 3x the step-to-step
    movement."""
    dists = sorted((abs(c - prev), c) for c in cands)
    best = dists[0][1]
    if len(dists) > 1:
        gap = abs(dists[1][1] - dists[0][1])
        if move_scale > 0 and gap < 3 * move_scale:
            raise ContinuationAmbiguity(
                f"branch separation {float(gap):.3e} below guard "
                f"{3 * float(move_scale):.3e}; increase step count")
    return best


def eta_monodromy(radius: float = 1e-3, steps: int = 2000, loops: int = 1,
                  center=None, prec: int = 80) -> MonodromyResult:
    """Continue the closed-form turning-point chain around a loop in the
    complex c-plane.

    The inner radical sqrt(27 c^4 - 256 c^6) has a simple zero at
    c* = 3 sqrt3/16; a loop around c* flips its sign and exchanges the
    turning-point roots r1 <-> r2, while two loops restore everything.
    B(c) itself is the symmetric Cardano combination of the resolvent
    cubic and returns to its value.  eta = eps*delta has a simple zero at
    c*, so the continuously tracked log(eta) gains 2*pi*i per enclosing
    loop: the logarithmic branch point that makes the period function
    infinitely branched.
    """
    with mp.workprec(prec):
        c0 = c_star(prec) if center is None else mp.mpc(center)
        k1, k2 = _b_coeffs(prec)
        two_thirds_pi = 2 * mp.pi / 3

        def chain(c, s, t):
            """(B, r1, r2, eta) from already-continued radicals s, t."""
            b = k1 * c ** 2 / t + k2 * t
            return b

        def eta_of(r1, r2):
            eps = (mp.acos(r1) - two_thirds_pi) / 2
            delta = (two_thirds_pi - mp.acos(r2)) / 2
            return eps * delta

        def radicals(c, prev):
            s_prev, t_prev, s1_prev, s2_prev, move = prev
            z = 27 * c ** 4 - 256 * c ** 6
            if s_prev is None:
                s = mp.sqrt(z)
            else:
                s = _nearest(_sqrt_candidates(z), s_prev, move[0])
            t3 = 9 * c ** 2 - mp.sqrt(3) * s
            t = mp.cbrt(t3) if t_prev is None else \
                _nearest(_cbrt_candidates(t3), t_prev, move[1])
            b = chain(c, s, t)
            z1 = 1 + b
            s1 = mp.sqrt(z1) if s1_prev is None else \
                _nearest(_sqrt_candidates(z1), s1_prev, move[2])
            z2 = 2 - b + 2 / s1
            s2 = mp.sqrt(z2) if s2_prev is None else \
                _nearest(_sqrt_candidates(z2), s2_prev, move[3])
            return s, t, s1, s2, b

        start = c0 + radius
        s0, t0, s10, s20, b_start = radicals(start, (None, None, None, None, None))
        r1_start = mp.mpf(1) / 2 - s10 / 2 - s20 / 2
        r2_start = mp.mpf(1) / 2 - s10 / 2 + s20 / 2
        eta_prev = eta_of(r1_start, r2_start)
        log_eta = mp.log(eta_prev)
        arg_acc = mp.mpf(0)

        s_prev, t_prev, s1_prev, s2_prev = s0, t0, s10, s20
        move = [mp.mpf(0)] * 4
        total = loops * steps
        c = start
        for j in range(1, total + 1):
            ang = 2 * mp.pi * j / steps
            c = c0 + radius * mp.exp(1j * ang)
            s, t, s1, s2, b = radicals(
                c, (s_prev, t_prev, s1_prev, s2_prev, move))
            move = [abs(s - s_prev), abs(t - t_prev),
                    abs(s1 - s1_prev), abs(s2 - s2_prev)]
            s_prev, t_prev, s1_prev, s2_prev = s, t, s1, s2
            r1 = mp.mpf(1) / 2 - s1 / 2 - s2 / 2
            r2 = mp.mpf(1) / 2 - s1 / 2 + s2 / 2
            eta = eta_of(r1, r2)
            dphi = mp.arg(eta / eta_prev)
            arg_acc += dphi
            eta_prev = eta
        b_end = chain(c, s_prev, t_prev)
        r1_end = mp.mpf(1) / 2 - s1_prev / 2 - s2_prev / 2
        r2_end = mp.mpf(1) / 2 - s1_prev / 2 + s2_prev / 2
        flipped = bool(abs(s_prev + s0) < abs(s_prev - s0))
        swapped = bool(abs(r1_end - r2_start) + abs(r2_end - r1_start)
                       < abs(r1_end - r1_start) + abs(r2_end - r2_start))
        log_inc = mp.mpc(mp.log(abs(eta_prev)) - mp.log(abs(
            eta_of(r1_start, r2_start))), arg_acc)
        winding = int(mp.nint(arg_acc / (2 * mp.pi)))
        return MonodromyResult(
            b_before=complex(b_start), b_after=complex(b_end),
            branch_changed=flipped,
            b_changed=bool(abs(b_end - b_start) > mp.mpf("1e-6")),
            roots_swapped=swapped,
            log_eta_increment=complex(log_inc),
            eta_winding=winding)


def period_scan(offsets, tol: float = 1e-10, prec: int = 128):
    """PeriodSamples for energies E = E_min + offset."""
    emin = e_min(prec)
    out = []
    for off in offsets:
        out.append(period(emin + mp.mpf(off), tol=tol, prec=prec))
    return out
