"""Period function, turning points, and branch monodromy."""
import math

import mpmath as mp
import pytest

from dyson3 import period


def test_equilibrium_constants():
    with mp.workprec(128):
        assert abs(period.e_min() - mp.log(8 * mp.sqrt(3) / 9)) < mp.mpf(1e-35)
        assert abs(period.c_star() - 3 * mp.sqrt(3) / 16) < mp.mpf(1e-35)


def test_c_energy_bijection():
    with mp.workprec(128):
        e = period.e_min() + mp.mpf("0.37")
        c = period.c_of_energy(e)
        assert abs(period.energy_of_c(c) - e) < mp.mpf(1e-35)
        assert 0 < c < period.c_star()


def test_turning_points_closed_vs_numeric_50_values():
    prec = 128
    with mp.workprec(prec):
        cstar = period.c_star(prec)
        emin = period.e_min(prec)
        worst_q = worst_res = 0.0
        for k in range(50):
            c = mp.mpf("0.02") + (cstar - mp.mpf("0.02")) * k / 49
            tp = period.turning_points_closed(c, prec)
            if tp.energy - emin < mp.mpf(2) ** (16 - prec):
                qm = qp = mp.pi / 3    # degenerate endpoint c = c*
            else:
                qm, qp = period.turning_points_numeric(tp.energy, prec)
            worst_q = max(worst_q, float(abs(tp.q_minus - qm)),
                          float(abs(tp.q_plus - qp)))
            worst_res = max(worst_res, float(tp.quartic_residual()))
        assert worst_q < 1e-9
        assert worst_res < 1e-12


def test_double_root_at_c_star():
    tp = period.turning_points_closed(period.c_star(128), 128)
    assert abs(float(tp.r1) + 0.5) < 1e-10
    assert abs(float(tp.r2) + 0.5) < 1e-10
    assert float(abs(tp.eps)) < 1e-30 and float(abs(tp.delta)) < 1e-30


def test_domain_guards():
    with pytest.raises(period.PeriodDomainError):
        period.turning_points_closed(0.4)      # above c*
    with pytest.raises(period.PeriodDomainError):
        period.turning_points_numeric(float(period.e_min()) - 0.1)


def test_period_limit_is_pi():
    with mp.workprec(128):
        t = period.period(period.e_min() + mp.mpf(1e-6)).period
        assert abs(t - mp.pi) < 1e-3


def test_quadrature_vs_return_map_on_grid():
    emin = float(period.e_min(80))
    offsets = [0.02 * 1.6 ** k for k in range(10)]
    for off in offsets:
        e = emin + off
        t_quad = float(period.period(e, prec=80).period)
        t_map = period.return_map_period(e, h=1e-4)
        assert abs(t_quad - t_map) < 1e-6, f"offset {off}"


def test_energy_drift_over_1000_periods():
    e = float(period.e_min(80)) + 0.3
    assert period.energy_drift(e, h=1e-3, n_periods=1000) < 1e-8


def test_period_scan_is_monotone():
    samples = period.period_scan([0.5, 0.1, 0.01, 1e-4], prec=96)
    ts = [float(s.period) for s in samples]
    assert ts == sorted(ts)
    assert all(float(s.phi) == float(s.period - s.log_eta) for s in samples)


def test_monodromy_single_loop_flips_branch():
    res = period.eta_monodromy(radius=1e-3, steps=800, loops=1)
    assert res.branch_changed
    assert res.roots_swapped
    assert res.eta_winding == 1
    assert abs(res.log_eta_increment.imag - 2 * math.pi) < 1e-6


def test_monodromy_double_loop_restores():
    res = period.eta_monodromy(radius=1e-3, steps=800, loops=2)
    assert not res.branch_changed
    assert not res.roots_swapped
    assert res.eta_winding == 2


def test_monodromy_non_enclosing_loop():
    center = float(period.c_star(80)) - 0.01
    res = period.eta_monodromy(radius=1e-3, steps=800, loops=1, center=center)
    assert not res.branch_changed
    assert not res.roots_swapped
    assert res.eta_winding == 0


def test_monodromy_ambiguity_guard():
    with pytest.raises(period.ContinuationAmbiguity):
        period.eta_monodromy(radius=1e-3, steps=4, loops=1)
