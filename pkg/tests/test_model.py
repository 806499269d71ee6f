"""Hamiltonians, canonical reduction, and exact Taylor truncations."""
import math
from fractions import Fraction

import pytest

from dyson3.field import FE, SQRT3, FieldElement
from dyson3.model import (DomainError, canonical_inverse, canonical_transform,
                          diagonal_potential, diagonal_reduce,
                          diagonal_reduce_via_energy, h_full_eval, h_reg_eval,
                          hamiltonian_vector_field, in_cell, qddot_exact,
                          taylor_truncate, transform_jacobian)
from dyson3.poly import Poly


def test_canonical_transform_roundtrip():
    x, y = (0.3, -0.1, 1.2), (0.5, -0.2, 0.7)
    q, p = canonical_transform(x, y)
    x2, y2 = canonical_inverse(q, p)
    assert all(abs(a - b) < 1e-15 for a, b in zip(x, x2))
    assert all(abs(a - b) < 1e-15 for a, b in zip(y, y2))


def test_transform_is_canonical():
    """J S J^T = S: the reduction preserves the symplectic form exactly."""
    J = transform_jacobian()
    n = 6

    def s(i, j):
        if j == i + 3:
            return Fraction(1)
        if i == j + 3:
            return Fraction(-1)
        return Fraction(0)

    for a in range(n):
        for b in range(n):
            acc = Fraction(0)
            for i in range(n):
                for j in range(n):
                    acc += J[a][i] * s(i, j) * J[b][j]
            assert acc == s(a, b)


def test_jacobian_matches_linear_transform():
    """The reduction is linear, so J columns are its images of basis
    vectors."""
    J = transform_jacobian()
    for col in range(6):
        x = [Fraction(int(col == k)) for k in range(3)]
        y = [Fraction(int(col == k + 3)) for k in range(3)]
        q, p = canonical_transform(x, y)
        assert list(q) + list(p) == [J[row][col] for row in range(6)]


def test_reduced_energy_matches_full_energy():
    x, y = (0.9, 0.2, -0.5), (0.3, -0.4, 0.1)
    q, p = canonical_transform(x, y)
    # the reduced Hamiltonian drops the free total-momentum term
    expected = h_full_eval(x, y) - 1.5 * p[2] ** 2
    assert abs(h_reg_eval(q[0], q[1], p[0], p[1]) - expected) < 1e-12


def test_cell_guard():
    assert in_cell(math.pi / 3, math.pi / 3)
    assert not in_cell(2.0, 2.0)
    with pytest.raises(DomainError):
        h_reg_eval(2.0, 2.0, 0.0, 0.0)


def test_printed_truncation_coefficients_exact():
    pot = taylor_truncate(4).potential()
    assert pot.terms[(2, 0, 0, 0)] == FE(Fraction(4, 3))
    assert pot.terms[(2, 1, 0, 0)] == SQRT3 * FE(Fraction(4, 9))
    assert pot.terms[(4, 0, 0, 0)] == FE(Fraction(4, 9))
    assert pot.terms[(3, 1, 0, 0)] == FE(Fraction(8, 9))


def test_truncation_has_no_linear_or_constant_part():
    pot = taylor_truncate(4).potential()
    for exps in ((0, 0, 0, 0), (1, 0, 0, 0), (0, 1, 0, 0)):
        assert exps not in pot.terms


def test_truncation_swap_symmetry():
    assert taylor_truncate(3).poly.swap_symmetric()
    assert taylor_truncate(4).poly.swap_symmetric()


def test_diagonal_reduction_both_routes():
    for order, want in (
            (3, Poly([FE(0), FE(-4), SQRT3 * FE(Fraction(-4, 3))])),
            (4, Poly([FE(0), FE(-4), SQRT3 * FE(Fraction(-4, 3)), FE(-8)]))):
        th = taylor_truncate(order)
        assert diagonal_reduce(th) == want
        assert diagonal_reduce_via_energy(th) == want


def test_truncated_force_matches_transcendental_force():
    """g(q - pi/3) from the quartic truncation approximates
    cot q + cot 2q to the expected order near the equilibrium."""
    g = diagonal_reduce(taylor_truncate(4))
    coeffs = [c.to_complex().real for c in g.coeffs]
    for dq in (1e-2, -1e-2, 3e-3):
        acc = 0.0
        for c in reversed(coeffs):
            acc = acc * dq + c
        exact = qddot_exact(math.pi / 3 + dq)
        assert abs(acc - exact) < 30 * abs(dq) ** 4


def test_vector_field_is_hamiltonian():
    th = taylor_truncate(3)
    q1d, q2d, p1d, p2d = hamiltonian_vector_field(th)
    h = th.poly
    assert q1d == h.derivative("p1")
    assert p1d == -h.derivative("q1")
    # kinetic part gives qdot1 = 2 p1 - p2
    assert q1d.terms[(0, 0, 1, 0)] == FE(2)
    assert q1d.terms[(0, 0, 0, 1)] == FE(-1)


def test_diagonal_potential_energy_relation():
    """U' = -2 g so that qdot^2 = h - U is conserved along qddot = g."""
    for order in (3, 4):
        th = taylor_truncate(order)
        u = diagonal_potential(th)
        g = diagonal_reduce(th)
        assert u.derivative() == g.scale(FE(-2))
