import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_hermitian
from husimi_kit import (ComplexPhasePoint, FockOperator, PhasePoint,
                        build_ladder, build_number, build_parity,
                        cauchy_riemann_residual, coherent_state,
                        continue_symbol, derivative_table,
                        diagonal_derivative_grid, displaced_number_state,
                        husimi_symbol, lemma_b_check, plus_derivative_grid)
from husimi_kit.errors import OverlapUnderflowError, UnderResolvedError

coord = st.floats(min_value=-2.0, max_value=2.0)


# ---------------------------------------------------------------------------
# complex phase points

@settings(max_examples=80, deadline=None)
@given(coord, coord, coord, coord)
def test_quadruple_reconstruction(xr, xi, pr, pi):
    z = ComplexPhasePoint(complex(xr, xi), complex(pr, pi))
    x_back = (z.x_plus + z.x_minus) / 2 + 0.5j * (z.p_plus - z.p_minus)
    p_back = (z.p_plus + z.p_minus) / 2 + 0.5j * (z.x_minus - z.x_plus)
    assert abs(x_back - z.x) < 1e-14
    assert abs(p_back - z.p) < 1e-14


def test_real_section_iff_points_coincide():
    zr = ComplexPhasePoint(1.2 + 0j, -0.4 + 0j)
    assert zr.is_real
    assert zr.x_plus == zr.x_minus and zr.p_plus == zr.p_minus
    zc = ComplexPhasePoint(1.2 + 0.1j, -0.4 + 0j)
    assert zc.x_plus != zc.x_minus or zc.p_plus != zc.p_minus


def test_zpm_are_the_complex_combinations():
    z = ComplexPhasePoint(0.3 + 0.7j, -1.1 + 0.2j)
    assert abs(z.z_plus - (z.x + 1j * z.p) / math.sqrt(2)) < 1e-15
    assert abs(z.z_minus - (z.x - 1j * z.p) / math.sqrt(2)) < 1e-15


def test_from_plus_minus_roundtrip():
    minus, plus = PhasePoint(0.2, -0.5), PhasePoint(1.0, 0.3)
    z = ComplexPhasePoint.from_plus_minus(minus, plus)
    assert abs(z.x_minus - minus.x) < 1e-15
    assert abs(z.p_minus - minus.p) < 1e-15
    assert abs(z.x_plus - plus.x) < 1e-15
    assert abs(z.p_plus - plus.p) < 1e-15


# ---------------------------------------------------------------------------
# continuation

def test_continue_symbol_real_section(rng):
    A = random_hermitian(rng, 20)
    pt = PhasePoint(0.8, -0.6)
    z = ComplexPhasePoint.from_real(pt)
    assert abs(continue_symbol(A, z) - husimi_symbol(A, pt)) < 1e-10


def test_continue_symbol_number_operator(rng):
    N = build_number(48)
    for _ in range(5):
        z = ComplexPhasePoint(complex(*rng.uniform(-1, 1, 2)),
                              complex(*rng.uniform(-1, 1, 2)))
        expected = z.z_plus * z.z_minus
        assert abs(continue_symbol(N, z) - expected) < 1e-9


def test_continue_symbol_identity():
    I = FockOperator.identity(32)
    for z in (ComplexPhasePoint(0.5 + 0.3j, 0.1 - 0.2j),
              ComplexPhasePoint(-1.0 + 0.0j, 0.7 + 0.4j)):
        assert abs(continue_symbol(I, z) - 1.0) < 1e-12


def test_continue_symbol_overlap_underflow():
    N = build_number(16)
    z = ComplexPhasePoint(40.0 + 0j, 40j)  # plus/minus points 80 units apart
    with pytest.raises(OverlapUnderflowError):
        continue_symbol(N, z)


# ---------------------------------------------------------------------------
# Cauchy-Riemann residuals

def test_cr_residual_number_real_point():
    N = build_number(32)
    r1, r2 = cauchy_riemann_residual(N, ComplexPhasePoint(1.0 + 0j, 1.0 + 0j),
                                     1e-3)
    assert r1 < 1e-5 and r2 < 1e-5


def test_cr_residual_parity_origin():
    V = build_parity(32)
    r1, r2 = cauchy_riemann_residual(V, ComplexPhasePoint(0j, 0j), 1e-3)
    assert r1 < 1e-5 and r2 < 1e-5


def test_cr_residual_second_order(rng):
    # residuals shrink ~100x when h -> h/10 (second-order central stencils)
    A = random_hermitian(rng, 16, unit_norm=False)
    for _ in range(4):
        pt = ComplexPhasePoint(complex(rng.uniform(-1, 1), 0),
                               complex(rng.uniform(-1, 1), 0))
        ra = cauchy_riemann_residual(A, pt, 1e-3)
        rb = cauchy_riemann_residual(A, pt, 1e-4)
        assert max(ra) < 1e-4
        for a, b in zip(ra, rb):
            if b > 1e-13:  # above roundoff, check the order
                order = math.log10(a / b)
                assert order > 1.8


def test_cr_residual_rejects_bad_step():
    N = build_number(8)
    with pytest.raises(ValueError):
        cauchy_riemann_residual(N, ComplexPhasePoint(0j, 0j), 1.0)


# ---------------------------------------------------------------------------
# derivative tables

def test_table_number_operator():
    N = build_number(32)
    t = derivative_table(N, PhasePoint(0.7, -0.3), max_order=5)
    z0 = (0.7 - 0.3j) / math.sqrt(2)
    assert abs(t.coeffs[0, 0] - abs(z0) ** 2) < 1e-10
    assert abs(t.coeffs[1, 1] - 1.0) < 1e-8
    assert abs(t.coeffs[1, 0] - np.conj(z0)) < 1e-9
    assert abs(t.coeffs[0, 1] - z0) < 1e-9
    high = max(abs(t.coeffs[m, n]) for m in range(6) for n in range(6)
               if m + n > 2)
    assert high < 1e-8


def test_table_identity():
    t = derivative_table(FockOperator.identity(24), PhasePoint(0.3, 0.4), 4)
    assert abs(t.coeffs[0, 0] - 1.0) < 1e-10
    rest = np.abs(t.coeffs).copy()
    rest[0, 0] = 0.0
    assert rest.max() < 1e-10


def test_table_pure_orders_match_matrix_elements(rng):
    # d-^n H_A = sqrt(n!) <phi_{n;xp}| A phi_xp>  (real-section identity)
    A = random_hermitian(rng, 24, unit_norm=False)
    pt = PhasePoint(0.5, 0.2)
    t = derivative_table(A, pt, max_order=6)
    phi = coherent_state(pt, 24)
    for n in range(7):
        un = displaced_number_state(n, pt, 24)
        oracle = math.sqrt(math.factorial(n)) * np.vdot(un.coeffs,
                                                        A.matrix @ phi.coeffs)
        assert abs(t.coeffs[0, n] - oracle) < 1e-8


def test_table_hermitian_symmetry(rng):
    A = random_hermitian(rng, 20)
    t = derivative_table(A, PhasePoint(-0.4, 0.9), max_order=6)
    assert t.hermitian_defect() < 1e-8


def test_table_radius_independence(rng):
    # analyticity certificate: the two extractions must imply the same
    # Taylor data; compare coefficients normalised at the larger radius
    # (raw high-order coefficients sit on an r^-(m+n) noise floor)
    A = random_hermitian(rng, 20)
    t1 = derivative_table(A, PhasePoint(0.4, 0.1), 8, radius=0.3)
    t2 = derivative_table(A, PhasePoint(0.4, 0.1), 8, radius=0.6)
    orders = np.add.outer(np.arange(9), np.arange(9))
    fact = np.array([math.factorial(n) for n in range(9)], dtype=float)
    scale = 0.6 ** orders / np.outer(fact, fact)
    assert (np.abs(t1.coeffs - t2.coeffs) * scale).max() < 1e-7


def test_table_under_resolved():
    # radius 2 on parity: Taylor terms (2 r^2)^k/k! peak far beyond the
    # retained orders, so the Nyquist residual check must fire
    V = build_parity(48)
    with pytest.raises(UnderResolvedError):
        derivative_table(V, PhasePoint(0, 0), max_order=2, radius=2.0)


def test_table_debug_dump():
    t = derivative_table(build_number(16), PhasePoint(0, 0), 2)
    text = t.to_text()
    assert "max_order=2" in text
    assert len(text.strip().split("\n")) == 1 + 9


# ---------------------------------------------------------------------------
# Lemma b

def test_lemma_b_n0(rng):
    A = random_hermitian(rng, 20)
    lhs, rhs, diff = lemma_b_check(A, 0, PhasePoint(0.2, 0.3),
                                   PhasePoint(-0.5, 0.1))
    assert diff < 1e-10


def test_lemma_b_real_point_pure_orders(rng):
    # coincident points: LHS reduces to the pure-derivative matrix element
    A = random_hermitian(rng, 24, unit_norm=False)
    pt = PhasePoint(0.6, -0.2)
    for n in range(5):
        lhs, rhs, diff = lemma_b_check(A, n, pt, pt)
        assert diff < 1e-8


def test_lemma_b_lowering_operator_hand_value():
    # A = a, n = 1, minus at the origin, plus at (1, 0): both sides equal
    # z_+^2 = 1/2 (hand computation from the coherent eigenvalue property)
    a, _ = build_ladder(32)
    lhs, rhs, diff = lemma_b_check(a, 1, PhasePoint(0, 0), PhasePoint(1, 0))
    assert abs(lhs - 0.5) < 1e-10
    assert diff < 1e-8


def test_lemma_b_displaced_pairs(rng):
    A = random_hermitian(rng, 24)
    for _ in range(4):
        minus = PhasePoint(*rng.uniform(-0.8, 0.8, 2))
        plus = PhasePoint(*rng.uniform(-0.8, 0.8, 2))
        for n in (1, 3, 5):
            _, _, diff = lemma_b_check(A, n, minus, plus)
            assert diff < 1e-8


# ---------------------------------------------------------------------------
# grid evaluators cross-check the torus tables (dual route)

def test_plus_derivative_grid_matches_table(rng):
    H = random_hermitian(rng, 24, unit_norm=False)
    pts = [PhasePoint(0.5, -0.3), PhasePoint(-1.0, 0.8)]
    z = np.array([p.z for p in pts])
    fields = plus_derivative_grid(H, z, 4)
    for i, pt in enumerate(pts):
        t = derivative_table(H, pt, max_order=4)
        for n in range(5):
            assert abs(fields[n][i] - t.coeffs[n, 0]) < 1e-8


def test_diagonal_derivative_grid_matches_table(rng):
    A = random_hermitian(rng, 24, unit_norm=False)
    pts = [PhasePoint(0.4, 0.4), PhasePoint(-0.7, 0.1)]
    z = np.array([p.z for p in pts])
    fields = diagonal_derivative_grid(A, z, 4)
    for i, pt in enumerate(pts):
        t = derivative_table(A, pt, max_order=4)
        for n in range(5):
            assert abs(fields[n][i] - t.coeffs[n, n]) < 1e-7 * max(
                1.0, abs(t.coeffs[n, n]))


def test_diagonal_grid_parity_closed_form():
    # d+^n d-^n of exp(-2 z+ z-) at the origin is n! (-2)^n
    V = build_parity(32)
    fields = diagonal_derivative_grid(V, np.array([0.0 + 0.0j]), 6)
    for n in range(7):
        expected = math.factorial(n) * (-2.0) ** n
        assert abs(fields[n][0] - expected) < 1e-9 * max(1, abs(expected))
