import math

import numpy as np
import pytest

from conftest import coherent_projector, random_hermitian
from husimi_kit import (FockOperator, GridSpec, PhasePoint, TruncationPolicy,
                        anti_husimi_partial_sums, build_ladder, build_number,
                        build_parity, build_position, gaussian_smooth,
                        husimi_function, husimi_symbol, husimi_symbol_grid,
                        weyl_symbol)
from husimi_kit.errors import (AliasingError, QuadratureWindowError,
                               TruncationError, ValidationError)

SMALL_GRID = GridSpec(-6.0, 6.0, 96, -6.0, 6.0, 96)


# ---------------------------------------------------------------------------
# Husimi symbol and function

def test_husimi_identity_is_one(rng):
    I = FockOperator.identity(24)
    for _ in range(5):
        pt = PhasePoint(*rng.uniform(-2, 2, 2))
        assert abs(husimi_symbol(I, pt) - 1.0) < 1e-12


def test_husimi_number_operator():
    N = build_number(64)
    for pt in (PhasePoint(1.0, 0.5), PhasePoint(-2.0, 1.0), PhasePoint(0, 0)):
        assert abs(husimi_symbol(N, pt) - pt.radius_sq / 2.0) < 1e-9


def test_husimi_parity_gaussian():
    # <phi_a|phi_{-a}> = e^{-2|a|^2} via the overlap closed form
    V = build_parity(64)
    for pt in (PhasePoint(1.0, 0.5), PhasePoint(-1.5, 0.2)):
        assert abs(husimi_symbol(V, pt) - math.exp(-pt.radius_sq)) < 1e-9


def test_husimi_policy_gate():
    N = build_number(16)
    with pytest.raises(TruncationError):
        husimi_symbol(N, PhasePoint(4.0, 4.0), policy=TruncationPolicy())


def test_husimi_adjoint_covariance(rng):
    m = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
    A = FockOperator(m)
    for _ in range(5):
        pt = PhasePoint(*rng.uniform(-1.5, 1.5, 2))
        lhs = husimi_symbol(A.adjoint(), pt)
        rhs = np.conj(husimi_symbol(A, pt))
        assert abs(lhs - rhs) < 1e-12


def test_husimi_function_vacuum_closed_form():
    rho = coherent_projector(0, 0, 32)
    grid = husimi_function(rho, SMALL_GRID)
    X, P = SMALL_GRID.meshgrid()
    expected = np.exp(-(X ** 2 + P ** 2) / 2.0) / (2 * math.pi)
    for idx in [(0, 0), (48, 48), (20, 70), (90, 5), (48, 90)]:
        assert abs(grid.values[idx] - expected[idx]) < 1e-12


def test_husimi_function_maximally_mixed():
    rho = FockOperator(np.eye(2, dtype=complex) / 2.0, hermitian=True)
    grid = husimi_function(rho, SMALL_GRID)
    # direct quadratic form at the origin: (|c_0|^2 + |c_1|^2)/2 = 1/2
    assert abs(grid.values[48, 48] - 0.5 / (2 * math.pi)) < 1e-12


def test_husimi_function_bounds(rng):
    from conftest import random_density
    rho = random_density(rng, 20)
    grid = husimi_function(rho, GridSpec(-8, 8, 128, -8, 8, 128))
    assert grid.values.min() >= -1e-12
    assert grid.values.max() <= 1 / (2 * math.pi) + 1e-9
    assert abs(grid.integrate().real - 1.0) < 1e-6


def test_husimi_function_rejects_invalid():
    bad_trace = FockOperator(np.eye(4, dtype=complex))
    with pytest.raises(ValidationError, match="trace"):
        husimi_function(bad_trace, SMALL_GRID)
    m = np.diag([1.5, -0.5, 0, 0]).astype(complex)
    with pytest.raises(ValidationError, match="eigenvalue"):
        husimi_function(FockOperator(m), SMALL_GRID)


# ---------------------------------------------------------------------------
# Weyl symbol

def test_weyl_smooth_state_closed_form():
    # Weyl transform of a coherent projector: 2 exp(-(x-x0)^2 - (p-p0)^2)
    rho = coherent_projector(1.0, -0.5, 48)
    for pt in (PhasePoint(1.0, -0.5), PhasePoint(0.0, 0.0), PhasePoint(2.0, 1.0)):
        val = weyl_symbol(rho, pt)
        expected = 2.0 * math.exp(-(pt.x - 1.0) ** 2 - (pt.p + 0.5) ** 2)
        assert abs(val - expected) < 1e-8


def test_weyl_identity_needs_index_window():
    # sharp truncation: the exact symbol of P_D at the origin is
    # 2*sum (-1)^n, i.e. 0 for even D, 2 for odd D -- never 1
    origin = PhasePoint(0, 0)
    assert abs(weyl_symbol(FockOperator.identity(32), origin)) < 1e-8
    assert abs(weyl_symbol(FockOperator.identity(33), origin) - 2.0) < 1e-8
    # the smooth basis window recovers the ideal symbol
    I = FockOperator.identity(128)
    for pt in (origin, PhasePoint(1, -1), PhasePoint(2, 3)):
        assert abs(weyl_symbol(I, pt, index_window=0.5) - 1.0) < 1e-8


def test_weyl_position_operator_windowed():
    X = build_position(128)
    for pt in (PhasePoint(0, 0), PhasePoint(1, -1), PhasePoint(2, 3)):
        assert abs(weyl_symbol(X, pt, index_window=0.5) - pt.x) < 1e-8


def test_weyl_window_error():
    N = build_number(32)
    with pytest.raises(QuadratureWindowError):
        weyl_symbol(N, PhasePoint(0, 0), y_halfwidth=3.0)


def test_weyl_parity_delta_normalisation():
    # the ideal symbol is pi delta(x) delta(p); on the truncated family the
    # windowed grid integral (1/pi) int X_V -> 1 and the peak grows with dim
    spec = GridSpec(-4.0, 4.0, 320, -4.0, 4.0, 320)
    peaks = []
    for dim in (32, 64):
        g = weyl_symbol(build_parity(dim), spec, index_window=0.5)
        integral = g.integrate().real / math.pi
        assert abs(integral - 1.0) < 0.02
        peaks.append(np.abs(g.values).max())
    assert peaks[1] > 1.5 * peaks[0]  # pointwise growth: delta-like


# ---------------------------------------------------------------------------
# Gaussian smoothing

def test_smooth_constant_interior():
    spec = GridSpec(-8, 8, 128, -8, 8, 128)
    ones = __import__("husimi_kit").PhaseGrid(spec, np.ones((128, 128)))
    sm = gaussian_smooth(ones)
    # zero padding erodes the edges; the interior must stay at 1
    inner = sm.values[56:72, 56:72]
    np.testing.assert_allclose(inner, 1.0, atol=1e-8)


def test_smooth_vacuum_wigner_matches_husimi():
    rho = coherent_projector(0, 0, 32)
    spec = GridSpec(-8, 8, 160, -8, 8, 160)
    smoothed = gaussian_smooth(weyl_symbol(rho, spec))
    direct = husimi_function(rho, spec)
    assert np.abs(smoothed.values / (2 * math.pi) - direct.values).max() < 1e-6


def test_smooth_parity_weyl_gives_husimi_gaussian():
    # the delta-like symbol smooths to exp(-x^2-p^2)
    spec = GridSpec(-6, 6, 384, -6, 6, 384)
    g = weyl_symbol(build_parity(48), spec)
    sm = gaussian_smooth(g)
    X, P = spec.meshgrid()
    assert np.abs(sm.values - np.exp(-X ** 2 - P ** 2)).max() <= 5e-3


def test_smooth_guards():
    spec = GridSpec(-8, 8, 24, -8, 8, 24)  # spacing 0.67 > 0.5
    grid = __import__("husimi_kit").PhaseGrid(spec, np.ones((24, 24)))
    with pytest.raises(AliasingError):
        gaussian_smooth(grid)
    fine = GridSpec(-8, 8, 128, -8, 8, 128)
    grid = __import__("husimi_kit").PhaseGrid(fine, np.ones((128, 128)))
    with pytest.raises(AliasingError):
        gaussian_smooth(grid, margin=3.0)


def test_smoothing_identity_random_operators(rng):
    # Eq-level identity: smoothing the exact Weyl grid of the finite matrix
    # reproduces the Husimi grid (small version; acceptance runs 20 ops)
    spec = GridSpec()
    for dim in (8, 16):
        A = random_hermitian(rng, dim)
        smoothed = gaussian_smooth(weyl_symbol(A, spec))
        direct = husimi_symbol_grid(A, spec)
        assert smoothed.sup_diff(direct) < 1e-5


def test_symbol_maps_linear(rng):
    A = random_hermitian(rng, 12)
    B = random_hermitian(rng, 12)
    alpha, beta = 0.7 - 0.2j, -1.3 + 0.4j
    combo = FockOperator(alpha * A.matrix + beta * B.matrix)
    pt = PhasePoint(0.9, -0.3)
    assert abs(husimi_symbol(combo, pt)
               - alpha * husimi_symbol(A, pt)
               - beta * husimi_symbol(B, pt)) < 1e-10
    assert abs(weyl_symbol(combo, pt)
               - alpha * weyl_symbol(A, pt)
               - beta * weyl_symbol(B, pt)) < 1e-10


# ---------------------------------------------------------------------------
# anti-Husimi partial sums

def test_anti_husimi_number_operator_terminates():
    N = build_number(32)
    pt = PhasePoint(1.1, -0.6)
    res = anti_husimi_partial_sums(N, pt, n_max=6, tol=1e-8)
    assert res.verdict == "converged"
    assert abs(res.value - (pt.radius_sq / 2.0 - 1.0)) < 1e-8
    assert res.term_magnitudes[2:].max() < 1e-8


def test_anti_husimi_identity():
    I = FockOperator.identity(24)
    res = anti_husimi_partial_sums(I, PhasePoint(0.4, 0.2), n_max=5, tol=1e-8)
    assert res.verdict == "converged"
    assert abs(res.value - 1.0) < 1e-9
    assert res.term_magnitudes[1:].max() < 1e-10


def test_anti_husimi_parity_diverges():
    V = build_parity(32)
    res = anti_husimi_partial_sums(V, PhasePoint(0, 0), n_max=8, tol=1e-8)
    assert res.verdict == "diverging"
    # term magnitudes are 2^n: geometric growth
    np.testing.assert_allclose(res.term_magnitudes[:6], 2.0 ** np.arange(6),
                               rtol=1e-8)


# ---------------------------------------------------------------------------
# PhaseGrid plumbing

def test_seriesresult_invariants():
    from husimi_kit import SeriesResult
    with pytest.raises(ValueError):
        SeriesResult(np.array([1.0]), np.array([1.0]), None, "converged", 1e-6)
    with pytest.raises(ValueError):
        SeriesResult(np.array([1.0]), np.array([1.0, 2.0]), None,
                     "inconclusive", 1e-6)


def test_grid_argmax_point():
    spec = GridSpec(-2, 2, 32, -2, 2, 32)
    vals = np.zeros((32, 32))
    vals[20, 12] = 3.0
    g = __import__("husimi_kit").PhaseGrid(spec, vals)
    pt = g.argmax_point()
    assert pt.x == spec.x_coords()[20]
    assert pt.p == spec.p_coords()[12]
