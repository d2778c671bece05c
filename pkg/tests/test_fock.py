import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from husimi_kit import (FockOperator, PhasePoint, StateVector, TruncationPolicy,
                        build_ladder, build_number, build_parity,
                        coherent_overlap_closed_form, coherent_state,
                        displaced_number_state, displacement_operator,
                        position_wavefunction)
from husimi_kit.errors import InvalidDimensionError, TruncationError

finite_coord = st.floats(min_value=-3.0, max_value=3.0)


# ---------------------------------------------------------------------------
# ladder and parity

def test_ladder_dim2_single_entry():
    a, _ = build_ladder(2)
    expected = np.zeros((2, 2))
    expected[0, 1] = 1.0
    np.testing.assert_array_equal(a.matrix, expected)


def test_number_operator_spectrum():
    a, ad = build_ladder(4)
    np.testing.assert_allclose((ad @ a).matrix, np.diag([0.0, 1, 2, 3]),
                               atol=0)


def test_commutator_truncation_artifact():
    # brute-force matrix multiply: [a, a^dag] = 1 except the corner -dim+1
    a, ad = build_ladder(16)
    comm = a.matrix @ ad.matrix - ad.matrix @ a.matrix
    expected = np.eye(16)
    expected[15, 15] = -15.0
    np.testing.assert_allclose(comm, expected, atol=1e-13)


def test_ladder_rejects_dim1():
    with pytest.raises(InvalidDimensionError):
        build_ladder(1)


def test_parity_small_dims():
    np.testing.assert_array_equal(build_parity(1).matrix, [[1.0]])
    np.testing.assert_array_equal(build_parity(3).matrix,
                                  np.diag([1.0, -1.0, 1.0]))


@pytest.mark.parametrize("dim", [1, 2, 7, 32])
def test_parity_involution_exact(dim):
    V = build_parity(dim)
    np.testing.assert_array_equal((V @ V).matrix, np.eye(dim))


def test_number_acts_diagonally():
    N = build_number(12)
    for n in range(11):
        e = np.zeros(12)
        e[n] = 1.0
        np.testing.assert_array_equal(N.matrix @ e, n * e)


# ---------------------------------------------------------------------------
# coherent and displaced states

def test_vacuum_coherent_state():
    v = coherent_state(PhasePoint(0, 0), 8)
    np.testing.assert_array_equal(v.coeffs, np.eye(8)[0].astype(complex))


def test_coherent_state_closed_form_z1():
    # (sqrt(2), 0) gives z = 1: components e^{-1/2}/sqrt(n!); cross-check
    # against the displacement-generator matrix exponential
    v = coherent_state(PhasePoint(math.sqrt(2.0), 0.0), 32)
    expected = np.array([math.exp(-0.5) / math.sqrt(math.factorial(n))
                         for n in range(32)])
    np.testing.assert_allclose(v.coeffs, expected, atol=1e-15)
    assert v.norm_deficiency < 1e-20
    via_expm = displacement_operator(PhasePoint(math.sqrt(2.0), 0.0), 32).matrix[:, 0]
    np.testing.assert_allclose(v.coeffs, via_expm, atol=1e-12)


def test_coherent_state_is_lowering_eigenvector():
    pt = PhasePoint(1.0, 1.0)
    v = coherent_state(pt, 32)
    a, _ = build_ladder(32)
    resid = a.matrix @ v.coeffs - pt.z * v.coeffs
    assert np.abs(resid[:24]).max() < 1e-10


def test_coherent_state_truncation_warning():
    with pytest.warns(UserWarning, match="norm deficiency"):
        coherent_state(PhasePoint(6.0, 6.0), 8)


def test_truncation_policy_enforced():
    policy = TruncationPolicy(target_norm_deficiency=1e-12)
    with pytest.raises(TruncationError) as exc:
        coherent_state(PhasePoint(3.0, 0.0), 12, policy=policy)
    assert exc.value.norm_deficiency > 1e-12


def test_displaced_number_state_n0_matches_coherent():
    pt = PhasePoint(0.8, -1.1)
    d0 = displaced_number_state(0, pt, 48)
    c = coherent_state(pt, 48)
    np.testing.assert_allclose(d0.coeffs, c.coeffs, atol=1e-10)


def test_displaced_number_state_identity_displacement():
    d = displaced_number_state(1, PhasePoint(0, 0), 8)
    np.testing.assert_allclose(d.coeffs, np.eye(8)[1], atol=1e-14)


def test_displaced_number_state_truncation_convergence():
    pt = PhasePoint(1.0, 0.0)
    v48 = displaced_number_state(1, pt, 48)
    v64 = displaced_number_state(1, pt, 64)
    assert np.abs(v48.coeffs[:32] - v64.coeffs[:32]).max() < 1e-10


def test_displaced_number_state_index_error():
    with pytest.raises(IndexError):
        displaced_number_state(8, PhasePoint(0, 0), 8)


# ---------------------------------------------------------------------------
# overlaps and wavefunctions

def test_overlap_identity_point():
    p = PhasePoint(0.0, 0.0)
    assert coherent_overlap_closed_form(p, p) == 1.0


def test_overlap_from_origin():
    # specialisation of the closed form with the minus point at the origin
    plus = PhasePoint(1.3, -0.4)
    val = coherent_overlap_closed_form(PhasePoint(0, 0), plus)
    assert abs(abs(val) - math.exp(-(1.3 ** 2 + 0.4 ** 2) / 4.0)) < 1e-15


def test_overlap_matches_truncated_inner_product(rng):
    for _ in range(10):
        m = PhasePoint(*rng.uniform(-2, 2, 2))
        p = PhasePoint(*rng.uniform(-2, 2, 2))
        brute = np.vdot(coherent_state(m, 64).coeffs,
                        coherent_state(p, 64).coeffs)
        assert abs(brute - coherent_overlap_closed_form(m, p)) < 1e-10


@settings(max_examples=60, deadline=None)
@given(finite_coord, finite_coord, finite_coord, finite_coord)
def test_overlap_conjugate_symmetry(xm, pm, xp, pp):
    a, b = PhasePoint(xm, pm), PhasePoint(xp, pp)
    lhs = coherent_overlap_closed_form(a, b)
    rhs = coherent_overlap_closed_form(b, a)
    assert abs(lhs - np.conj(rhs)) < 1e-14


def test_position_wavefunction_values():
    assert abs(position_wavefunction(0, 0.0) - math.pi ** -0.25) < 1e-15
    assert position_wavefunction(1, 0.0) == 0.0


def test_position_wavefunction_quadrature_norm():
    xs = np.linspace(-12, 12, 4096)
    vals = position_wavefunction(10, xs)
    norm = np.trapezoid(vals ** 2, xs)
    assert abs(norm - 1.0) < 1e-8


# ---------------------------------------------------------------------------
# resolution of identity

def test_coherent_resolution_of_identity():
    # (1/2pi) integral |phi><phi| reproduces e_n on a grid covering
    # |z|^2 <= dim/2
    from husimi_kit.backend import coherent_amplitudes
    dim = 12
    L, n = 8.0, 192  # covers |z|^2 <= dim/2 plus the Poisson tails of e_n
    h = 2 * L / n
    xs = -L + h * np.arange(n)
    X, P = np.meshgrid(xs, xs, indexing="ij")
    Z = ((X + 1j * P) / math.sqrt(2)).ravel()
    C = coherent_amplitudes(Z, dim)
    M = (C.conj().T @ C) * (h * h / (2 * math.pi))
    for k in range(6):
        e = np.zeros(dim)
        e[k] = 1.0
        assert np.abs(M @ e - e).max() < 1e-6


# ---------------------------------------------------------------------------
# container types

def test_operator_requires_square_finite():
    with pytest.raises(ValueError):
        FockOperator(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        FockOperator(np.array([[np.inf, 0], [0, 1]], dtype=complex))


def test_hermitian_flag_validated():
    m = np.array([[0.0, 1.0], [0.5, 0.0]], dtype=complex)
    with pytest.raises(ValueError, match="hermitian"):
        FockOperator(m, hermitian=True)
    assert FockOperator(m).hermitian is False


def test_adjoint_involution(rng):
    m = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    A = FockOperator(m)
    np.testing.assert_array_equal(A.adjoint().adjoint().matrix, A.matrix)


def test_operator_immutable():
    A = FockOperator.identity(3)
    with pytest.raises(AttributeError):
        A.dim = 5
    with pytest.raises(ValueError):
        A.matrix[0, 0] = 2.0


def test_state_vector_basics():
    v = StateVector.basis(2, 5)
    assert v.norm() == 1.0
    assert v.norm_deficiency == 0.0
    with pytest.raises(IndexError):
        StateVector.basis(5, 5)
