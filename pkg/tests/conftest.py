import numpy as np
import pytest

from husimi_kit import FockOperator, PhasePoint, coherent_state


@pytest.fixture
def rng():
    return np.random.default_rng(20250809)


def random_hermitian(rng, dim, unit_norm=True):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (m + m.conj().T) / 2.0
    if unit_norm:
        h = h / np.linalg.norm(h, 2)
    return FockOperator(h, hermitian=True)


def random_operator(rng, dim, unit_norm=True):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    if unit_norm:
        m = m / np.linalg.norm(m, 2)
    return FockOperator(m)


def coherent_projector(x, p, dim):
    """Normalised projector onto the truncated coherent state."""
    c = coherent_state(PhasePoint(x, p), dim).coeffs
    c = c / np.linalg.norm(c)
    return FockOperator(np.outer(c, c.conj()), hermitian=True)


def random_density(rng, dim, rank=3):
    """Random mixed state: convex mix of random pure states."""
    w = rng.uniform(0.2, 1.0, rank)
    w /= w.sum()
    rho = np.zeros((dim, dim), dtype=complex)
    for wk in w:
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        v = v * np.exp(-0.6 * np.arange(dim))  # keep the state well inside
        v /= np.linalg.norm(v)
        rho += wk * np.outer(v, v.conj())
    rho = (rho + rho.conj().T) / 2
    return FockOperator(rho / np.trace(rho).real, hermitian=True)
