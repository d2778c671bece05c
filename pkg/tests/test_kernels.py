"""Compiled and pure-Python kernels must be interchangeable."""

import numpy as np
import pytest

from husimi_kit import _kernels_py

compiled = pytest.importorskip("husimi_kit._kernels",
                               reason="compiled kernels not built")


def test_backends_agree_hermite(rng):
    x = rng.uniform(-25, 25, 4096)
    a = _kernels_py.hermite_functions(x, 127)
    b = compiled.hermite_functions(x, 127)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-13)


def test_backends_agree_coherent(rng):
    z = (rng.uniform(-8, 8, 2048) + 1j * rng.uniform(-8, 8, 2048)) / np.sqrt(2)
    a = _kernels_py.coherent_amplitudes(z, 96)
    b = compiled.coherent_amplitudes(z, 96)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-13)


def test_hermite_shape_preserved():
    x = np.zeros((3, 5))
    out = compiled.hermite_functions(x, 4)
    assert out.shape == (5, 3, 5)


def test_hermite_l2_norms():
    # quadrature check: the recurrence stays normalised up to high order
    x = np.linspace(-30, 30, 16384)
    h = compiled.hermite_functions(x, 200)
    norms = np.trapezoid(h ** 2, x, axis=1)
    np.testing.assert_allclose(norms, 1.0, atol=1e-10)


def test_coherent_amplitudes_formula():
    z = 0.7 - 0.3j
    c = compiled.coherent_amplitudes(np.array([z]), 12)[0]
    import math
    expected = [np.exp(-abs(z) ** 2 / 2) * z ** n / math.sqrt(math.factorial(n))
                for n in range(12)]
    np.testing.assert_allclose(c, expected, atol=1e-15)


def test_coherent_amplitudes_vacuum():
    c = compiled.coherent_amplitudes(np.array([0.0 + 0.0j]), 6)[0]
    np.testing.assert_array_equal(c, np.eye(6)[0].astype(complex))
