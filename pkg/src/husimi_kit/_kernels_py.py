"""Pure-numpy implementations of the hot kernels.

These are the reference implementations; ``husimi_kit._kernels`` is a
Cython twin with identical signatures and semantics, selected at import
time by :mod:`husimi_kit.backend`.  Both evaluate

* oscillator eigenfunctions by the normalised three-term recurrence
  psi_{n+1}(x) = sqrt(2/(n+1)) x psi_n(x) - sqrt(n/(n+1)) psi_{n-1}(x),
  psi_0(x) = pi^{-1/4} exp(-x^2/2), which is stable for all n because the
  Gaussian weight is carried inside the recurrence;
* coherent-state number amplitudes c_n(z) = exp(-|z|^2/2) z^n / sqrt(n!)
  by the cumulative product c_n = c_{n-1} z / sqrt(n).
"""

import numpy as np

BACKEND = "python"


def hermite_functions(x, nmax):
    """Oscillator eigenfunctions psi_0..psi_nmax at the points ``x``.

    Returns an array of shape ``(nmax + 1,) + x.shape``.
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty((nmax + 1,) + x.shape)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if nmax >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(1, nmax):
        out[n + 1] = np.sqrt(2.0 / (n + 1)) * x * out[n] \
            - np.sqrt(n / (n + 1.0)) * out[n - 1]
    return out


def coherent_amplitudes(z, dim):
    """Number-basis amplitudes of coherent states, one row per point.

    Returns ``C`` of shape ``(len(z), dim)`` with
    ``C[k, n] = exp(-|z_k|^2/2) z_k^n / sqrt(n!)``.
    """
    z = np.ascontiguousarray(z, dtype=np.complex128)
    C = np.empty((z.size, dim), dtype=np.complex128)
    C[:, 0] = 1.0
    for n in range(1, dim):
        C[:, n] = C[:, n - 1] * z * (n ** -0.5)
    C *= np.exp(-0.5 * np.abs(z) ** 2)[:, None]
    return C
