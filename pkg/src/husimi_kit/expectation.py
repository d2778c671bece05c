"""Expectation values three ways, with convergence and boundedness probes.

* trace_direct: Tr(rho A), the Hilbert-space oracle.
* expectation_wigner: integral of X_A W over the grid (exact for
  Hilbert-Schmidt pairs up to quadrature).  Refused when the operator's
  Weyl-symbol family fails to converge under basis refinement (the
  delta-like case, e.g. parity): the symbol then has no grid-resolvable
  limit and the quadrature at fixed resolution is untrustworthy.
* expectation_husimi_series: the absolutely convergent alternative,

      Tr(rho A) = sum_n (-1)^n/n! integral (d+^n d-^n H_A) Q,

  which converges for polynomial-bounded A even when the contravariant
  symbol of A fails to exist pointwise.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .continuation import diagonal_derivative_grid
from .errors import ResolutionRefusal, ValidationError
from .fock import FockOperator, PhasePoint
from .symbols import (GridSpec, SeriesResult, classify_series, husimi_function,
                      weyl_symbol)

_REFUSAL_THRESHOLD = 0.01
_PROBE_WINDOW = 0.5


def trace_direct(rho: FockOperator, A: FockOperator) -> complex:
    """Tr(rho A) by matrix product and diagonal sum."""
    if rho.dim != A.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {A.dim}")
    return complex(np.sum(rho.matrix * A.matrix.T))


def weyl_family_instability(A: FockOperator, spec: GridSpec,
                            probe_n=64) -> float | None:
    """How much A's (smoothly windowed) Weyl symbol moves when the basis is
    refined 2x, weighted by where a unit Gaussian of phase-space mass at
    the grid centre would look; None when A carries no family rule.

    Delta-like families (parity) grow without bound and score O(1);
    operators with a pointwise-convergent symbol score ~0.
    """
    if A.family is None:
        return None
    probe = GridSpec(spec.x_min, spec.x_max, probe_n,
                     spec.p_min, spec.p_max, probe_n)
    coarse = weyl_symbol(A, probe, ny=768, index_window=_PROBE_WINDOW)
    fine_op = FockOperator(A.family(2 * A.dim))
    fine = weyl_symbol(fine_op, probe, ny=768, index_window=_PROBE_WINDOW)
    X, P = probe.meshgrid()
    x0 = (probe.x_min + probe.x_max) / 2
    p0 = (probe.p_min + probe.p_max) / 2
    w = np.exp(-((X - x0) ** 2 + (P - p0) ** 2) / 2.0)
    num = float(np.abs((fine.values - coarse.values) * w).max())
    den = float(np.abs(coarse.values * w).max())
    return num / max(den, 1.0)


def expectation_wigner(rho: FockOperator, A: FockOperator,
                       spec: GridSpec | None = None, *, ny=1024,
                       stability_check=True) -> complex:
    """integral dx dp X_A(x,p) W(x,p) with W = X_rho / (2 pi).

    Raises ResolutionRefusal when the symbol family's basis-refinement
    instability exceeds 1%.
    """
    if rho.dim != A.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {A.dim}")
    spec = spec or GridSpec()
    if stability_check:
        instab = weyl_family_instability(A, spec)
        if instab is not None and instab > _REFUSAL_THRESHOLD:
            raise ResolutionRefusal(
                f"Weyl symbol family is delta-like: relative change "
                f"{instab:.2%} under 2x basis refinement (> 1%); use the "
                "Husimi series instead", instability=instab)
    XA = weyl_symbol(A, spec, ny=ny)
    W = weyl_symbol(rho, spec, ny=ny)
    cell = spec.dx * spec.dp
    val = complex(np.sum(XA.values * W.values) * cell / (2.0 * np.pi))
    return val


def _grid_tail_mass(Q, spec: GridSpec, band=1.0):
    """Husimi mass sitting within ``band`` phase-space units of the edge."""
    xs = spec.x_coords()
    ps = spec.p_coords()
    edge_x = (xs < spec.x_min + band) | (xs > spec.x_max - spec.dx - band)
    edge_p = (ps < spec.p_min + band) | (ps > spec.p_max - spec.dp - band)
    mask = edge_x[:, None] | edge_p[None, :]
    return float(Q[mask].sum() * spec.dx * spec.dp)


def expectation_husimi_series(rho: FockOperator, A: FockOperator, n_max,
                              tol=1e-6, spec: GridSpec | None = None) -> SeriesResult:
    """Partial sums of sum_n (-1)^n/n! integral (d+^n d-^n H_A) Q.

    Convergence requires two consecutive sub-tolerance terms (an
    alternating series can have one accidentally small term).  The grid
    must hold Q's mass away from the edge (tail mass < 1e-8).
    """
    if rho.dim != A.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {A.dim}")
    spec = spec or GridSpec(-9.0, 9.0, 128, -9.0, 9.0, 128)
    Qg = husimi_function(rho, spec)
    tail = _grid_tail_mass(Qg.values, spec)
    if tail > 1e-8:
        raise ValidationError(
            f"Husimi tail mass {tail:.2e} near the grid edge exceeds 1e-8; "
            "enlarge the grid")
    fields = diagonal_derivative_grid(A, spec.z_flat(), n_max)
    cell = spec.dx * spec.dp
    q = Qg.values.ravel()
    terms = [((-1) ** n / math.factorial(n)) * complex(np.sum(fields[n] * q)) * cell
             for n in range(n_max + 1)]
    return classify_series(terms, tol)


# ---------------------------------------------------------------------------
# Polynomial-boundedness probes

@dataclass(frozen=True)
class BoundProbeReport:
    """Empirical K (1 + x^2 + p^2)^N envelopes for ||A phi_xp|| and
    ||A^dag phi_xp||, plus the growth of low-order symbol derivatives."""

    radii: tuple
    max_norm: np.ndarray        # per radius, ||A phi||
    max_norm_adjoint: np.ndarray
    K: float
    N: int
    K_adjoint: float
    N_adjoint: int
    fit_residual: float
    fit_residual_adjoint: float
    derivative_growth: dict = field(default_factory=dict)

    def envelope(self, point: PhasePoint) -> float:
        return self.K * (1.0 + point.radius_sq) ** self.N

    def envelope_adjoint(self, point: PhasePoint) -> float:
        return self.K_adjoint * (1.0 + point.radius_sq) ** self.N_adjoint


def _fit_envelope(radii, vals, n_cap=8):
    """Smallest integer N >= 0 whose normalised ratios stop growing at the
    outer radii (the asymptotic trend is what certifies domination); K is
    the max sampled ratio with a 5% sampling margin so the envelope also
    dominates between the sampled circles."""
    u = np.log1p(np.asarray(radii, float) ** 2)
    logv = np.log(np.maximum(vals, 1e-300))
    tail = slice(max(0, len(u) - 3), None)
    for N in range(n_cap + 1):
        resid = logv - N * u
        slope = np.polyfit(u[tail], resid[tail], 1)[0] if len(u) > 2 else 0.0
        if slope <= 0.05:
            K = float(1.05 * np.exp(resid.max()))
            lsq = float(np.sqrt(np.mean((resid - resid.mean()) ** 2)))
            return K, N, lsq
    resid = logv - n_cap * u
    return float(1.05 * np.exp(resid.max())), n_cap, float(np.std(resid))


def bound_probe(A: FockOperator, radii=(0.5, 1.0, 2.0, 3.0, 4.0, 5.0),
                samples_per_radius=16) -> BoundProbeReport:
    """Sample ||A phi_xp|| and ||A^dag phi_xp|| on circles and fit the
    polynomial-boundedness envelopes; always returns a report."""
    from .backend import coherent_amplitudes
    from .continuation import derivative_table

    max_n = np.empty(len(radii))
    max_nd = np.empty(len(radii))
    for i, r in enumerate(radii):
        ang = 2 * np.pi * np.arange(samples_per_radius) / samples_per_radius
        z = (r / math.sqrt(2.0)) * (np.cos(ang) + 1j * np.sin(ang))
        C = coherent_amplitudes(z, A.dim)
        max_n[i] = np.linalg.norm(C @ A.matrix.T, axis=1).max()
        max_nd[i] = np.linalg.norm(C @ A.matrix.conj(), axis=1).max()

    K, N, res = _fit_envelope(radii, max_n)
    Kd, Nd, resd = _fit_envelope(radii, max_nd)

    # growth of |dx^m dp^n H_A| for m + n <= 4 along the sampled radii
    growth = {}
    for r in radii[:: max(1, len(radii) // 3)]:
        table = derivative_table(A, PhasePoint(r, 0.0), max_order=4)
        for m in range(5):
            for n in range(5 - m):
                d = _xp_derivative(table.coeffs, m, n)
                growth.setdefault((m, n), []).append((r, abs(d)))
    return BoundProbeReport(tuple(radii), max_n, max_nd, K, N, Kd, Nd,
                            res, resd, growth)


def _xp_derivative(coeffs, m, n):
    """dx^m dp^n from the z+-/z- table: dx = (d+ + d-)/sqrt(2),
    dp = i (d+ - d-)/sqrt(2)."""
    total = 0.0 + 0.0j
    for a in range(m + 1):
        for b in range(n + 1):
            plus_order = a + b
            minus_order = (m - a) + (n - b)
            if plus_order >= coeffs.shape[0] or minus_order >= coeffs.shape[1]:
                return np.nan
            w = (math.comb(m, a) * math.comb(n, b)
                 * (1j) ** n * (-1) ** (n - b))
            total += w * coeffs[plus_order, minus_order]
    return total / (2.0 ** ((m + n) / 2.0))
