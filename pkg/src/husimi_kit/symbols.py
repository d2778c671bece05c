"""Weyl and Husimi symbols on phase-space grids.

The Husimi (covariant) symbol of A is the coherent-state quadratic form
H_A(x, p) = <phi_xp| A phi_xp>; the Husimi function of a density matrix is
Q = H_rho / (2 pi).  The Weyl symbol is the position-kernel transform

    X_A(x, p) = integral dy e^{i p y} <x - y/2| A |x + y/2>,

evaluated here by expanding the kernel in oscillator eigenfunctions and
quadrature over a finite y window.  The two are linked by the Gaussian
smoothing

    H_A = (1/pi) int dx' dp' exp[-(x-x')^2 - (p-p')^2] X_A,

implemented as an FFT convolution with zero padding.

Grid convention: a PhaseGrid samples x_j = x_min + j (x_max - x_min)/nx
for j < nx (the right edge is excluded, the periodic convention that makes
FFT-based convolution and spectral differentiation exact on the grid).

A note on truncation semantics: for an operator given as a finite matrix,
both symbols computed here are *exact* symbols of that matrix.  Sharply
truncated unbounded operators (number, position, ...) have Weyl symbols
with O(dim^(-1/4)) ringing that never converges pointwise to the ideal
symbol; passing ``index_window`` applies a smooth basis-index rolloff
(Riesz-type summation) under which the symbol of such a family does
converge.  The default (no window) keeps the exact finite-matrix symbol,
which is what the smoothing identity and the expectation quadratures
require.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .backend import coherent_amplitudes, hermite_functions
from .errors import (AliasingError, InvalidDimensionError, QuadratureWindowError,
                     ValidationError)
from .fock import FockOperator, PhasePoint, TruncationPolicy, coherent_state

_WINDOW_DECAY_TOL = 1e-10


@dataclass(frozen=True)
class GridSpec:
    """A uniform rectangular phase-space lattice request."""

    x_min: float = -8.0
    x_max: float = 8.0
    nx: int = 256
    p_min: float = -8.0
    p_max: float = 8.0
    np_: int = 256

    def __post_init__(self):
        if not (self.x_max > self.x_min and self.p_max > self.p_min):
            raise ValueError("grid extent must be increasing")
        if self.nx < 2 or self.np_ < 2:
            raise ValueError("grid needs at least 2 points per axis")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.nx

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / self.np_

    def x_coords(self):
        return self.x_min + self.dx * np.arange(self.nx)

    def p_coords(self):
        return self.p_min + self.dp * np.arange(self.np_)

    def meshgrid(self):
        return np.meshgrid(self.x_coords(), self.p_coords(), indexing="ij")

    def z_flat(self):
        X, P = self.meshgrid()
        return ((X + 1j * P) / math.sqrt(2.0)).ravel()


@dataclass(frozen=True)
class PhaseGrid:
    """Sampled symbol values on a GridSpec lattice (values[ix, ip])."""

    spec: GridSpec
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.spec.nx, self.spec.np_):
            raise ValueError(f"values shape {v.shape} does not match grid "
                             f"({self.spec.nx}, {self.spec.np_})")
        if not np.all(np.isfinite(v.real)) or not np.all(np.isfinite(v.imag)):
            raise ValueError("grid values must be finite")

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.values) or \
            float(np.abs(self.values.imag).max(initial=0.0)) == 0.0

    def integrate(self) -> complex:
        """Riemann sum times the cell area (exact for decaying samples)."""
        return complex(self.values.sum() * self.spec.dx * self.spec.dp)

    def argmax_point(self) -> PhasePoint:
        i, j = np.unravel_index(int(np.argmax(self.values.real)),
                                self.values.shape)
        return PhasePoint(float(self.spec.x_coords()[i]),
                          float(self.spec.p_coords()[j]))

    def sup_diff(self, other: "PhaseGrid") -> float:
        return float(np.abs(self.values - other.values).max())


@dataclass(frozen=True)
class SeriesResult:
    """Partial sums and convergence verdict for one of the infinite series."""

    partial_sums: np.ndarray
    term_magnitudes: np.ndarray
    tail_bound: float | None
    verdict: str  # converged | diverging | inconclusive
    requested_tol: float

    def __post_init__(self):
        if len(self.partial_sums) != len(self.term_magnitudes):
            raise ValueError("partial_sums and term_magnitudes lengths differ")
        if self.verdict not in ("converged", "diverging", "inconclusive"):
            raise ValueError(f"unknown verdict {self.verdict!r}")
        if self.verdict == "converged":
            if self.tail_bound is None or self.tail_bound > self.requested_tol:
                raise ValueError("converged verdict requires a tail bound "
                                 "within the requested tolerance")

    @property
    def value(self) -> complex:
        return complex(self.partial_sums[-1])

    @property
    def n_terms(self) -> int:
        return len(self.partial_sums)


def classify_series(terms, tol, growth_run=5):
    """Build a SeriesResult from raw complex terms.

    diverging: term magnitudes grow for ``growth_run`` consecutive orders,
    assessed on the raw sequence and on pairwise block maxima (isolated
    zeros of a genuinely growing sequence -- Laguerre zeros in the parity
    case -- must not mask the growth).  converged: the last two magnitudes
    are below ``tol`` and the tail estimate is below ``tol``.  Anything
    else is inconclusive.
    """
    terms = np.asarray(terms, dtype=complex)
    mags = np.abs(terms)
    sums = np.cumsum(terms)

    def has_growth_run(seq, run_len):
        run = 0
        for k in range(1, len(seq)):
            run = run + 1 if seq[k] > seq[k - 1] > 0 else 0
            if run >= run_len:
                return True
        return False

    blocks = [mags[i:i + 2].max() for i in range(0, len(mags) - 1, 2)]
    if has_growth_run(mags, growth_run) or has_growth_run(blocks, growth_run):
        return SeriesResult(sums, mags, None, "diverging", tol)

    verdict, bound = "inconclusive", None
    if len(mags) >= 2 and mags[-1] < tol and mags[-2] < tol:
        cauchy = len(sums) < 3 or abs(sums[-1] - sums[-3]) < 2 * tol
        recent = mags[-4:]
        ratios = [recent[i + 1] / recent[i]
                  for i in range(len(recent) - 1) if recent[i] > 0]
        rho = max(ratios) if ratios else 0.0
        if rho < 1.0 and mags[-1] > 0:
            # geometric tail estimate when the decay trend is clean
            bound = float(mags[-1] * rho / (1.0 - rho)) if rho > 0 else float(mags[-1])
        else:
            # terms at the noise floor: report the larger of the last two
            bound = float(max(mags[-1], mags[-2]))
        if cauchy and bound <= tol:
            verdict = "converged"
        else:
            bound = None if not cauchy else bound
    return SeriesResult(sums, mags, bound, verdict, tol)


# ---------------------------------------------------------------------------
# Husimi side

def husimi_symbol(A: FockOperator, point: PhasePoint,
                  policy: TruncationPolicy | None = None) -> complex:
    """H_A(x, p) = <phi_xp| A phi_xp> on the truncated basis."""
    phi = coherent_state(point, A.dim, policy=policy)
    return complex(np.vdot(phi.coeffs, A.matrix @ phi.coeffs))


def husimi_symbol_grid(A: FockOperator, spec: GridSpec) -> PhaseGrid:
    """H_A sampled on a grid (vectorised quadratic forms)."""
    C = coherent_amplitudes(spec.z_flat(), A.dim)
    vals = np.einsum("km,km->k", C.conj() @ A.matrix, C, optimize=True)
    return PhaseGrid(spec, vals.reshape(spec.nx, spec.np_))


def validate_density_matrix(rho: FockOperator, tol=1e-8):
    """Hermitian, unit trace, positive semidefinite (within ``tol``)."""
    m = rho.matrix
    herm = np.abs(m - m.conj().T).max()
    if herm > tol:
        raise ValidationError(f"density matrix not Hermitian: defect {herm:.2e}")
    tr = np.trace(m).real
    if abs(tr - 1.0) > tol:
        raise ValidationError(f"density matrix trace {tr:.10f} != 1")
    lo = np.linalg.eigvalsh((m + m.conj().T) / 2).min()
    if lo < -tol:
        raise ValidationError(f"density matrix has eigenvalue {lo:.2e} < 0")


def husimi_function(rho: FockOperator, spec: GridSpec | None = None) -> PhaseGrid:
    """Q = H_rho / (2 pi): real, in [0, 1/(2 pi)], integrates to <= 1."""
    spec = spec or GridSpec()
    validate_density_matrix(rho)
    grid = husimi_symbol_grid(rho, spec)
    return PhaseGrid(spec, grid.values.real / (2.0 * np.pi))


# ---------------------------------------------------------------------------
# Weyl side

def _windowed_matrix(A: FockOperator, index_window):
    if index_window is None:
        return A.matrix
    if not 0.0 < index_window <= 1.0:
        raise ValueError("index_window must be a fraction in (0, 1]")
    n = np.arange(A.dim)
    w = np.exp(-((n / (index_window * A.dim)) ** 8))
    return A.matrix * np.sqrt(np.outer(w, w))


def default_y_halfwidth(dim) -> float:
    """Window such that both oscillator-eigenfunction factors have decayed:
    the classical turning point of level dim is at sqrt(2 dim)."""
    return 2.0 * math.sqrt(2.0 * dim) + 6.0


def _weyl_kernel(mat, xs, y, x_block=32):
    """K[ix, iy] = sum_mn mat[m, n] psi_m(x - y/2) psi_n(x + y/2)."""
    dim = mat.shape[0]
    K = np.empty((xs.size, y.size), dtype=np.complex128)
    for lo in range(0, xs.size, x_block):
        blk = xs[lo:lo + x_block]
        um = hermite_functions(blk[:, None] - y[None, :] / 2.0, dim - 1)
        up = hermite_functions(blk[:, None] + y[None, :] / 2.0, dim - 1)
        Aup = np.tensordot(mat, up, axes=(1, 0))
        K[lo:lo + x_block] = np.einsum("mby,mby->by", um, Aup, optimize=True)
    return K


def _check_window_decay(K):
    peak = np.abs(K).max()
    edge = max(np.abs(K[:, 0]).max(), np.abs(K[:, -1]).max())
    if peak > 0 and edge > _WINDOW_DECAY_TOL * peak:
        raise QuadratureWindowError(
            f"position kernel has not decayed at the y-window edge "
            f"(edge/peak = {edge / peak:.2e} > {_WINDOW_DECAY_TOL:.0e}); "
            "enlarge y_halfwidth")


def weyl_symbol(A: FockOperator, target, *, ny=1024, y_halfwidth=None,
                index_window=None):
    """Weyl symbol of A at a point or on a grid.

    ``target`` is a PhasePoint (returns complex) or a GridSpec (returns a
    PhaseGrid).  The y integral uses ``ny`` uniform samples on
    [-y_halfwidth, y_halfwidth]; deterministic for fixed parameters.
    Raises QuadratureWindowError when the kernel fails to decay below
    1e-10 of its peak at the window edge.
    """
    if A.dim < 1:
        raise InvalidDimensionError("dim must be >= 1")
    L = y_halfwidth if y_halfwidth is not None else default_y_halfwidth(A.dim)
    y = np.linspace(-L, L, ny)
    dy = y[1] - y[0]
    mat = _windowed_matrix(A, index_window)

    if isinstance(target, PhasePoint):
        K = _weyl_kernel(mat, np.array([target.x]), y)
        _check_window_decay(K)
        return complex(np.sum(np.exp(1j * target.p * y) * K[0]) * dy)

    spec = target
    K = _weyl_kernel(mat, spec.x_coords(), y)
    _check_window_decay(K)
    E = np.exp(1j * np.outer(y, spec.p_coords()))
    return PhaseGrid(spec, (K @ E) * dy)


def gaussian_smooth(grid: PhaseGrid, margin=6.0) -> PhaseGrid:
    """Convolve with (1/pi) exp(-dx^2 - dp^2) by zero-padded FFT.

    The unit-width kernel must be resolved (spacing <= 0.5) and the
    zero-padding margin must cover at least 6 kernel widths so periodic
    wraparound lands on padding, not data.
    """
    spec = grid.spec
    hx, hp = spec.dx, spec.dp
    if hx > 0.5 or hp > 0.5:
        raise AliasingError(
            f"grid spacing ({hx:.3f}, {hp:.3f}) too coarse for the unit-width "
            "kernel; need <= 0.5")
    if margin < 6.0:
        raise AliasingError(f"padding margin {margin} kernel widths < 6; "
                            "wraparound would alias into the data")
    mx = int(math.ceil(margin / hx))
    mp = int(math.ceil(margin / hp))
    nx, np_ = spec.nx, spec.np_
    big = np.zeros((nx + 2 * mx, np_ + 2 * mp), dtype=np.complex128)
    big[mx:mx + nx, mp:mp + np_] = grid.values

    kx = (np.arange(big.shape[0]) - big.shape[0] // 2) * hx
    kp = (np.arange(big.shape[1]) - big.shape[1] // 2) * hp
    ker = np.exp(-kx[:, None] ** 2 - kp[None, :] ** 2) * (hx * hp / np.pi)
    out = np.fft.ifft2(np.fft.fft2(big) * np.fft.fft2(np.fft.ifftshift(ker)))
    out = out[mx:mx + nx, mp:mp + np_]
    if grid.is_real:
        out = out.real
    return PhaseGrid(spec, out)


def anti_husimi_partial_sums(A: FockOperator, point: PhasePoint, n_max,
                             tol=1e-8, radius=0.5) -> SeriesResult:
    """Partial sums of the contravariant-symbol series
    sum_n (-1)^n/n! d+^n d-^n H_A at a point.

    The mixed derivatives come from the holomorphic-continuation torus
    extraction.  Divergence is declared after 5 consecutive orders of
    term growth (the series for delta-like symbols grows geometrically or
    worse and never turns around).
    """
    from .continuation import derivative_table  # deferred: avoid module cycle
    table = derivative_table(A, point, max_order=n_max, radius=radius)
    terms = [(-1) ** n / math.factorial(n) * table.coeffs[n, n]
             for n in range(n_max + 1)]
    return classify_series(terms, tol)
