"""Operators and states in a truncated Fock (number) basis.

Conventions (hbar = 1, dimensionless x and p):

    a = (x + i p)/sqrt(2),   a^dag = (x - i p)/sqrt(2),
    z = (x + i p)/sqrt(2),   D_xp = exp(i(p x_op - x p_op)) = exp(z a^dag - z* a),

so a coherent state has number amplitudes exp(-|z|^2/2) z^n / sqrt(n!)
with no extra phase, and the closed-form overlap of two coherent states is

    <phi_-|phi_+> = exp[-(x_+ - x_-)^2/4 - (p_+ - p_-)^2/4
                        + (i/2)(p_+ x_- - p_- x_+)].

Everything here is dense and immutable; operators are plain complex
matrices wrapped with a dimension and an optional Hermitian flag.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .backend import coherent_amplitudes, hermite_functions
from .errors import InvalidDimensionError, TruncationError

_HERMITIAN_TOL = 1e-12


@dataclass(frozen=True)
class PhasePoint:
    """A real phase-space point (x, p)."""

    x: float
    p: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.p)):
            raise ValueError(f"phase point must be finite, got ({self.x}, {self.p})")

    @property
    def z(self) -> complex:
        """Coherent-state label z = (x + i p)/sqrt(2)."""
        return (self.x + 1j * self.p) / math.sqrt(2.0)

    @property
    def radius_sq(self) -> float:
        return self.x * self.x + self.p * self.p


@dataclass(frozen=True)
class TruncationPolicy:
    """Reliability target for coherent objects at finite truncation.

    A coherent state (or displaced number state) at a point is deemed
    reliable when its norm deficiency 1 - ||v||^2 stays below
    ``target_norm_deficiency``.
    """

    target_norm_deficiency: float = 1e-10
    max_dim: int = 256

    def __post_init__(self):
        if not 0.0 < self.target_norm_deficiency < 1.0:
            raise ValueError("target_norm_deficiency must lie in (0, 1)")
        if self.max_dim < 1:
            raise ValueError("max_dim must be positive")

    def check(self, deficiency: float, what: str):
        if deficiency > self.target_norm_deficiency:
            raise TruncationError(
                f"{what}: norm deficiency {deficiency:.3e} exceeds the policy "
                f"target {self.target_norm_deficiency:.1e}; increase dim",
                norm_deficiency=deficiency,
            )


class FockOperator:
    """A dense operator on the first ``dim`` number states.

    The matrix is copied and frozen.  ``hermitian=True`` asserts (and
    verifies to 1e-12) that entries satisfy A_mn = conj(A_nm); pass
    ``hermitian=None`` to autodetect.
    """

    __slots__ = ("dim", "matrix", "hermitian", "family")

    def __init__(self, matrix, hermitian=None, family=None):
        matrix = np.array(matrix, dtype=np.complex128)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"operator matrix must be square, got {matrix.shape}")
        if matrix.shape[0] < 1:
            raise InvalidDimensionError("dim must be >= 1")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("operator entries must be finite")
        herm_defect = np.abs(matrix - matrix.conj().T).max()
        if hermitian is None:
            hermitian = bool(herm_defect <= _HERMITIAN_TOL)
        elif hermitian and herm_defect > _HERMITIAN_TOL:
            raise ValueError(
                f"hermitian flag set but max |A - A^dag| = {herm_defect:.3e}")
        matrix.setflags(write=False)
        object.__setattr__(self, "dim", matrix.shape[0])
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "hermitian", hermitian)
        # Optional dim -> ndarray rebuild rule for operators that belong to a
        # dimension-indexed family (builtins); lets expectation_wigner probe
        # whether the Weyl symbol converges as the basis is refined.
        object.__setattr__(self, "family", family)

    def __setattr__(self, name, value):
        raise AttributeError("FockOperator is immutable")

    @classmethod
    def identity(cls, dim):
        return cls(np.eye(dim), hermitian=True,
                   family=lambda d: np.eye(d, dtype=complex))

    def adjoint(self) -> "FockOperator":
        fam = self.family
        return FockOperator(self.matrix.conj().T, hermitian=self.hermitian,
                            family=(lambda d: fam(d).conj().T) if fam else None)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            self._check_dim(other)
            return FockOperator(self.matrix @ other.matrix)
        return NotImplemented

    def __add__(self, other):
        if isinstance(other, FockOperator):
            self._check_dim(other)
            return FockOperator(self.matrix + other.matrix)
        return NotImplemented

    def __sub__(self, other):
        if isinstance(other, FockOperator):
            self._check_dim(other)
            return FockOperator(self.matrix - other.matrix)
        return NotImplemented

    def __mul__(self, scalar):
        return FockOperator(self.matrix * complex(scalar))

    __rmul__ = __mul__

    def _check_dim(self, other):
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __repr__(self):
        tag = ", hermitian" if self.hermitian else ""
        return f"FockOperator(dim={self.dim}{tag})"


class StateVector:
    """A complex coefficient vector in the number basis."""

    __slots__ = ("dim", "coeffs")

    def __init__(self, coeffs):
        coeffs = np.array(coeffs, dtype=np.complex128)
        if coeffs.ndim != 1 or coeffs.size < 1:
            raise ValueError("state coefficients must be a nonempty 1-D vector")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("state coefficients must be finite")
        coeffs.setflags(write=False)
        object.__setattr__(self, "dim", coeffs.size)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("StateVector is immutable")

    @classmethod
    def basis(cls, n, dim):
        if not 0 <= n < dim:
            raise IndexError(f"basis index {n} out of range for dim {dim}")
        v = np.zeros(dim, dtype=np.complex128)
        v[n] = 1.0
        return cls(v)

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    @property
    def norm_deficiency(self) -> float:
        """1 - ||v||^2, the truncation-error metric for coherent objects."""
        return max(0.0, 1.0 - float(np.vdot(self.coeffs, self.coeffs).real))

    def dot(self, other: "StateVector") -> complex:
        """<self|other> with conjugation on self."""
        return complex(np.vdot(self.coeffs, other.coeffs))

    def projector(self) -> FockOperator:
        return FockOperator(np.outer(self.coeffs, self.coeffs.conj()),
                            hermitian=True)

    def __repr__(self):
        return f"StateVector(dim={self.dim}, norm={self.norm():.6f})"


def build_ladder(dim):
    """Lowering and raising operators (a, a^dag) truncated to ``dim``.

    a has entries a[n-1, n] = sqrt(n); the truncated commutator [a, a^dag]
    equals the identity except for the (-dim + 1) artifact in the corner.
    """
    if dim < 2:
        raise InvalidDimensionError("ladder operators need dim >= 2")
    a = np.zeros((dim, dim), dtype=np.complex128)
    n = np.arange(1, dim)
    a[n - 1, n] = np.sqrt(n)
    lower = FockOperator(a, hermitian=False, family=lambda d: _ladder_matrix(d))
    raise_ = FockOperator(a.conj().T, hermitian=False,
                          family=lambda d: _ladder_matrix(d).conj().T)
    return lower, raise_


def _ladder_matrix(dim):
    a = np.zeros((dim, dim), dtype=np.complex128)
    n = np.arange(1, dim)
    a[n - 1, n] = np.sqrt(n)
    return a


def build_number(dim):
    """a^dag a; diagonal (0, 1, ..., dim-1)."""
    if dim < 1:
        raise InvalidDimensionError("dim must be >= 1")
    return FockOperator(np.diag(np.arange(dim, dtype=np.complex128)),
                        hermitian=True,
                        family=lambda d: np.diag(np.arange(d, dtype=complex)))


def build_parity(dim):
    """Parity V = diag((-1)^n); an exact involution, V @ V = identity."""
    if dim < 1:
        raise InvalidDimensionError("dim must be >= 1")
    def mat(d):
        return np.diag((-1.0 + 0j) ** np.arange(d))
    return FockOperator(mat(dim), hermitian=True, family=mat)


def build_position(dim):
    """x = (a + a^dag)/sqrt(2)."""
    def mat(d):
        a = _ladder_matrix(d)
        return (a + a.conj().T) / np.sqrt(2.0)
    return FockOperator(mat(dim), hermitian=True, family=mat)


def build_momentum(dim):
    """p = (a - a^dag)/(i sqrt(2))."""
    def mat(d):
        a = _ladder_matrix(d)
        return (a - a.conj().T) / (1j * np.sqrt(2.0))
    return FockOperator(mat(dim), hermitian=True, family=mat)


def coherent_state(point: PhasePoint, dim, policy: TruncationPolicy | None = None):
    """Coherent state at ``point``: amplitudes exp(-|z|^2/2) z^n/sqrt(n!).

    Warns when |z|^2 exceeds dim (the Poisson weight peaks beyond the
    truncation, so the vector is badly cut); with a policy, raises
    TruncationError when the norm deficiency exceeds the policy target.
    """
    if dim < 1:
        raise InvalidDimensionError("dim must be >= 1")
    z = point.z
    if abs(z) ** 2 > dim:
        warnings.warn(
            f"coherent state at |z|^2 = {abs(z)**2:.1f} truncated to dim {dim}: "
            "norm deficiency will be large", stacklevel=2)
    vec = StateVector(coherent_amplitudes(np.array([z]), dim)[0])
    if policy is not None:
        policy.check(vec.norm_deficiency, f"coherent state at ({point.x}, {point.p})")
    return vec


def displacement_operator(point: PhasePoint, dim):
    """D_xp = expm(z a^dag - z* a) on the truncated basis (exactly unitary)."""
    if dim < 2:
        raise InvalidDimensionError("displacement needs dim >= 2")
    a = _ladder_matrix(dim)
    z = point.z
    return FockOperator(expm(z * a.conj().T - np.conj(z) * a), hermitian=False)


def displaced_number_state(n, point: PhasePoint, dim,
                           policy: TruncationPolicy | None = None):
    """phi_{n;xp} = D_xp phi_n via the matrix exponential of the generator.

    One code path for all (n, x, p); the n = 0 column reproduces the
    closed-form coherent state, which the tests use as the validation.
    """
    if not 0 <= n < dim:
        raise IndexError(f"displaced index {n} out of range for dim {dim}")
    D = displacement_operator(point, dim)
    vec = StateVector(D.matrix[:, n])
    if policy is not None:
        policy.check(vec.norm_deficiency,
                     f"displaced number state n={n} at ({point.x}, {point.p})")
    return vec


def coherent_overlap_closed_form(minus: PhasePoint, plus: PhasePoint) -> complex:
    """<phi_minus | phi_plus> in closed form (exact, no truncation)."""
    dx = plus.x - minus.x
    dp = plus.p - minus.p
    return complex(np.exp(-0.25 * dx * dx - 0.25 * dp * dp
                          + 0.5j * (plus.p * minus.x - minus.p * plus.x)))


def position_wavefunction(n, x):
    """<x|phi_n>: the n-th oscillator eigenfunction, unit L2 norm.

    Accepts scalar or array ``x``; evaluated by the stable normalised
    recurrence (see backend kernels).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    arr = np.asarray(x, dtype=np.float64)
    vals = hermite_functions(arr.reshape(-1), n)[n].reshape(arr.shape)
    return float(vals) if np.isscalar(x) or arr.ndim == 0 else vals
