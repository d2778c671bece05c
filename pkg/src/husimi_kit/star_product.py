"""Operator-product series: the convergent Husimi-side expansion and the
terminating Weyl-side (Groenewold/Moyal) polynomial star product.

Husimi side, at a phase point with displaced number states phi_{n;xp}:

    H_{AB}(x,p) = sum_n <A^dag phi_xp | phi_{n;xp}> <phi_{n;xp}| B phi_xp>,

absolutely convergent with the rigorous Cauchy-Schwarz tail bound

    |tail after n| <= sqrt(sum_{k>n} |<A^dag phi|phi_k>|^2) * ||B phi||.

Weyl side, for polynomial symbols only (the series terminates there;
for delta-like symbols its terms are products of distributions and the
demonstration is deliberately not attempted):

    F * G = sum_k (i/2)^k/k! sum_j (-1)^j C(k,j)
            (dx^(k-j) dp^j F) (dx^j dp^(k-j) G).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .fock import (FockOperator, PhasePoint, coherent_state,
                   displacement_operator)
from .symbols import SeriesResult

# ---------------------------------------------------------------------------
# Husimi side

def _displaced_frame(A, B, point):
    # phi is the closed-form coherent vector; the displaced number states
    # u_n = D e_n stay a complete orthonormal basis of the truncated space
    # (D is exactly unitary), so the summed series reproduces
    # <phi| A B phi> to machine precision at any dim.
    D = displacement_operator(point, A.dim).matrix
    phi = coherent_state(point, A.dim).coeffs
    a_k = (phi.conj() @ A.matrix) @ D        # <A^dag phi | phi_k> = <phi| A phi_k>
    b_k = D.conj().T @ (B.matrix @ phi)      # <phi_k | B phi>
    return phi, a_k, b_k


def mizrahi_term(A: FockOperator, B: FockOperator, point: PhasePoint, n) -> complex:
    """n-th term <A^dag phi_xp|phi_{n;xp}><phi_{n;xp}|B phi_xp>; equals
    (1/n!) d+^n H_A d-^n H_B."""
    if A.dim != B.dim:
        raise ValueError("operator dimensions differ")
    if not 0 <= n < A.dim:
        raise IndexError(f"term index {n} out of range for dim {A.dim}")
    _, a_k, b_k = _displaced_frame(A, B, point)
    return complex(a_k[n] * b_k[n])


def mizrahi_product(A: FockOperator, B: FockOperator, point: PhasePoint,
                    tol=1e-10, n_max=None) -> SeriesResult:
    """Sum the product series until the Cauchy-Schwarz tail bound <= tol.

    The bound sequence is monotone non-increasing; if it never reaches
    ``tol`` within ``n_max`` terms (default: the full truncated basis) the
    verdict is inconclusive and the last bound is reported.  On
    convergence the value equals H_{AB}(x, p) to within the bound.
    """
    if A.dim != B.dim:
        raise ValueError("operator dimensions differ")
    if tol <= 0:
        raise ValueError("tol must be positive")
    phi, a_k, b_k = _displaced_frame(A, B, point)
    if n_max is not None:
        a_k = a_k[:n_max + 1]
        b_k = b_k[:n_max + 1]
    terms = a_k * b_k
    norm_a = float(np.linalg.norm(A.matrix.conj().T @ phi))
    norm_b = float(np.linalg.norm(B.matrix @ phi))
    tail_sq = np.maximum(norm_a ** 2 - np.cumsum(np.abs(a_k) ** 2), 0.0)
    bounds = np.sqrt(tail_sq) * norm_b
    if bounds.size == A.dim:
        # the displaced number states span the whole truncated space, so
        # past the last one the tail is zero by Parseval, not by luck
        bounds[-1] = 0.0

    hit = np.nonzero(bounds <= tol)[0]
    if hit.size:
        stop = int(hit[0]) + 1
        return SeriesResult(np.cumsum(terms[:stop]), np.abs(terms[:stop]),
                            float(bounds[stop - 1]), "converged", tol)
    return SeriesResult(np.cumsum(terms), np.abs(terms),
                        float(bounds[-1]), "inconclusive", tol)


# ---------------------------------------------------------------------------
# Weyl side: polynomial symbol algebra

@dataclass(frozen=True)
class PolynomialSymbol:
    """sum_ij c_ij x^i p^j with finitely many nonzero complex coefficients."""

    coeffs: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {k: complex(v) for k, v in self.coeffs.items() if v != 0}
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def variable(cls, name):
        if name == "x":
            return cls({(1, 0): 1.0})
        if name == "p":
            return cls({(0, 1): 1.0})
        raise ValueError(f"unknown variable {name!r}")

    @property
    def degree(self) -> int:
        return max((i + j for i, j in self.coeffs), default=0)

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0.0) + v
        return PolynomialSymbol(out)

    def __sub__(self, other):
        return self + (-1.0) * other

    def __mul__(self, other):
        if isinstance(other, PolynomialSymbol):
            out = {}
            for (i1, j1), c1 in self.coeffs.items():
                for (i2, j2), c2 in other.coeffs.items():
                    k = (i1 + i2, j1 + j2)
                    out[k] = out.get(k, 0.0) + c1 * c2
            return PolynomialSymbol(out)
        out = {k: other * v for k, v in self.coeffs.items()}
        return PolynomialSymbol(out)

    __rmul__ = __mul__

    def dx(self):
        return PolynomialSymbol({(i - 1, j): i * c
                                 for (i, j), c in self.coeffs.items() if i})

    def dp(self):
        return PolynomialSymbol({(i, j - 1): j * c
                                 for (i, j), c in self.coeffs.items() if j})

    def __call__(self, x, p):
        x = np.asarray(x)
        p = np.asarray(p)
        out = np.zeros(np.broadcast(x, p).shape, dtype=complex)
        for (i, j), c in self.coeffs.items():
            out = out + c * x ** i * p ** j
        return out if out.shape else complex(out)

    def is_zero(self) -> bool:
        return not self.coeffs

    def max_coeff_diff(self, other) -> float:
        keys = set(self.coeffs) | set(other.coeffs)
        return max((abs(self.coeffs.get(k, 0) - other.coeffs.get(k, 0))
                    for k in keys), default=0.0)


def moyal_star_polynomial(F: PolynomialSymbol, G: PolynomialSymbol) -> PolynomialSymbol:
    """Exact Groenewold/Moyal star product F * G of polynomial symbols.

    Summed until the bidifferential terms vanish identically, which happens
    past min(deg F, deg G); no truncation is involved.
    """
    out = PolynomialSymbol({})
    k = 0
    while True:
        term = PolynomialSymbol({})
        for j in range(k + 1):
            left = F
            for _ in range(k - j):
                left = left.dx()
            for _ in range(j):
                left = left.dp()
            if left.is_zero():
                continue
            right = G
            for _ in range(j):
                right = right.dx()
            for _ in range(k - j):
                right = right.dp()
            if right.is_zero():
                continue
            term = term + ((-1) ** j * math.comb(k, j)) * (left * right)
        if term.is_zero() and k > min(F.degree, G.degree):
            break
        out = out + ((0.5j) ** k / math.factorial(k)) * term
        k += 1
    return out


# ---------------------------------------------------------------------------
# Matrix-side oracles for the Moyal correspondence

def weyl_ordered_operator(i, j, dim) -> FockOperator:
    """Weyl (symmetric) quantisation of the monomial x^i p^j as a matrix,
    via McCoy's formula W(x^i p^j) = 2^-i sum_k C(i,k) x^k p^j x^(i-k).

    Entries within the top i+j shells of the truncation are corrupted by
    the cutoff; callers that need exact low entries should build at a
    padded dim.
    """
    a = np.zeros((dim, dim), dtype=complex)
    n = np.arange(1, dim)
    a[n - 1, n] = np.sqrt(n)
    x = (a + a.conj().T) / np.sqrt(2.0)
    p = (a - a.conj().T) / (1j * np.sqrt(2.0))
    pj = np.linalg.matrix_power(p, j)
    out = np.zeros_like(x)
    for k in range(i + 1):
        out += math.comb(i, k) * (
            np.linalg.matrix_power(x, k) @ pj @ np.linalg.matrix_power(x, i - k))
    return FockOperator(out / 2 ** i)


def weyl_quantize(F: PolynomialSymbol, dim) -> FockOperator:
    """Weyl quantisation of a polynomial symbol (sum of McCoy monomials)."""
    out = np.zeros((dim, dim), dtype=complex)
    for (i, j), c in F.coeffs.items():
        out += c * weyl_ordered_operator(i, j, dim).matrix
    return FockOperator(out)


def polynomial_weyl_symbol(M: FockOperator, max_degree) -> PolynomialSymbol:
    """Exact polynomial Weyl symbol of a matrix known to be a polynomial in
    the ladder operators of total degree <= max_degree.

    Solves for the normal-ordered coefficients c_ab of
    M = sum c_ab (a^dag)^a a^b from the low matrix elements (triangular
    along each diagonal), then maps each normal-ordered monomial to its
    Weyl symbol

        X[(a^dag)^a a^b] = sum_s C(a,s) C(b,s) s! (-1/2)^s zbar^(a-s) z^(b-s)

    (from X[e^{a A+} e^{b A-}] = e^{a zbar + b z - a b / 2}),
    with z = (x + i p)/sqrt(2).  The result is exact up to float roundoff
    as long as the matrix core (away from the top max_degree shells) is
    uncorrupted.
    """
    dim = M.dim
    if dim < 2 * max_degree + 2:
        raise ValueError("matrix too small to determine the expansion; "
                         f"need dim >= {2 * max_degree + 2}")
    coeff = {}
    for d in range(-max_degree, max_degree + 1):
        # unknowns c_ab on the diagonal a - b = d, a + b <= max_degree
        bs = [b for b in range(max_degree + 1)
              if 0 <= b + d and 2 * b + d <= max_degree]
        if not bs:
            continue
        rows = []
        rhs = []
        for m in range(len(bs)):  # matrix element <n+d | M | n>
            n = m + max(0, -d)
            rows.append([
                math.sqrt(math.factorial(n) * math.factorial(n + d))
                / math.factorial(n - b)
                if n - b >= 0 else 0.0
                for b in bs
            ])
            rhs.append(M.matrix[n + d, n])
        sol = np.linalg.solve(np.array(rows, dtype=complex), np.array(rhs))
        for b, c in zip(bs, sol):
            coeff[(b + d, b)] = c

    z = PolynomialSymbol({(1, 0): 1 / math.sqrt(2), (0, 1): 1j / math.sqrt(2)})
    zbar = PolynomialSymbol({(1, 0): 1 / math.sqrt(2), (0, 1): -1j / math.sqrt(2)})
    zpow = [PolynomialSymbol({(0, 0): 1.0})]
    zbpow = [PolynomialSymbol({(0, 0): 1.0})]
    for _ in range(max_degree):
        zpow.append(zpow[-1] * z)
        zbpow.append(zbpow[-1] * zbar)

    out = PolynomialSymbol({})
    for (a_, b_), c in coeff.items():
        if abs(c) < 1e-12:
            continue
        for s in range(min(a_, b_) + 1):
            w = math.comb(a_, s) * math.comb(b_, s) * math.factorial(s) * (-0.5) ** s
            out = out + (c * w) * (zbpow[a_ - s] * zpow[b_ - s])
    return out
