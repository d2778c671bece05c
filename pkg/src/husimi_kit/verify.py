"""Built-in invariant suite behind ``husimi-kit verify``.

One line per check; returns the failure count.  These are quick spot
checks of the package's core identities against independent oracles (the
full property suite lives in the test directory).
"""

import math

import numpy as np

from .continuation import (ComplexPhasePoint, cauchy_riemann_residual,
                           derivative_table, lemma_b_check)
from .dynamics import EvolutionConfig, evolve_husimi, evolve_oracle
from .errors import ResolutionRefusal
from .expectation import (expectation_husimi_series, expectation_wigner,
                          trace_direct)
from .fock import (FockOperator, PhasePoint, build_ladder, build_number,
                   build_parity, coherent_overlap_closed_form, coherent_state)
from .star_product import (PolynomialSymbol, mizrahi_product,
                           moyal_star_polynomial)
from .symbols import (GridSpec, gaussian_smooth, husimi_symbol,
                      husimi_symbol_grid, weyl_symbol)


def _random_hermitian(rng, dim):
    m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    h = (m + m.conj().T) / 2.0
    return FockOperator(h / np.linalg.norm(h, 2), hermitian=True)


def run_verification(fast=False):
    rng = np.random.default_rng(20240811)
    checks = []

    def check(name, value, bound):
        checks.append((name, value, bound, value <= bound))

    # ladder/commutator truncation artifact
    a, ad = build_ladder(16)
    comm = (a @ ad - ad @ a).matrix
    expect = np.eye(16)
    expect[15, 15] = -15.0
    check("ladder commutator artifact", np.abs(comm - expect).max(), 1e-12)

    # coherent eigenvalue property
    pt = PhasePoint(1.0, 1.0)
    phi = coherent_state(pt, 32)
    resid = build_ladder(32)[0].matrix @ phi.coeffs - pt.z * phi.coeffs
    check("coherent state a-eigenvector", np.abs(resid[:24]).max(), 1e-10)

    # overlap closed form vs truncated inner product
    p1, p2 = PhasePoint(0.3, -0.7), PhasePoint(-1.1, 0.4)
    brute = np.vdot(coherent_state(p1, 64).coeffs, coherent_state(p2, 64).coeffs)
    check("overlap closed form", abs(brute - coherent_overlap_closed_form(p1, p2)),
          1e-12)

    # Husimi symbol of parity
    V = build_parity(48)
    pt = PhasePoint(0.8, -0.5)
    check("husimi(parity) = exp(-r^2)",
          abs(husimi_symbol(V, pt) - math.exp(-pt.radius_sq)), 1e-9)

    # smoothing identity on one random operator
    A = _random_hermitian(rng, 12 if fast else 16)
    spec = GridSpec(-8, 8, 128, -8, 8, 128) if fast else GridSpec()
    smoothed = gaussian_smooth(weyl_symbol(A, spec))
    direct = husimi_symbol_grid(A, spec)
    check("smoothing identity", smoothed.sup_diff(direct), 1e-5)

    # Cauchy-Riemann residual order
    zpt = ComplexPhasePoint(0.5 + 0.2j, -0.3 + 0.1j)
    r1 = max(cauchy_riemann_residual(A, zpt, 1e-3))
    r2 = max(cauchy_riemann_residual(A, zpt, 1e-4))
    check("CR residual h=1e-3", r1, 1e-4)
    check("CR residual order", r2 / max(r1, 1e-300), 0.05)

    # derivative table radius independence (relative)
    t1 = derivative_table(A, PhasePoint(0.4, 0.1), 6, radius=0.3)
    t2 = derivative_table(A, PhasePoint(0.4, 0.1), 6, radius=0.6)
    rel = np.abs(t1.coeffs - t2.coeffs) / np.maximum(1.0, np.abs(t2.coeffs))
    check("table radius independence", rel.max(), 1e-7)

    # lemma b at a displaced pair
    _, _, diff = lemma_b_check(A, 3, PhasePoint(0.2, -0.1), PhasePoint(0.7, 0.3))
    check("lemma b identity", diff, 1e-8)

    # product series vs matrix oracle
    worst = 0.0
    for _ in range(2 if fast else 5):
        B1 = _random_hermitian(rng, 20)
        B2 = _random_hermitian(rng, 20)
        ptr = PhasePoint(*rng.uniform(-1.5, 1.5, 2))
        res = mizrahi_product(B1, B2, ptr, tol=1e-10)
        worst = max(worst, abs(res.value - husimi_symbol(B1 @ B2, ptr)))
    check("mizrahi product identity", worst, 1e-8)

    # parity contrast: product converges, wigner refuses
    V32 = build_parity(32)
    res = mizrahi_product(V32, V32, PhasePoint(1.0, 0.7), tol=1e-9)
    check("parity*parity = 1", abs(res.value - 1.0), 1e-9)
    rho_vac = parse_vacuum(32)
    try:
        expectation_wigner(rho_vac, build_parity(32))
        check("wigner refuses parity", 1.0, 0.0)
    except ResolutionRefusal:
        check("wigner refuses parity", 0.0, 0.0)

    # moyal bracket of x and p
    x = PolynomialSymbol.variable("x")
    p = PolynomialSymbol.variable("p")
    bracket = moyal_star_polynomial(x, p) - moyal_star_polynomial(p, x)
    check("x*p - p*x = i", bracket.max_coeff_diff(PolynomialSymbol({(0, 0): 1j})),
          0.0)

    # three-way expectation on the number operator
    N = build_number(48)
    rho = parse_coherent(1.0, -0.5, 48)
    tr = trace_direct(rho, N).real
    wg = expectation_wigner(rho, N).real
    hs = expectation_husimi_series(rho, N, n_max=6).value.real
    check("trace vs wigner", abs(tr - wg), 1e-6)
    check("trace vs husimi series", abs(tr - hs), 1e-6)

    if not fast:
        # short harmonic rotation against the oracle
        H = build_number(96)
        rho0 = parse_coherent(2.0, 0.0, 96)
        grid = GridSpec(-13, 13, 256, -13, 13, 256)
        cfgv = EvolutionConfig(dt=0.01, steps=20, bracket_order=3, grid=grid,
                               taper_radii=(8.0, 10.0))
        out = evolve_husimi(H, rho0, cfgv)
        t_end, q_end = out.snapshots[-1]
        ref = evolve_oracle(H, rho0, t_end, grid)
        check("harmonic evolution vs oracle", q_end.sup_diff(ref), 1e-5)
        check("mass defect", max(out.mass_defects), 1e-6)

    failures = 0
    for name, value, bound, ok in checks:
        status = "PASS" if ok else "FAIL"
        print(f"[{status}] {name}: {value:.3e} (<= {bound:.1e})")
        failures += 0 if ok else 1
    print(f"{len(checks) - failures}/{len(checks)} checks passed")
    return failures


def parse_vacuum(dim):
    v = np.zeros(dim, complex)
    v[0] = 1.0
    return FockOperator(np.outer(v, v.conj()), hermitian=True)


def parse_coherent(x, p, dim):
    c = coherent_state(PhasePoint(x, p), dim).coeffs
    c = c / np.linalg.norm(c)
    return FockOperator(np.outer(c, c.conj()), hermitian=True)
