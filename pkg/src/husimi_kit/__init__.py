"""husimi_kit: phase-space symbols, convergent operator-product series, and
generalized Liouville dynamics on a truncated Fock basis."""

import os as _os

# Thread cap must land before numpy spins up its pools.
_threads = _os.environ.get("HUSIMI_KIT_THREADS")
if _threads:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                 "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

__version__ = "0.1.0"

from .backend import backend_name
from .continuation import (ComplexPhasePoint, DerivativeTable,
                           cauchy_riemann_residual, continue_symbol,
                           derivative_table, diagonal_derivative_grid,
                           lemma_b_check, plus_derivative_grid)
from .dynamics import (BracketOperator, EvolutionConfig, EvolutionResult,
                       evolve_husimi, evolve_oracle, generalized_bracket)
from .expectation import (BoundProbeReport, bound_probe, expectation_husimi_series,
                          expectation_wigner, trace_direct,
                          weyl_family_instability)
from .fock import (FockOperator, PhasePoint, StateVector, TruncationPolicy,
                   build_ladder, build_momentum, build_number, build_parity,
                   build_position, coherent_overlap_closed_form, coherent_state,
                   displaced_number_state, displacement_operator,
                   position_wavefunction)
from .star_product import (PolynomialSymbol, mizrahi_product, mizrahi_term,
                           moyal_star_polynomial, polynomial_weyl_symbol,
                           weyl_ordered_operator, weyl_quantize)
from .symbols import (GridSpec, PhaseGrid, SeriesResult, anti_husimi_partial_sums,
                      gaussian_smooth, husimi_function, husimi_symbol,
                      husimi_symbol_grid, weyl_symbol)

__all__ = [
    "backend_name", "__version__",
    "FockOperator", "StateVector", "PhasePoint", "TruncationPolicy",
    "build_ladder", "build_number", "build_parity", "build_position",
    "build_momentum", "coherent_state", "displaced_number_state",
    "displacement_operator", "coherent_overlap_closed_form",
    "position_wavefunction",
    "GridSpec", "PhaseGrid", "SeriesResult", "husimi_symbol",
    "husimi_symbol_grid", "husimi_function", "weyl_symbol", "gaussian_smooth",
    "anti_husimi_partial_sums",
    "ComplexPhasePoint", "DerivativeTable", "continue_symbol",
    "cauchy_riemann_residual", "derivative_table", "lemma_b_check",
    "plus_derivative_grid", "diagonal_derivative_grid",
    "PolynomialSymbol", "mizrahi_term", "mizrahi_product",
    "moyal_star_polynomial", "weyl_ordered_operator", "weyl_quantize",
    "polynomial_weyl_symbol",
    "EvolutionConfig", "EvolutionResult", "BracketOperator",
    "generalized_bracket", "evolve_husimi", "evolve_oracle",
    "trace_direct", "expectation_wigner", "expectation_husimi_series",
    "weyl_family_instability", "bound_probe", "BoundProbeReport",
]
