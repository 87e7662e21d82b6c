"""Summability analysis for Carleson embeddings on weighted Fock spaces.

The toolkit decides, with three-valued finite-data semantics, whether the
natural embedding of a weighted Fock space into L^p of a planar measure is
r-summing, brackets the summing norm, and classifies composition, Volterra
and differentiation/integration operators — each verdict cross-checked by
an independent brute-force oracle.
"""

from .lattice import (Cell, GridSpec, LatticePoint, Window, cell_of,
                      covering_cells, default_grid)
from .weights import (CellMassTable, Weight, a1_constant, apr_constant,
                      averaged_weight, cell_mass_table, const_weight,
                      dual_weight, esti_growth_constant, exp2_weight,
                      mass_on_disk as weight_mass_on_disk,
                      mass_on_square, parse_weight, poly_weight,
                      product_weight)
from .measures import (AffineSymbol, GaussEnvelope, Measure,
                       PolynomialSymbol, dirac, gauss_measure,
                       lebesgue_measure, load_atoms_csv,
                       mass_on_cell, mass_on_disk, moment_condition, mu_hat,
                       parse_measure, pullback_measure, tilted_weight,
                       volterra_measure, zero_measure)
from .fock import (BerezinBounds, KernelFunction, KernelNorm, TestFunction,
                   berezin_opnorm_bounds, berezin_transform, dual_pairing,
                   kernel_norm, pointwise_bound_check,
                   synthesize_test_function, weighted_norm)
from .summing import (Classification, DiagonalSequence, Regime,
                      SummingVerdict, TailCertificate,
                      aggregate_local_bounds, classify_embedding,
                      diag_summing_bruteforce, diag_summing_estimate,
                      lattice_sequence, local_summing_bound, ls_norm,
                      order_bounded_check, target_exponent)
from .classifiers import (DifferentiationVerdict, OperatorVerdict,
                          classify_composition, classify_volterra,
                          reduce_differentiation)
from .oracles import (SuiteReport, hs_exact_pi2, run_suite, seeded_atoms,
                      verify_berezin_equivalence, verify_diag_consistency,
                      verify_hs_oracle, verify_lattice_integral_equivalence,
                      verify_monotonicity, verify_prop33_equivalence)
from .calibration import CalibrationTable, default_calibration, load_calibration
from . import errors

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
