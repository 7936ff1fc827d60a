"""Numerical toolkit for 1-D periodic Sturm-Liouville problems and their
Bloch-theory structure: monodromy analysis, band location, separable
multidimensional solutions, and a desk-scale lattice-sum transform."""

from .coeffs import (PeriodicCoefficient, intro_counterexample_potential,
                     is_zero_coefficient,
                     kronig_penney_potential, mathieu_potential,
                     zero_coefficient)
from .errors import (AccuracyError, BlochtkError, DegenerateLatticeError,
                     FormExtractionError, IntegrationError, NotExpandableError)
from .floquet import (ClassifyResult, FloquetData, Monodromy, QuasimomentumMap,
                      SolutionForm, boundedness, classify, jordan_classify,
                      matrix_log, monodromy, multipliers, periodic_parts,
                      quasimomentum, shifted_operator_residual,
                      verify_sum_rule, zero_of_bloch_check)
from .lattice import (CongruenceClass, Lattice1D, LatticeND, class_distance,
                      class_equal, cross_coefficients, is_real_class,
                      reduce_quasimomentum)
from .multidim import (BlochTerm, SeparableProblem, SeparableSolution,
                       assemble, combination_expand, hartree_example,
                       residual_nd)
from .propagate import (Problem1D, TransferMatrix, propagate,
                        propagate_fundamental, solution_samples,
                        system_matrix)
from .spectrum import (Band, BandStructure, FiberEigenvalues, discriminant,
                       locate_bands, planewave_fiber, sigma_tag_real_axis,
                       union_check)
from .transform import (SampledFunction, TransformField, bloch_floquet,
                        check_properties, from_callable, invert,
                        parseval_deviation)
from .catalog import CATALOG, CatalogEntry, catalog_names, get_problem, \
    intro_fixture_report

__version__ = "0.1.0"
