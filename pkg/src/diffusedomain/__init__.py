"""Diffuse domain solver for two-sided elliptic transmission problems.

Reformulates a transmission problem posed across an embedded interface as
a single smooth-coefficient equation on a box, solves it with geometric
multigrid, and provides the sharp-interface references and first-order
correction machinery needed to verify that the approximation converges at
exactly first order in the interface width.
"""

from .analysis import (ConvergenceTable, ProbeRemainderTable, RateFit, StudyRow,
                       asymptotic_order_check, coupled_refinement_study,
                       discrete_error, epsilon_study, fit_rate, one_sided_study,
                       self_convergence_study)
from .discretization import DiffuseOperator, build_operator, build_rhs, residual_norms
from .geometry import (Band, ConvexPolygon, DistanceField, Ellipse, GeometryError,
                       ImplicitCurve, NoInterfaceError, PointInterface1D, Starfish,
                       eikonal_residual, fast_march, initialize_band, level_set,
                       polygon_signed_distance, signed_distance)
from .grid import Grid, box_grid, line_grid
from .model import (BenchmarkCase, ExactSolution, InterfaceData, TransmissionProblem,
                    builtin_case, case_names, exact_solution)
from .multigrid import (ConfigurationError, DivergenceError, Hierarchy, SolveReport,
                        build_hierarchy, max_levels, prolong, restrict, smooth,
                        solve, v_cycle)
from .phasefield import (DiffuseCoefficients, diffuse_coefficients, phi,
                         surface_delta)
from .reference import (CaseMismatchError, CorrectionSolution, LayerIntegrals,
                        MatchingConstants, SharpSolution, expansion_eval,
                        first_order_correction_1d, layer_integrals,
                        matching_constants, sharp_solve_1d)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
