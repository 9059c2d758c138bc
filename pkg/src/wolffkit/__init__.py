"""wolffkit: numerical Wolff/Riesz potentials, dyadic models, the Picard
scheme for u = W_{alpha,p}(u^q) + eps f, solvability verifiers, and radial
Lane-Emden oracles."""

from .params import (Params, IterationConstants, RegimeError, make_params,
                     hessian_params, critical_exponents, iteration_constants,
                     subadditivity_constant)
from .dyadic import (DyadicCube, ShiftedLattice, Box, cube_containing,
                     ancestors, whitney_decompose)
from .measures import (PointMassMeasure, CellDensityMeasure,
                       RadialPowerMeasure, dirac, mass_ball, mass_cube,
                       restrict, measure_from_json)
from .potentials import (GenerationWindow, dyadic_riesz, dyadic_wolff,
                         dyadic_wolff_shifted, wolff_truncated,
                         wolff_truncated_info, riesz_truncated, wolff_split)
from .solver import (GridFunction, ConvergenceCertificate, apply_N,
                     picard_solve, residual, estimate_pointwise_C)
from .verifiers import (VerifierReport, CellGrid, testing_inequality_dyadic,
                        testing_inequality_balls, pointwise_condition,
                        frostman_ratio, fefferman_phong, equivalence_A123,
                        local_integral_estimate, carleson_embedding_check,
                        prop51_quantities)
from .oracles import (radial_plap_solution, radial_hessian_solution,
                      plap_radial_residual, hessian_radial_residual,
                      wolff_dirac_closed_form, brute_wolff, log_mesh)
from .capacity import (riesz_capacity_lower, bessel_energy,
                       capacity_scaling_check, capacity_wolff)

__version__ = "0.1.0"
