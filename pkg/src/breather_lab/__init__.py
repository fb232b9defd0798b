"""Damped-driven breathers in finite dNLS chains.

Computes breather fixed points of the damped-and-driven chain by Newton
continuation, analyzes their linear stability spectrum, and simulates the
metastable sliding of the damped-only system along the breather family,
including the fully analytic two-site theory.
"""

from .breather import (AsymptoticBreather, Breather, ContinuationConfig,
                       asymptotic_breather, beta_leading, beta_omega_slope_leading,
                       continue_in_omega, residual, solve_breather,
                       solve_breather_result, solve_from_seed, twist, twist_leading)
from .errors import (ApproximationBreakdownError, BasisDegenerateError, BreatherLabError,
                     ConfigError, ContinuationStalledError, DomainError,
                     EigensolverFailureError, IntegrationFailureError, InvalidInputError,
                     NoConvergenceError, NoFixedPointError, PastValidityError,
                     SingularJacobianError, SingularStateError, SpectrumAnomalyError)
from .lattice import (CartesianState, EnergyPhaseState, LatticeParams,
                      cartesian_to_energy_phase, energy_phase_to_cartesian,
                      field_jacobian, instantaneous_frequency, vector_field_cartesian,
                      vector_field_energy_phase, wrap_phase)
from .metastability import (EscapeReport, ModulationTrace, Trajectory, TwistComparison,
                            align_phase, detect_escape, distance_to_family,
                            modulation_prediction, modulation_trace, project_onto_frame,
                            project_trajectory, simulate, simulate_damped,
                            track_frequency, twist_comparison)
from .numerics import (EigenDecomposition, IntegrationResult, IntegratorConfig,
                       NewtonConfig, NewtonResult, eig_dense, integrate,
                       lambert_w_minus1, newton_solve)
from .stability import (SpectrumReport, TangentFrame, decompose_small_mode,
                        jacobian_at, lambda2_leading, spectrum, tangent_frame,
                        tangent_plane_angle)
from .two_site import (DampedDrivenTwoSite, TwoSiteFixedPoint, TwoSiteLinearization,
                       beta_for_omega, beta_for_site1_energy, damped_driven_fixed_point,
                       energy_decay_rate, energy_evolution, energy_phase_jacobian,
                       phase_shift_approx, symmetric_decay, symmetric_decay_phases,
                       tau, two_site_jacobian, undamped_family)

__version__ = "0.1.0"
