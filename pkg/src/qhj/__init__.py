"""One-dimensional stationary quantum mechanics in Hamilton-Jacobi form.

Quantum correction functions ``Q = P - p`` of the complex Riccati equation
``P^2 - i hbar P' = p^2``, wave functions from running-wave actions,
reflection phases, quantization and Maslov curves, and quantum trajectories
from the energy derivative of the action.
"""

from ._jit import BACKEND
from .errors import (BranchCutAmbiguity, ConfigError, DegenerateMatch, DirectionMismatch,
                     DomainError, EnergyDerivativeFailure, FitFailure, NoRootInGrid,
                     NoTurningPoint, NumericalError, OutOfRange, QHJError, QuadratureFailure,
                     RootNotConverged, SeedRegionTooNarrow, ShootingNotConverged,
                     StiffnessFailure)
from .fields import ComplexField, Direction, RealField, zero_field
from .potential import (EnergyShell, PotentialKind, PotentialModel, classical_action,
                        classical_momentum, classical_time, find_turning_points)
from .qcf import (GridSpec, decaying_field, hj_residual, iterate_q_fixed_point,
                  q0_closed_form_linear, q0_quadrature, quantality, solve_q_selfconsistent,
                  turning_point_bound, wkb_terms)
from .spectrum import (ReflectionPhase, SpectrumResult, find_eigenvalues, maslov_index,
                       quantization_curve, reflection_phase)
from .wavefn import (WaveField, action_field, build_wave_ltr, build_wave_rtl,
                     continue_decaying, running_wave_stats, wkb_wave)
from .dynamics import (TrajectoryBranches, apparent_continuation_ho, assemble_branches,
                       isoenergeticity_residual, phase_space_invariance_check,
                       time_shift_total, trajectory_time)
from .oracle import (OracleSolution, airy_exact_q, analytic_ho_spectrum, hermite_state,
                     numerov_eigen, numerov_solve)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
