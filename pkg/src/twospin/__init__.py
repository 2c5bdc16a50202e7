"""Verified dynamics of two interacting spins (four-level systems).

Closed-form propagators for every exactly solvable configuration,
reductions to the one-spin problem, the stationary spectrum for
constant fields, magnetic-resonance analysis, and an independent RK4
integrator that every closed form is checked against.
"""

from .errors import (ClosedFormMismatch, DegenerateDenominator, NoClosedForm,
                     NoConvergence, NonHermitianInput, NotAnEigenpair,
                     OutOfRange, SchemaError, TwoSpinError,
                     ZeroDriveFrequency)
from .hamiltonian import (HamiltonianSample, check_swap, hamiltonian_at,
                          one_spin_h, two_spin_H, two_spin_matrix)
from .linalg import (EXCHANGE, ID2, ID4, PAULI, SPIN1, SPIN2, SWAP, kron,
                     expm_skew_hermitian, swap_matrix)
from .model import (ConstantField, ConstantProfile, ParallelZField, RabiField,
                    SampledProfile, StationaryBasis, TwoSpinProblem, ZeroField,
                    field_at, interaction_integral, profile_value,
                    stationary_basis)
from .oracle import (IntegratorConfig, integrate_propagator, integrate_state,
                     schrodinger_residual)
from .propagators import (Propagator, RabiParams, prop_constant_parallel,
                          prop_equal_fields, prop_equal_rabi,
                          prop_free_interaction, prop_noninteracting,
                          prop_rabi_second_spin, rabi_one_spin,
                          reparameterize_check)
from .reductions import (ParallelReduction, RotatingFrameProblem,
                         assemble_parallel, km_map, reduce_parallel,
                         rotating_frame_reduce, rotating_frame_solution)
from .resonance import (ResonancePair, ScanResult, rabi_probability,
                        resonance_frequencies, scan, two_spin_elements)
from .spectrum import (SpectralResult, build_D, quartic_d, solve_levels,
                       stationary_rabi)

__version__ = "0.1.0"
