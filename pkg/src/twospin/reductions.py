"""Dimensional reductions of the four-level problem.

Two reductions are implemented:

* Parallel z-fields B1(t), B2(t) with coupling J(t): the outer spinor
  components acquire pure phases, and the middle pair obeys a one-spin
  equation in the effective field K(t) = (J(t), 0, B1(t) - B2(t)) after
  a scalar phase transformation strips the -J/2 shift.  Both the
  phase-shifted ("primed") and bare conventions are exposed, since the
  -J/2 shift is sometimes kept and sometimes removed.

* Both spins in rotating (Rabi) fields sharing one drive frequency,
  with constant coupling: transforming to the frame co-rotating with
  the drive renders the problem time independent, reducing it to the
  stationary eigenvalue problem of the spectrum module.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import atan2, hypot

import numpy as np

from . import linalg, oracle
from .errors import NotAnEigenpair, ZeroDriveFrequency
from .hamiltonian import two_spin_matrix
from .linalg import SPIN1, SPIN2
from .model import (ConstantProfile, RabiField, ScalarProfile, TwoSpinProblem,
                    interaction_integral, profile_value)
from .propagators import RabiParams, expm_pauli

HADAMARD_LIKE = (linalg.SX + linalg.SZ) / np.sqrt(2)


@dataclass(frozen=True)
class RotatingFrameProblem:
    """Constant problem equivalent to two Rabi fields with a shared drive.

    All quantities are in units of the drive frequency: ``gamma`` is the
    scaled half-coupling, ``a`` the scaled second-spin field and ``b``
    the scaled first-spin field, each with the half-drive shift removed
    from its z-component.
    """

    gamma: float
    a: np.ndarray
    b: np.ndarray


# ---------------------------------------------------------------------------
# parallel fields along z
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParallelReduction:
    """Reduction data for parallel z-fields; all functions of time.

    ``v1_phase`` / ``v4_phase`` are the pure phases of the outer
    components (the complex constants multiply them); ``reduced_field``
    is K(t) for the bare middle-pair equation; ``phase_factor`` is half
    the accumulated coupling integral, the factor converting the bare
    middle spinor into the primed one.
    """

    b1: ScalarProfile
    b2: ScalarProfile
    coupling: ScalarProfile

    def b_plus(self, t) -> float:
        return profile_value(self.b1, t) + profile_value(self.b2, t)

    def b_minus(self, t) -> float:
        return profile_value(self.b1, t) - profile_value(self.b2, t)

    def phase_factor(self, t) -> float:
        return 0.5 * interaction_integral(self.coupling, 0.0, t)

    def v1_phase(self, t) -> complex:
        arg = (self.phase_factor(t)
               + _integral_sum(self.b1, self.b2, t))
        return np.exp(-1j * arg)

    def v4_phase(self, t) -> complex:
        arg = (self.phase_factor(t)
               - _integral_sum(self.b1, self.b2, t))
        return np.exp(-1j * arg)

    def reduced_field(self, t) -> np.ndarray:
        """K(t) = (J(t), 0, B1(t) - B2(t)); vectorized over t."""
        j = np.asarray(profile_value(self.coupling, t), dtype=float)
        bm = np.asarray(self.b_minus(t), dtype=float)
        out = np.zeros(j.shape + (3,))
        out[..., 0] = j
        out[..., 2] = bm
        return out

    @property
    def constant_reduced_field(self) -> bool:
        return (isinstance(self.coupling, ConstantProfile)
                and isinstance(self.b1, ConstantProfile)
                and isinstance(self.b2, ConstantProfile))


def _integral_sum(b1, b2, t):
    return (interaction_integral(b1, 0.0, t)
            + interaction_integral(b2, 0.0, t))


def reduce_parallel(b1: ScalarProfile, b2: ScalarProfile,
                    coupling: ScalarProfile) -> ParallelReduction:
    """Reduce parallel z-fields to the one-spin problem in K(t)."""
    return ParallelReduction(b1=b1, b2=b2, coupling=coupling)


def solve_reduced(red: ParallelReduction, psi0, t: float,
                  frame: str = "bare",
                  cfg: oracle.IntegratorConfig | None = None) -> np.ndarray:
    """Middle-pair spinor at time t, from psi0 at time 0.

    ``frame="bare"`` solves i dpsi/dt = (sigma . K) psi; ``"primed"``
    additionally applies the phase that restores the -J/2 shift.
    Constant K uses the closed-form exponential, anything else the 2x2
    RK4 ladder.
    """
    if frame not in ("bare", "primed"):
        raise ValueError("frame must be 'bare' or 'primed'")
    psi0 = np.asarray(psi0, dtype=complex)
    if red.constant_reduced_field:
        psi = expm_pauli(red.reduced_field(0.0), t) @ psi0
    else:
        afun = lambda ts: -1j * np.einsum(
            "tc,cij->tij", np.atleast_2d(red.reduced_field(ts)), linalg.PAULI)
        raw, _ = oracle.integrate_generator(
            afun, 0.0, t, psi0[:, None],
            cfg or oracle.IntegratorConfig(rel_tol=1e-12, max_step=0.02))
        psi = raw[:, 0]
    if frame == "primed":
        psi = np.exp(1j * red.phase_factor(t)) * psi
    return psi


def assemble_parallel(red: ParallelReduction, c1: complex, c4: complex,
                      psi0, t: float,
                      cfg: oracle.IntegratorConfig | None = None) -> np.ndarray:
    """Four-spinor solution at time t from (c1, psi0, c4) at time 0.

    The outer components evolve by pure phases; the middle pair is the
    primed reduced spinor.
    """
    mid = solve_reduced(red, psi0, t, frame="primed", cfg=cfg)
    return np.array([c1 * red.v1_phase(t),
                     mid[0],
                     mid[1],
                     c4 * red.v4_phase(t)], dtype=complex)


def parallel_problem(red: ParallelReduction) -> TwoSpinProblem:
    """The full two-spin problem the reduction was made from."""
    from .model import ParallelZField
    return TwoSpinProblem(G=ParallelZField(red.b1),
                          F=ParallelZField(red.b2),
                          J=red.coupling)


def km_map(phi) -> np.ndarray:
    """Involutive map exchanging the x and z axes of the one-spin problem.

    Applying (sigma_x + sigma_z)/sqrt(2) carries solutions for the field
    (e, 0, f) into solutions for (f, 0, e).
    """
    return HADAMARD_LIKE @ np.asarray(phi, dtype=complex)


# ---------------------------------------------------------------------------
# rotating-frame reduction for two Rabi fields
# ---------------------------------------------------------------------------


def rotating_frame_reduce(f_params: RabiParams, phi1: float,
                          g_params: RabiParams, phi2: float,
                          j_coupling: float) -> RotatingFrameProblem:
    """Map two Rabi fields with a shared drive to a constant problem.

    ``f_params``/``phi1`` describe the second-spin field and
    ``g_params``/``phi2`` the first-spin field; both must share the
    drive frequency.  The output scales everything by that frequency.
    """
    if f_params.omega != g_params.omega:
        raise ValueError("both Rabi fields must share the drive frequency")
    omega = f_params.omega
    if omega == 0.0:
        raise ZeroDriveFrequency("rotating-frame reduction needs omega != 0")
    a = np.array([f_params.a_prime * np.cos(phi1),
                  f_params.a_prime * np.sin(phi1),
                  f_params.a0])
    b = np.array([g_params.a_prime * np.cos(phi2),
                  g_params.a_prime * np.sin(phi2),
                  g_params.a0])
    return RotatingFrameProblem(gamma=j_coupling / (2 * omega), a=a, b=b)


def to_time_dependent_problem(rf: RotatingFrameProblem,
                              omega: float) -> TwoSpinProblem:
    """Invert the reduction: rebuild the Rabi-field problem."""
    ax, ay, a0 = rf.a
    bx, by, b0 = rf.b
    f = RabiField(A=hypot(ax, ay) * omega, A0=(a0 + 0.5) * omega,
                  omega=omega, phi=atan2(ay, ax))
    g = RabiField(A=hypot(bx, by) * omega, A0=(b0 + 0.5) * omega,
                  omega=omega, phi=atan2(by, bx))
    return TwoSpinProblem(G=g, F=f,
                          J=ConstantProfile(2 * rf.gamma * omega))


def corotating_rotation(omega: float, t) -> np.ndarray:
    """exp(-i (omega t / 2) (SPIN1_z + SPIN2_z)): diagonal z-rotation."""
    wt = np.asarray(omega * t, dtype=float)
    out = np.zeros(wt.shape + (4, 4), dtype=complex)
    out[..., 0, 0] = np.exp(-1j * wt)
    out[..., 1, 1] = 1.0
    out[..., 2, 2] = 1.0
    out[..., 3, 3] = np.exp(1j * wt)
    return out


def rotating_frame_solution(rf: RotatingFrameProblem, lam: float, c,
                            omega: float, t,
                            atol: float = 1e-8) -> np.ndarray:
    """Time-dependent solution from a stationary eigenpair.

    Raises:
        NotAnEigenpair: if (lam, c) does not annihilate the stationary
            matrix to within ``atol``.
    """
    from .spectrum import build_D
    c = np.asarray(c, dtype=complex)
    defect = float(np.linalg.norm(build_D(rf.gamma, rf.a, rf.b, lam) @ c))
    if defect > atol:
        raise NotAnEigenpair(f"||D(lambda) C|| = {defect:.3e} > {atol:.1e}")
    t = np.asarray(t, dtype=float)
    phase = np.exp(-1j * lam * omega * t)
    out = phase[..., None] * (corotating_rotation(omega, t) @ c)
    return out


def rotating_frame_residual(rf: RotatingFrameProblem, lam: float, c,
                            omega: float, t: float) -> float:
    """Schroedinger residual of the reconstructed solution, analytic."""
    psi = rotating_frame_solution(rf, lam, c, omega, t)
    p = to_time_dependent_problem(rf, omega)
    from .model import field_at
    h = two_spin_matrix(field_at(p.G, t), field_at(p.F, t),
                        profile_value(p.J, t))
    i_dpsi = (lam * omega * psi
              + (omega / 2) * (SPIN1[2] + SPIN2[2]) @ psi)
    return linalg.max_abs(i_dpsi - h @ psi)
