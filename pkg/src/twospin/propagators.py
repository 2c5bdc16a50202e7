"""Closed-form evolution operators for the exactly solvable configurations.

Families covered:

* free interaction (no external fields, arbitrary coupling J(t)),
* two noninteracting spins in independently solvable fields,
* equal fields for both spins with arbitrary J(t),
* constant parallel z-fields with constant coupling,
* one spin in a rotating (Rabi) field, alone or as the second spin,
* both spins in the same Rabi field with arbitrary J(t).

Every propagator is unitary and reduces to the identity over an empty
time interval.  Each carries a ``method`` label naming the closed form
used, so front ends can report the dispatch decision.

The Rabi propagator is computed from the rotating-frame exponential,
which is the numerically robust form; the textbook expression built
from the alpha/a' coefficients is evaluated alongside it and any
disagreement beyond 1e-10 raises rather than silently picking a side
(the two are algebraically identical, so this never fires on valid
input).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg, oracle
from .errors import ClosedFormMismatch, DegenerateDenominator, NoClosedForm
from .hamiltonian import hamiltonian_at, one_spin_h
from .linalg import ID2, ID4, SPIN1, SPIN2, SWAP, SX, SY, SZ, kron, sinc
from .model import (ConstantField, ConstantProfile, FieldSpec, ParallelZField,
                    RabiField, ScalarProfile, TwoSpinProblem, ZeroField,
                    field_at, interaction_integral)

#: mismatch threshold between algebraically identical closed forms
CROSS_CHECK_TOL = 1e-10


@dataclass(frozen=True)
class Propagator:
    """A 4x4 evolution operator on [t0, t1] with its construction label."""

    matrix: np.ndarray
    t0: float
    t1: float
    method: str
    stats: dict = field(default_factory=dict)

    @property
    def unitarity_defect(self) -> float:
        return linalg.unitarity_defect(self.matrix)


@dataclass(frozen=True)
class RabiParams:
    """Rotating-field parameters (A cos wt, A sin wt, A0) and deriveds.

    ``omega_R`` is the oscillation rate of the transition probability;
    ``a_prime``, ``a0`` and ``alpha`` are the dimensionless combinations
    entering the textbook closed form.
    """

    A: float
    A0: float
    omega: float

    def __post_init__(self):
        if self.omega == 0.0:
            from .errors import ZeroDriveFrequency
            raise ZeroDriveFrequency("Rabi parameters require omega != 0")

    @property
    def a_prime(self) -> float:
        return self.A / self.omega

    @property
    def a0(self) -> float:
        return self.A0 / self.omega - 0.5

    @property
    def omega_R(self) -> float:
        return float(np.hypot(self.A, self.A0 - self.omega / 2))

    @property
    def alpha(self) -> float:
        return self.a0 - self.omega_R / self.omega

    @property
    def detuning(self) -> float:
        """z-component of the rotating-frame generator, A0 - omega/2."""
        return self.A0 - self.omega / 2


# ---------------------------------------------------------------------------
# one-spin building blocks
# ---------------------------------------------------------------------------


def expm_pauli(n, t: float) -> np.ndarray:
    """exp(-i (sigma . n) t) for a real 3-vector n, in closed form."""
    n = np.asarray(n, dtype=float)
    mag = float(np.linalg.norm(n))
    return (np.cos(mag * t) * ID2
            - 1j * t * sinc(mag * t) * one_spin_h(n))


def _rz(theta) -> np.ndarray:
    """exp(-i sigma_z theta / 2)."""
    theta = np.asarray(theta, dtype=float)
    ph = np.exp(-0.5j * theta)
    out = np.zeros(theta.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = ph
    out[..., 1, 1] = np.conj(ph)
    return out


def rabi_frame_u(rp: RabiParams, t) -> np.ndarray:
    """Rotating-frame form of the Rabi propagator from time 0 to t.

    u(t) = exp(-i sigma_z w t / 2) exp(-i [A sigma_x + (A0 - w/2) sigma_z] t);
    vectorized over t.
    """
    t = np.asarray(t, dtype=float)
    theta = rp.omega_R * t
    gen = rp.A * SX + rp.detuning * SZ
    w = (np.cos(theta)[..., None, None] * ID2
         - 1j * (t * sinc(theta))[..., None, None] * gen)
    return _rz(rp.omega * t) @ w


def rabi_literal_u(rp: RabiParams, t) -> np.ndarray:
    """Textbook closed form of the Rabi propagator from 0 to t.

    Raises:
        DegenerateDenominator: when alpha^2 + a'^2 underflows (A = 0
            with matching sign conventions); use the frame form then.
    """
    den = rp.alpha ** 2 + rp.a_prime ** 2
    if den < 1e-14:
        raise DegenerateDenominator(
            "alpha^2 + a'^2 vanished; the rotating-frame form is exact here")
    t = np.asarray(t, dtype=float)
    theta = rp.omega_R * t
    m = rp.alpha * ID2 - 1j * rp.a_prime * SY
    core = (m @ m) @ (1j * SZ) / den
    bracket = (np.cos(theta)[..., None, None] * ID2
               + np.sin(theta)[..., None, None] * core)
    return _rz(rp.omega * t) @ bracket


def rabi_one_spin(rp: RabiParams, t: float, check: bool = True) -> np.ndarray:
    """2x2 Rabi propagator from time 0 to t.

    Returns the rotating-frame form; with ``check`` the textbook form is
    also evaluated and a disagreement beyond CROSS_CHECK_TOL raises
    ClosedFormMismatch.
    """
    u = rabi_frame_u(rp, t)
    if check:
        try:
            lit = rabi_literal_u(rp, t)
        except DegenerateDenominator:
            return u
        diff = linalg.max_abs(lit - u)
        if diff > CROSS_CHECK_TOL:
            raise ClosedFormMismatch(
                f"Rabi closed forms disagree by {diff:.3e} for {rp}")
    return u


def one_spin_propagator(f: FieldSpec, t0: float, t1: float,
                        allow_oracle: bool = False) -> np.ndarray:
    """2x2 propagator of i dpsi/dt = (sigma . f(t)) psi on [t0, t1]."""
    if isinstance(f, ZeroField):
        return ID2.copy()
    if isinstance(f, ConstantField):
        return expm_pauli(f.vector, t1 - t0)
    if isinstance(f, RabiField):
        rp = RabiParams(f.A, f.A0, f.omega)
        u = rabi_one_spin(rp, t1) @ rabi_one_spin(rp, t0).conj().T
        if f.phi:
            half = _rz(np.asarray(f.phi))
            u = half @ u @ half.conj().T
        return u
    if isinstance(f, ParallelZField):
        theta = interaction_integral(f.profile, t0, t1)
        return np.diag([np.exp(-1j * theta), np.exp(1j * theta)])
    if allow_oracle:
        u, _ = oracle.integrate_generator(
            lambda ts: -1j * _one_spin_matrices(f, ts), t0, t1, ID2)
        return u
    raise NoClosedForm(f"no closed-form one-spin propagator for {f!r}")


def _one_spin_matrices(f: FieldSpec, ts) -> np.ndarray:
    comps = np.atleast_2d(field_at(f, ts))
    return np.einsum("tc,cij->tij", comps, linalg.PAULI)


# ---------------------------------------------------------------------------
# closed-form two-spin families
# ---------------------------------------------------------------------------


def free_interaction_matrix(phi) -> np.ndarray:
    """Propagator of the pure-exchange problem as a function of the
    accumulated coupling integral ``phi``; vectorized."""
    phi = np.asarray(phi, dtype=float)
    return (np.exp(0.5j * phi)[..., None, None]
            * (np.cos(phi)[..., None, None] * ID4
               - 1j * np.sin(phi)[..., None, None] * SWAP))


def prop_free_interaction(J: ScalarProfile, t0: float, t1: float) -> Propagator:
    """Two coupled spins with no external fields."""
    phi = interaction_integral(J, t0, t1)
    return Propagator(matrix=free_interaction_matrix(phi), t0=t0, t1=t1,
                      method="free_interaction", stats={"coupling_integral": phi})


def prop_noninteracting(G: FieldSpec, F: FieldSpec, t0: float, t1: float,
                        allow_oracle: bool = False) -> Propagator:
    """Uncoupled spins: the Kronecker product of one-spin propagators."""
    u_g = one_spin_propagator(G, t0, t1, allow_oracle)
    u_f = one_spin_propagator(F, t0, t1, allow_oracle)
    return Propagator(matrix=kron(u_g, u_f), t0=t0, t1=t1,
                      method="noninteracting_product")


def prop_equal_fields(G: FieldSpec, J: ScalarProfile, t0: float, t1: float,
                      allow_oracle: bool = False) -> Propagator:
    """Both spins in the same field G with arbitrary coupling J(t).

    The exchange operator commutes with every total-spin rotation, so
    the propagator factors exactly into the free-interaction part times
    the noninteracting equal-field product.
    """
    u_g = one_spin_propagator(G, t0, t1, allow_oracle)
    phi = interaction_integral(J, t0, t1)
    m = free_interaction_matrix(phi) @ kron(u_g, u_g)
    return Propagator(matrix=m, t0=t0, t1=t1,
                      method="equal_fields_composition",
                      stats={"coupling_integral": phi})


def prop_constant_parallel(gamma: float, a: float, b: float,
                           tau: float) -> Propagator:
    """Constant coupling J = 2*gamma with constant z-fields.

    ``a`` is the z-field on the first spin and ``b`` on the second;
    the generator is gamma*EXCHANGE + a*SPIN1_z + b*SPIN2_z.  The
    sin(Omega tau)/Omega factor is series-evaluated near Omega = 0.
    """
    p, q = a + b, a - b
    big_omega = float(np.hypot(2 * gamma, q))
    z1, z2 = SPIN1[2], SPIN2[2]
    zz = z1 @ z2
    planar = SPIN1[0] @ SPIN2[0] + SPIN1[1] @ SPIN2[1]
    term_sym = ((ID4 + zz) * np.cos(p * tau)
                - 1j * (z1 + z2) * np.sin(p * tau)) * np.exp(-1j * gamma * tau)
    sin_over = tau * sinc(big_omega * tau)
    term_mix = ((ID4 - zz) * np.cos(big_omega * tau)
                - 1j * (q * (z1 - z2) + 2 * gamma * planar) * sin_over
                ) * np.exp(1j * gamma * tau)
    return Propagator(matrix=(term_sym + term_mix) / 2, t0=0.0, t1=tau,
                      method="constant_parallel")


def rabi_rotation_4x4(rp: RabiParams, t: float, spin: int) -> Propagator:
    """Rabi propagator acting on one spin of the pair, as a 4x4 matrix.

    Built directly from the 4x4 spin operators (the alpha/a' closed
    form); ``spin`` selects which spin carries the rotating field.
    """
    ops = SPIN2 if spin == 2 else SPIN1
    den = rp.alpha ** 2 + rp.a_prime ** 2
    if den < 1e-14:
        raise DegenerateDenominator("use the kron of the frame form instead")
    theta = rp.omega_R * t
    m = rp.alpha * ID4 - 1j * rp.a_prime * ops[1]
    bracket = (np.cos(theta) * ID4
               + np.sin(theta) * (m @ m) @ (1j * ops[2]) / den)
    zrot = linalg.expm_skew_hermitian(ops[2], rp.omega * t / 2)
    return Propagator(matrix=zrot @ bracket, t0=0.0, t1=t,
                      method=f"rabi_rotation_spin{spin}")


def prop_rabi_second_spin(rp: RabiParams, t: float) -> Propagator:
    """First spin free, second spin in the Rabi field."""
    return Propagator(matrix=kron(ID2, rabi_one_spin(rp, t)), t0=0.0, t1=t,
                      method="rabi_second_spin")


def prop_equal_rabi(rp: RabiParams, J: ScalarProfile, t0: float,
                    t: float) -> Propagator:
    """Both spins in the same Rabi field with arbitrary coupling J(t)."""
    u = rabi_one_spin(rp, t, check=False)
    if t0 != 0.0:
        u = u @ rabi_one_spin(rp, t0, check=False).conj().T
    phi = interaction_integral(J, t0, t)
    m = free_interaction_matrix(phi) @ kron(u, u)
    return Propagator(matrix=m, t0=t0, t1=t,
                      method="equal_rabi_composition",
                      stats={"coupling_integral": phi})


def equal_rabi_matrices(rp: RabiParams, j_value: float, ts) -> np.ndarray:
    """Vectorized equal-Rabi propagators from 0 to each t: (len(ts),4,4).

    Constant coupling only; used by resonance scans.
    """
    ts = np.asarray(ts, dtype=float)
    u = rabi_frame_u(rp, ts)
    uu = np.einsum("tab,tcd->tacbd", u, u).reshape(ts.shape + (4, 4))
    return free_interaction_matrix(j_value * ts) @ uu


# ---------------------------------------------------------------------------
# reparameterization property
# ---------------------------------------------------------------------------


def reparameterize_check(p: TwoSpinProblem, time_map, time_map_dot, t: float,
                         psi0=None, h: float = 1e-4,
                         cfg: oracle.IntegratorConfig | None = None) -> float:
    """Residual of the time-reparameterized solution at time t.

    If Psi solves the problem, Psi(time_map(t)) solves the problem whose
    fields and coupling are scaled by time_map_dot and evaluated at
    time_map(t).  The base solution comes from the RK4 oracle; the
    returned value is the max-abs Schroedinger residual of the
    composed candidate, evaluated by 5-point central differences.
    """
    if psi0 is None:
        psi0 = np.full(4, 0.5, dtype=complex)
    if cfg is None:
        cfg = oracle.IntegratorConfig(rel_tol=1e-12, max_step=0.05)
    offsets = (-2, -1, 0, 1, 2)
    s_values = {k: float(time_map(t + k * h)) for k in offsets}

    afun = lambda ts: -1j * hamiltonian_at(p, ts)
    vals = {}
    psi, s_prev = np.asarray(psi0, dtype=complex), p.t0
    for k in sorted(offsets, key=lambda k: s_values[k]):
        raw, _ = oracle.integrate_generator(afun, s_prev, s_values[k],
                                            psi[:, None], cfg)
        psi, s_prev = raw[:, 0], s_values[k]
        vals[k] = psi

    dpsi = (vals[-2] - 8 * vals[-1] + 8 * vals[1] - vals[2]) / (12 * h)
    h_scaled = time_map_dot(t) * hamiltonian_at(p, s_values[0])
    return linalg.max_abs(1j * dpsi - h_scaled @ vals[0])
