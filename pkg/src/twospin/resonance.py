"""Transition probabilities and resonance scans for the equal-Rabi pair.

In the triplet/singlet basis, the equal-Rabi propagator factors into a
coupling phase times a product of one-spin amplitudes, so the singlet
never mixes (total angular momentum is conserved) and all transition
probabilities are independent of the coupling.  The pair-flip
probability (both-up to both-down) peaks at drive frequency 2*A0 with
maximum 1; the single-flip transitions out of the symmetric middle
state peak at 1/2 both there and at 2*(A0 - A).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ClosedFormMismatch
from .model import ConstantProfile, stationary_basis
from .propagators import (RabiParams, equal_rabi_matrices, prop_equal_rabi,
                          rabi_frame_u, rabi_one_spin)

#: dual-route agreement for matrix elements
ELEMENT_TOL = 1e-10
#: analytic vs grid maxima agreement
MAX_AGREEMENT_TOL = 1e-6


def transition_prefactor(rp: RabiParams) -> float:
    """Amplitude of the one-spin transition probability envelope."""
    r2 = rp.a_prime ** 2 + rp.a0 ** 2
    if r2 < 1e-28:
        return 0.0
    return rp.a_prime ** 2 / r2


def rabi_probability(rp: RabiParams, t) -> float:
    """One-spin flip probability at time t (vectorized over t)."""
    t = np.asarray(t, dtype=float)
    out = transition_prefactor(rp) * np.sin(rp.omega_R * t) ** 2
    return float(out) if out.ndim == 0 else out


def _product_elements(rp: RabiParams, j_coupling: float, ts):
    """Pair amplitudes from one-spin amplitudes; vectorized over ts.

    Returns (flip_both, from_mid_to_top, from_mid_to_bottom) where the
    names refer to transitions both-up->both-down, mid->both-up and
    mid->both-down read off the propagator columns.
    """
    ts = np.asarray(ts, dtype=float)
    u = rabi_frame_u(rp, ts)
    phase = np.exp(-0.5j * j_coupling * ts)
    e41 = phase * u[..., 1, 0] ** 2
    e21 = np.sqrt(2) * phase * u[..., 0, 0] * u[..., 1, 0]
    e24 = np.sqrt(2) * phase * u[..., 0, 1] * u[..., 1, 1]
    return e41, e21, e24


def two_spin_elements(rp: RabiParams, j_coupling: float, t: float,
                      check: bool = True) -> np.ndarray:
    """Propagator matrix elements in the triplet/singlet basis.

    ``result[j, i]`` is <basis_j | R_t | basis_i>.  With ``check`` the
    relevant entries are recomputed from products of one-spin
    amplitudes and both routes must agree to ELEMENT_TOL; the singlet
    row and column must vanish off the diagonal.
    """
    basis = stationary_basis().vectors
    r = prop_equal_rabi(rp, ConstantProfile(j_coupling), 0.0, t).matrix
    m = basis.conj() @ r @ basis.T
    if check:
        e41, e21, e24 = _product_elements(rp, j_coupling, t)
        diffs = (abs(m[3, 0] - e41), abs(m[1, 0] - e21), abs(m[1, 3] - e24))
        if max(diffs) > ELEMENT_TOL:
            raise ClosedFormMismatch(
                f"product vs direct elements differ by {max(diffs):.3e}")
        leak = max(abs(m[2, k]) for k in (0, 1, 3))
        leak = max(leak, max(abs(m[k, 2]) for k in (0, 1, 3)))
        if leak > ELEMENT_TOL:
            raise ClosedFormMismatch(f"singlet sector leaks {leak:.3e}")
    return m


@dataclass(frozen=True)
class ResonancePair:
    """The two drive frequencies at which transitions peak."""

    omega1: float
    omega2: float
    omega2_degenerate: bool


def resonance_frequencies(a_amp: float, a0: float) -> ResonancePair:
    """Peak drive frequencies 2*A0 and 2*(A0 - A)."""
    omega2 = 2.0 * (a0 - a_amp)
    return ResonancePair(omega1=2.0 * a0, omega2=omega2,
                         omega2_degenerate=abs(omega2) < 1e-12)


# ---------------------------------------------------------------------------
# frequency scans
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScanRow:
    omega: float
    p14_max: float
    p21_max: float
    p24_max: float
    p3_leak: float
    t14: float
    t21: float
    t24: float


@dataclass(frozen=True)
class ScanResult:
    rows: list

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])


def _analytic_maxima(rp: RabiParams):
    """Peak values and first peak times of the three probabilities.

    The pair-flip probability is (rho * s)^2 and the single-flip ones
    are 2 rho s (1 - rho s) with s = sin^2(omega_R t) in [0, 1], so the
    maxima over t follow from one-dimensional calculus in s.
    """
    rho = transition_prefactor(rp)
    w = rp.omega_R
    if w <= 0.0 or rho == 0.0:
        return (0.0, 0.0), (0.0, 0.0)
    quarter = np.pi / (2 * w)
    p14 = (rho ** 2, quarter)
    if rho >= 0.5:
        s_star = 1.0 / (2 * rho)
        p2x = (0.5, float(np.arcsin(np.sqrt(s_star)) / w))
    else:
        p2x = (2 * rho * (1 - rho), quarter)
    return p14, p2x


def _refine_peak(ts, vals, evaluate):
    """Parabolic refinement of a grid argmax; returns (value, t)."""
    i = int(np.argmax(vals))
    best_v, best_t = float(vals[i]), float(ts[i])
    if 0 < i < len(ts) - 1:
        denom = vals[i - 1] - 2 * vals[i] + vals[i + 1]
        if denom < 0:
            dt = 0.5 * (vals[i - 1] - vals[i + 1]) / denom * (ts[1] - ts[0])
            t_ref = float(ts[i] + dt)
            v_ref = float(evaluate(t_ref))
            if v_ref > best_v:
                best_v, best_t = v_ref, t_ref
    return best_v, best_t


def _scan_row(a_amp: float, a0: float, j_coupling: float, omega: float,
              t_horizon: float | None, t_samples: int,
              check: bool) -> ScanRow:
    rp = RabiParams(A=a_amp, A0=a0, omega=omega)
    basis = stationary_basis().vectors
    if rp.omega_R <= 0.0:
        return ScanRow(omega, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    horizon = t_horizon if t_horizon is not None else 4 * np.pi / rp.omega_R
    ts = np.linspace(0.0, horizon, t_samples)

    mats = equal_rabi_matrices(rp, j_coupling, ts)
    elems = np.einsum("ja,tab,ib->tji", basis.conj(), mats, basis)
    probs = np.abs(elems) ** 2

    def direct(j, i):
        def evaluate(t):
            m = two_spin_elements(rp, j_coupling, t, check=False)
            return abs(m[j, i]) ** 2
        return evaluate

    g14 = _refine_peak(ts, probs[:, 3, 0], direct(3, 0))
    g21 = _refine_peak(ts, probs[:, 1, 0], direct(1, 0))
    g24 = _refine_peak(ts, probs[:, 1, 3], direct(1, 3))
    leak = float(max(probs[:, 2, [0, 1, 3]].max(),
                     probs[:, [0, 1, 3], 2].max()))

    (a14, t14), (a2x, t2x) = _analytic_maxima(rp)
    if check:
        for name, grid, ana in (("p14", g14[0], a14), ("p21", g21[0], a2x),
                                ("p24", g24[0], a2x)):
            if abs(grid - ana) > MAX_AGREEMENT_TOL:
                raise ClosedFormMismatch(
                    f"{name} analytic/grid maxima differ: {ana} vs {grid} "
                    f"at omega={omega}")
    return ScanRow(omega=omega, p14_max=a14, p21_max=a2x, p24_max=a2x,
                   p3_leak=leak, t14=t14, t21=t2x, t24=t2x)


def _thread_count(threads: int | None) -> int:
    if threads is None:
        env = os.environ.get("TWOSPIN_THREADS", "0")
        try:
            threads = int(env)
        except ValueError:
            threads = 0
    if threads == 0:
        threads = min(8, os.cpu_count() or 1)
    return max(1, threads)


def scan(a_amp: float, a0: float, j_coupling: float, omega_grid,
         t_horizon: float | None = None, t_samples: int = 2048,
         threads: int | None = None, check: bool = True) -> ScanResult:
    """Maximal transition probabilities over a drive-frequency grid.

    Rows are independent and may be evaluated concurrently
    (TWOSPIN_THREADS caps the pool, 0 = auto); the result order always
    follows the input grid.
    """
    omegas = [float(w) for w in np.asarray(omega_grid, dtype=float)]
    if any(w == 0.0 for w in omegas):
        raise ValueError("omega grid must exclude 0")

    def work(w):
        return _scan_row(a_amp, a0, j_coupling, w, t_horizon, t_samples,
                         check)

    n = _thread_count(threads)
    if n > 1 and len(omegas) > 1:
        with ThreadPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(work, omegas))
    else:
        rows = [work(w) for w in omegas]
    return ScanResult(rows=rows)
