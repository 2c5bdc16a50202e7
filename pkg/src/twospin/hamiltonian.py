"""One-spin and two-spin Hamiltonians at a time instant.

The two-spin Hamiltonian is

    H(G, F, J) = sum_i G_i SPIN1[i] + sum_i F_i SPIN2[i] + (J/2) EXCHANGE

with G acting on the first spin, F on the second, and J the exchange
coupling.  Conjugation by the swap matrix exchanges the two field
arguments: SWAP @ H(G, F, J) @ SWAP == H(F, G, J).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .linalg import EXCHANGE, SPIN1, SPIN2, SWAP
from .model import TwoSpinProblem, field_at, profile_value


@dataclass(frozen=True)
class HamiltonianSample:
    """A 4x4 Hamiltonian matrix evaluated at time t."""

    matrix: np.ndarray
    t: float


def one_spin_h(f) -> np.ndarray:
    """2x2 Hamiltonian sigma . f for a real 3-vector f."""
    f1, f2, f3 = np.asarray(f, dtype=float)
    return np.array([[f3, f1 - 1j * f2],
                     [f1 + 1j * f2, -f3]], dtype=complex)


def two_spin_matrix(g, f, j: float) -> np.ndarray:
    """4x4 Hamiltonian from instantaneous field vectors and coupling."""
    g = np.asarray(g, dtype=float)
    f = np.asarray(f, dtype=float)
    return (np.einsum("c,cij->ij", g, SPIN1)
            + np.einsum("c,cij->ij", f, SPIN2)
            + (j / 2.0) * EXCHANGE)


def two_spin_matrix_entrywise(g, f, j: float) -> np.ndarray:
    """Same matrix written out entry by entry (test cross-check path)."""
    g1, g2, g3 = np.asarray(g, dtype=float)
    f1, f2, f3 = np.asarray(f, dtype=float)
    jh = j / 2.0
    return np.array([
        [f3 + g3 + jh, f1 - 1j * f2, g1 - 1j * g2, 0],
        [f1 + 1j * f2, g3 - f3 - jh, j, g1 - 1j * g2],
        [g1 + 1j * g2, j, f3 - g3 - jh, f1 - 1j * f2],
        [0, g1 + 1j * g2, f1 + 1j * f2, jh - g3 - f3],
    ], dtype=complex)


def two_spin_H(p: TwoSpinProblem, t: float) -> HamiltonianSample:
    """Evaluate the problem Hamiltonian at time t."""
    g = field_at(p.G, t)
    f = field_at(p.F, t)
    j = profile_value(p.J, t)
    return HamiltonianSample(matrix=two_spin_matrix(g, f, j), t=float(t))


def hamiltonian_at(p: TwoSpinProblem, ts) -> np.ndarray:
    """Vectorized Hamiltonians: (len(ts), 4, 4) for an array of times."""
    ts = np.asarray(ts, dtype=float)
    g = np.atleast_2d(field_at(p.G, ts))
    f = np.atleast_2d(field_at(p.F, ts))
    j = np.atleast_1d(profile_value(p.J, ts))
    h = (np.einsum("tc,cij->tij", g, SPIN1)
         + np.einsum("tc,cij->tij", f, SPIN2)
         + np.multiply.outer(j / 2.0, EXCHANGE))
    return h if ts.ndim else h[0]


def check_swap(p: TwoSpinProblem, t: float) -> float:
    """Max-abs defect of SWAP-conjugation exchanging the two fields."""
    g = field_at(p.G, t)
    f = field_at(p.F, t)
    j = profile_value(p.J, t)
    lhs = SWAP @ two_spin_matrix(g, f, j) @ SWAP
    rhs = two_spin_matrix(f, g, j)
    return linalg.max_abs(lhs - rhs)
