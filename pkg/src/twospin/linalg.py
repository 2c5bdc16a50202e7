"""Dense 2x2 / 4x4 complex linear algebra and the fixed spin matrices.

Conventions used throughout the package (hbar = 1):

* One-spin basis: spin-up = (1, 0), spin-down = (0, 1).
* Two-spin product basis, index mu = 1..4:
  up*up, up*down, down*up, down*down.  The *first* Kronecker factor is
  the first spin, so ``kron(m, I)`` acts on spin 1 and ``kron(I, m)``
  acts on spin 2.  This matches ``numpy.kron`` ordering.
* ``SPIN1[i] = kron(sigma_i, I)`` and ``SPIN2[i] = kron(I, sigma_i)``
  are the Pauli vectors of the two spins; ``EXCHANGE`` is the scalar
  product ``sum_i SPIN1[i] @ SPIN2[i]``, whose eigenvalues are +1
  (triplet, threefold) and -3 (singlet).
* ``SWAP = (I + EXCHANGE) / 2`` is the involutory permutation that
  exchanges the two spins.

All matrices are ``complex128`` ndarrays; all functions are pure.
"""

from __future__ import annotations

import numpy as np

from .errors import NonHermitianInput

# Default tolerances: algebraic identities and Hermiticity checks.
ATOL_ALGEBRA = 1e-12
ATOL_HERMITIAN = 1e-10

ID2 = np.eye(2, dtype=complex)
ID4 = np.eye(4, dtype=complex)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = np.stack([SX, SY, SZ])


def kron(lhs: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Kronecker product with the first factor acting on the first spin."""
    return np.kron(lhs, rhs)


SPIN1 = np.stack([kron(s, ID2) for s in PAULI])
SPIN2 = np.stack([kron(ID2, s) for s in PAULI])
EXCHANGE = sum(kron(s, s) for s in PAULI)
SWAP = (ID4 + EXCHANGE) / 2


def swap_matrix() -> np.ndarray:
    """The 4x4 spin-exchange permutation (a fresh copy of ``SWAP``)."""
    return SWAP.copy()


def max_abs(m: np.ndarray) -> float:
    """Max-abs-entry norm, the equality metric used by every contract."""
    return float(np.abs(np.asarray(m)).max())


def hermiticity_defect(m: np.ndarray) -> float:
    return max_abs(m - np.conj(np.swapaxes(m, -1, -2)))


def unitarity_defect(u: np.ndarray) -> float:
    u = np.asarray(u)
    eye = np.eye(u.shape[-1], dtype=complex)
    return max_abs(np.conj(np.swapaxes(u, -1, -2)) @ u - eye)


def expm_skew_hermitian(h: np.ndarray, t: float = 1.0, *,
                        atol: float = ATOL_HERMITIAN) -> np.ndarray:
    """exp(-i h t) for Hermitian h, via eigendecomposition.

    The eigendecomposition route keeps the result unitary to roundoff,
    which scaling-and-squaring does not guarantee.

    Raises:
        NonHermitianInput: if ``h`` deviates from Hermiticity by more
            than ``atol`` in max-abs norm.
    """
    h = np.asarray(h, dtype=complex)
    defect = hermiticity_defect(h)
    if defect > atol:
        raise NonHermitianInput(
            f"Hermiticity defect {defect:.3e} exceeds tolerance {atol:.3e}")
    w, v = np.linalg.eigh(h)
    phases = np.exp(-1j * np.multiply.outer(np.asarray(t), w))
    return (v * phases[..., None, :]) @ np.conj(v.T)


def sinc(x):
    """sin(x)/x with a series branch below |x| < 1e-6."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-6
    safe = np.where(small, 1.0, x)
    out = np.where(small, 1.0 - x * x / 6.0, np.sin(safe) / safe)
    if out.ndim == 0:
        return float(out)
    return out
