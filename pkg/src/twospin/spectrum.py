"""Stationary spectrum for constant coupling and constant fields.

For the generator

    D0 = gamma * EXCHANGE + (SPIN2 . a) + (SPIN1 . b)

stationary solutions exp(-i lambda t) C exist exactly at the real roots
of the quartic characteristic polynomial d(lambda) = det(D0 - lambda I).
The quartic is available both expanded and in a factored form written in
terms of p = a + b and q = a - b; the two are evaluated independently
and agree to roundoff.

Roots come from companion-matrix eigenvalues (numpy.roots) with a
Newton polish.  Companion eigenvalues of an m-fold root scatter like
eps**(1/m), far too wide for the contracts here, so clusters of nearly
equal roots are re-polished on the (m-1)-th derivative of the quartic,
where the m-fold root is simple; the polished value is accepted only if
all lower derivatives vanish to tolerance, otherwise the cluster is
treated as distinct simple roots.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import EXCHANGE, ID4, SPIN1, SPIN2
from .model import stationary_basis

#: roots closer than this (times scale) are candidates for a multiple root
CLUSTER_TOL = 1e-3
#: derivative magnitudes below this (times scale power) confirm multiplicity
DERIV_TOL = 1e-8
#: singular values below this (times scale) count toward the null space
NULLSPACE_TOL = 1e-8


@dataclass(frozen=True)
class SpectralResult:
    """Roots, eigenvectors and diagnostics of the stationary problem.

    ``roots`` are ascending with multiplicity; ``vectors[i]`` is the
    unit eigenvector for ``roots[i]`` (an orthonormal null-space basis
    across a degenerate group).  ``quartic`` holds the five descending
    coefficients of d(lambda).
    """

    roots: np.ndarray
    vectors: np.ndarray
    quartic: np.ndarray
    poly_residuals: np.ndarray
    vector_residuals: np.ndarray
    scale: float


def problem_scale(gamma: float, a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(max(abs(gamma), np.linalg.norm(a), np.linalg.norm(b), 1.0))


def build_D(gamma: float, a, b, lam: float) -> np.ndarray:
    """The stationary matrix whose null vectors are the eigenstates."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return (gamma * EXCHANGE
            + np.einsum("c,cij->ij", a, SPIN2)
            + np.einsum("c,cij->ij", b, SPIN1)
            - lam * ID4)


def quartic_d(gamma: float, a, b) -> np.ndarray:
    """Descending coefficients of d(lambda), expanded form."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a2, b2, ab = a @ a, b @ b, a @ b
    g2 = gamma * gamma
    return np.array([
        1.0,
        0.0,
        -2.0 * (a2 + b2 + 3.0 * g2),
        8.0 * gamma * (g2 - ab),
        -3.0 * g2 * g2 + 2.0 * g2 * (a2 + b2 + 4.0 * ab) + (a2 - b2) ** 2,
    ])


def quartic_factored_eval(gamma: float, a, b, lam) -> np.ndarray:
    """d(lambda) from the factored p/q form; vectorized over lam."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    lam = np.asarray(lam, dtype=float)
    p, q = a + b, a - b
    p2, q2, pq = p @ p, q @ q, p @ q
    g2 = gamma * gamma
    val = (((lam + gamma) ** 2 - 4.0 * g2 - q2)
           * ((lam - gamma) ** 2 - p2)
           - p2 * q2 + pq * pq)
    return float(val) if val.ndim == 0 else val


def quartic_factored_coeffs(gamma: float, a, b) -> np.ndarray:
    """Descending coefficients obtained by expanding the factored form."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p, q = a + b, a - b
    p2, q2, pq = p @ p, q @ q, p @ q
    g2 = gamma * gamma
    quad1 = np.array([1.0, 2.0 * gamma, g2 - 4.0 * g2 - q2])
    quad2 = np.array([1.0, -2.0 * gamma, g2 - p2])
    coeffs = np.polymul(quad1, quad2)
    coeffs[-1] += -p2 * q2 + pq * pq
    return coeffs


def _newton(coeffs, x: float, steps: int = 3) -> float:
    der = np.polyder(coeffs)
    for _ in range(steps):
        slope = np.polyval(der, x)
        if slope == 0.0:
            break
        x = x - np.polyval(coeffs, x) / slope
    return x


def _polish_multiple(coeffs, m: int, center: float, radius: float,
                     scale: float):
    """Try to place an m-fold root near ``center``; None if implausible."""
    reduced = np.polyder(coeffs, m - 1)
    cands = np.roots(reduced)
    cands = cands[np.abs(cands.imag) < 1e-6 * scale].real
    if cands.size == 0:
        return None
    lam = float(cands[np.argmin(np.abs(cands - center))])
    lam = _newton(reduced, lam)
    if abs(lam - center) > max(4.0 * radius, 1e-6 * scale):
        return None
    d_k = coeffs
    for k in range(m):
        if abs(np.polyval(d_k, lam)) > DERIV_TOL * scale ** (4 - k):
            return None
        d_k = np.polyder(d_k)
    return lam


def _root_clusters(roots: np.ndarray, scale: float):
    clusters, current = [], [0]
    for i in range(1, len(roots)):
        if roots[i] - roots[i - 1] <= CLUSTER_TOL * scale:
            current.append(i)
        else:
            clusters.append(current)
            current = [i]
    clusters.append(current)
    return clusters


def solve_levels(gamma: float, a, b) -> SpectralResult:
    """All four stationary levels with eigenvectors and diagnostics."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scale = problem_scale(gamma, a, b)
    coeffs = quartic_d(gamma, a, b)

    raw = np.sort(np.roots(coeffs).real)
    polished = []
    for idx in _root_clusters(raw, scale):
        members = raw[idx]
        if len(members) == 1:
            polished.append(_newton(coeffs, float(members[0])))
            continue
        center = float(members.mean())
        radius = float(members.max() - members.min()) / 2 + np.finfo(float).eps
        lam = _polish_multiple(coeffs, len(members), center, radius, scale)
        if lam is None:
            polished.extend(_newton(coeffs, float(x)) for x in members)
        else:
            polished.extend([lam] * len(members))
    roots = np.sort(np.asarray(polished))

    vectors = np.zeros((4, 4), dtype=complex)
    vec_res = np.zeros(4)
    i = 0
    while i < 4:
        j = i
        while j + 1 < 4 and roots[j + 1] - roots[i] <= 1e-7 * scale:
            j += 1
        lam = float(roots[i:j + 1].mean())
        mult = j - i + 1
        d_mat = build_D(gamma, a, b, lam)
        _, _, vh = np.linalg.svd(d_mat)
        basis = np.conj(vh[-mult:])[::-1]
        for k, vec in enumerate(basis):
            vec = _fix_phase(vec)
            vectors[i + k] = vec
            vec_res[i + k] = float(np.linalg.norm(d_mat @ vec))
        i = j + 1

    poly_res = np.abs(np.polyval(coeffs, roots))
    return SpectralResult(roots=roots, vectors=vectors, quartic=coeffs,
                          poly_residuals=poly_res, vector_residuals=vec_res,
                          scale=scale)


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    for c in vec:
        if abs(c) > 1e-8:
            return vec * (np.conj(c) / abs(c))
    return vec


def stationary_rabi(j_coupling: float, a0: float):
    """Levels and states for equal constant z-fields of strength a0.

    The z-only case of the equal-Rabi problem: the triplet/singlet basis
    diagonalizes the Hamiltonian with levels J/2 + 2*A0, J/2, -3J/2 and
    J/2 - 2*A0, in basis order.
    """
    levels = np.array([j_coupling / 2 + 2 * a0,
                       j_coupling / 2,
                       -1.5 * j_coupling,
                       j_coupling / 2 - 2 * a0])
    basis = stationary_basis().vectors
    return [(float(levels[i]), basis[i].copy()) for i in range(4)]
