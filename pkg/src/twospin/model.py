"""Problem description: external fields, exchange coupling, initial data.

Fields are real 3-vectors in units of inverse time (hbar = 1); the
exchange coupling is a real scalar of the same dimension.  Only real
field components are supported so that every Hamiltonian is Hermitian
and every propagator unitary.

Time-dependent scalars (the coupling J(t) and the parallel-field
profiles) are either constants or sampled profiles; sampled profiles
interpolate with a monotone cubic by default (``interp="linear"`` for
piecewise-linear) and refuse evaluation outside their knot span.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import OutOfRange, ZeroDriveFrequency
from . import linalg

# ---------------------------------------------------------------------------
# scalar profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstantProfile:
    """A time-independent scalar."""

    value: float


@dataclass(frozen=True)
class SampledProfile:
    """Scalar samples on strictly increasing knots.

    interp: "cubic" (monotone cubic, default) or "linear".
    """

    knots: tuple            # ((t0, v0), (t1, v1), ...)
    interp: str = "cubic"

    def __post_init__(self):
        ts = np.array([t for t, _ in self.knots], dtype=float)
        if len(ts) < 2:
            raise ValueError("sampled profile needs at least 2 knots")
        if not np.all(np.diff(ts) > 0):
            raise ValueError("sample knots must be strictly increasing in t")
        if self.interp not in ("cubic", "linear"):
            raise ValueError(f"unknown interpolation rule {self.interp!r}")

    def _arrays(self):
        ts = np.array([t for t, _ in self.knots], dtype=float)
        vs = np.array([v for _, v in self.knots], dtype=float)
        return ts, vs


ScalarProfile = ConstantProfile | SampledProfile


def profile_value(p: ScalarProfile, t):
    """Evaluate a scalar profile at scalar or array ``t``."""
    t = np.asarray(t, dtype=float)
    if isinstance(p, ConstantProfile):
        out = np.full(t.shape, p.value)
        return float(out) if out.ndim == 0 else out
    ts, vs = p._arrays()
    pad = 1e-12 * max(1.0, ts[-1] - ts[0])
    if np.any(t < ts[0] - pad) or np.any(t > ts[-1] + pad):
        raise OutOfRange(
            f"t outside sample span [{ts[0]}, {ts[-1]}]")
    tc = np.clip(t, ts[0], ts[-1])
    if p.interp == "linear":
        out = np.interp(tc, ts, vs)
    else:
        out = PchipInterpolator(ts, vs)(tc)
    return float(out) if out.ndim == 0 else out


def profile_span(p: ScalarProfile):
    """(t_min, t_max) over which the profile can be evaluated."""
    if isinstance(p, ConstantProfile):
        return (-np.inf, np.inf)
    ts, _ = p._arrays()
    return (float(ts[0]), float(ts[-1]))


def interaction_integral(p: ScalarProfile, t0: float, t: float) -> float:
    """Integral of the profile from t0 to t.

    Exact for constants.  Sampled profiles use composite Simpson with
    one panel per knot interval, which integrates the piecewise-cubic
    interpolant exactly (Simpson is exact on cubics).
    """
    if isinstance(p, ConstantProfile):
        return p.value * (t - t0)
    lo, hi = (t0, t) if t >= t0 else (t, t0)
    sign = 1.0 if t >= t0 else -1.0
    ts, _ = p._arrays()
    pad = 1e-12 * max(1.0, ts[-1] - ts[0])
    if lo < ts[0] - pad or hi > ts[-1] + pad:
        raise OutOfRange(f"[{lo}, {hi}] outside sample span [{ts[0]}, {ts[-1]}]")
    if hi == lo:
        return 0.0
    interior = ts[(ts > lo) & (ts < hi)]
    edges = np.concatenate(([lo], interior, [hi]))
    mids = (edges[:-1] + edges[1:]) / 2
    widths = np.diff(edges)
    f_edges = profile_value(p, edges)
    f_mids = profile_value(p, mids)
    total = np.sum(widths / 6.0 * (f_edges[:-1] + 4.0 * f_mids + f_edges[1:]))
    return sign * float(total)


# ---------------------------------------------------------------------------
# external fields
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroField:
    """No external field."""


@dataclass(frozen=True)
class ConstantField:
    """A constant 3-vector field."""

    vector: tuple

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=float)
        if v.shape != (3,):
            raise ValueError("constant field needs a real 3-vector")
        object.__setattr__(self, "vector", tuple(float(x) for x in v))


@dataclass(frozen=True)
class RabiField:
    """Rotating transverse field (A cos(wt+phi), A sin(wt+phi), A0)."""

    A: float
    A0: float
    omega: float
    phi: float = 0.0

    def __post_init__(self):
        if self.omega == 0.0:
            raise ZeroDriveFrequency("Rabi field requires omega != 0")


@dataclass(frozen=True)
class ParallelZField:
    """Field (0, 0, B(t)) along z with a scalar profile B."""

    profile: ScalarProfile


FieldSpec = ZeroField | ConstantField | RabiField | ParallelZField


def field_at(f: FieldSpec, t):
    """Field components at scalar t -> (3,), or at array t -> (len(t), 3)."""
    t = np.asarray(t, dtype=float)
    shape = t.shape + (3,)
    if isinstance(f, ZeroField):
        out = np.zeros(shape)
    elif isinstance(f, ConstantField):
        out = np.broadcast_to(np.asarray(f.vector, dtype=float), shape).copy()
    elif isinstance(f, RabiField):
        phase = f.omega * t + f.phi
        out = np.stack([f.A * np.cos(phase),
                        f.A * np.sin(phase),
                        np.full(t.shape, f.A0)], axis=-1)
    elif isinstance(f, ParallelZField):
        b = np.asarray(profile_value(f.profile, t))
        out = np.zeros(shape)
        out[..., 2] = b
    else:
        raise TypeError(f"not a field spec: {f!r}")
    return out


def field_span(f: FieldSpec):
    if isinstance(f, ParallelZField):
        return profile_span(f.profile)
    return (-np.inf, np.inf)


# ---------------------------------------------------------------------------
# the two-spin problem and the stationary basis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoSpinProblem:
    """Two spins in fields G (first spin), F (second spin), coupling J.

    ``t0`` is the reference time from which propagators and coupling
    integrals are taken; it defaults to 0.
    """

    G: FieldSpec = field(default_factory=ZeroField)
    F: FieldSpec = field(default_factory=ZeroField)
    J: ScalarProfile = ConstantProfile(0.0)
    t0: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.t0):
            raise ValueError("t0 must be finite")


@dataclass(frozen=True)
class StationaryBasis:
    """Triplet/singlet basis: rows of ``vectors`` are the four states.

    Row order: both-up; symmetric up/down combination; antisymmetric
    (singlet) combination; both-down.  The exchange operator is diagonal
    in this basis with eigenvalues (1, 1, -3, 1).
    """

    vectors: np.ndarray

    @property
    def singlet(self) -> np.ndarray:
        return self.vectors[2]


def stationary_basis() -> StationaryBasis:
    s = 1 / np.sqrt(2)
    v = np.array([[1, 0, 0, 0],
                  [0, s, s, 0],
                  [0, -s, s, 0],
                  [0, 0, 0, 1]], dtype=complex)
    return StationaryBasis(vectors=v)


def exchange_eigenvalues() -> np.ndarray:
    """Eigenvalues of the exchange operator on the stationary basis."""
    return np.array([1.0, 1.0, -3.0, 1.0])


def _check_exchange_diagonalization():  # pragma: no cover - debug helper
    b = stationary_basis().vectors
    d = b.conj() @ linalg.EXCHANGE @ b.T
    return linalg.max_abs(d - np.diag(exchange_eigenvalues()))
