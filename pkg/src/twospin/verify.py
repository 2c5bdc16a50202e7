"""Self-verification suite: every library invariant as a named check.

``run_checks`` executes the registered checks and reports one line per
check; the quick subset covers the purely algebraic identities, the
full run adds every oracle-backed comparison.  A mutation hook lets
tests confirm that a corrupted closed form actually fails the suite.
"""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from . import linalg, oracle, propagators, reductions, resonance, spectrum
from .hamiltonian import (check_swap, hamiltonian_at, one_spin_h,
                          two_spin_matrix, two_spin_matrix_entrywise)
from .linalg import (EXCHANGE, ID2, ID4, PAULI, SPIN1, SPIN2, SWAP, kron,
                     max_abs)
from .model import (ConstantField, ConstantProfile, RabiField, SampledProfile,
                    TwoSpinProblem, ZeroField, field_at, interaction_integral,
                    stationary_basis)
from .propagators import (Propagator, RabiParams, prop_constant_parallel,
                          prop_equal_fields, prop_equal_rabi,
                          prop_free_interaction, prop_noninteracting,
                          prop_rabi_second_spin, rabi_frame_u,
                          rabi_literal_u, rabi_one_spin, rabi_rotation_4x4,
                          reparameterize_check)

CHECKS = []


def check(name: str, quick: bool = False):
    def deco(fn):
        CHECKS.append((name, quick, fn))
        return fn
    return deco


@dataclass
class CheckOutcome:
    name: str
    ok: bool
    seconds: float
    detail: str


# ---------------------------------------------------------------------------
# random draws shared with the acceptance tests
# ---------------------------------------------------------------------------

ORACLE_FAMILIES = ("free_interaction", "equal_fields", "constant_parallel",
                   "rabi_second_spin", "equal_rabi", "noninteracting")


def random_rabi_params(rng) -> RabiParams:
    return RabiParams(A=rng.uniform(0.1, 2.0), A0=rng.uniform(0.1, 2.0),
                      omega=rng.uniform(0.3, 3.0))


def _random_field(rng):
    if rng.random() < 0.5:
        rp = random_rabi_params(rng)
        return RabiField(rp.A, rp.A0, rp.omega, phi=rng.uniform(0, 2 * np.pi))
    return ConstantField(tuple(rng.uniform(-1.5, 1.5, 3)))


def draw_equivalence_case(rng, family: str, t_max: float = 10.0):
    """One random (problem, closed-form matrix, end time) for a family."""
    t = float(rng.uniform(0.05, t_max))
    if family == "free_interaction":
        j = ConstantProfile(float(rng.uniform(-2, 2)))
        return TwoSpinProblem(J=j), prop_free_interaction(j, 0.0, t).matrix, t
    if family == "equal_fields":
        f = _random_field(rng)
        j = ConstantProfile(float(rng.uniform(-2, 2)))
        return (TwoSpinProblem(G=f, F=f, J=j),
                prop_equal_fields(f, j, 0.0, t).matrix, t)
    if family == "constant_parallel":
        g, a, b = rng.uniform(-1.5, 1.5, 3)
        prob = TwoSpinProblem(G=ConstantField((0.0, 0.0, a)),
                              F=ConstantField((0.0, 0.0, b)),
                              J=ConstantProfile(2 * g))
        return prob, prop_constant_parallel(g, a, b, t).matrix, t
    if family == "rabi_second_spin":
        rp = random_rabi_params(rng)
        prob = TwoSpinProblem(F=RabiField(rp.A, rp.A0, rp.omega))
        return prob, prop_rabi_second_spin(rp, t).matrix, t
    if family == "equal_rabi":
        rp = random_rabi_params(rng)
        j = ConstantProfile(float(rng.uniform(-2, 2)))
        f = RabiField(rp.A, rp.A0, rp.omega)
        return (TwoSpinProblem(G=f, F=f, J=j),
                prop_equal_rabi(rp, j, 0.0, t).matrix, t)
    if family == "noninteracting":
        g, f = _random_field(rng), _random_field(rng)
        return (TwoSpinProblem(G=g, F=f),
                prop_noninteracting(g, f, 0.0, t).matrix, t)
    raise ValueError(f"unknown family {family!r}")


def closed_vs_oracle_errors(rng, family: str, draws: int,
                            t_max: float = 10.0,
                            cfg: oracle.IntegratorConfig | None = None):
    """Max-entry errors of a closed-form family against the batched oracle."""
    cases = [draw_equivalence_case(rng, family, t_max) for _ in range(draws)]
    problems = [c[0] for c in cases]
    t1s = [c[2] for c in cases]
    truth = oracle.integrate_problems(problems, t1s,
                                      cfg or oracle.DEFAULT_CONFIG)
    return np.array([max_abs(c[1] - truth[i]) for i, c in enumerate(cases)])


def rabi_one_spin_oracle_errors(rng, draws: int, t_max: float = 10.0,
                                cfg: oracle.IntegratorConfig | None = None):
    """Max-entry errors of the 2x2 Rabi closed form against RK4."""
    cfg = cfg or oracle.DEFAULT_CONFIG
    params = [random_rabi_params(rng) for _ in range(draws)]
    t1s = np.array([rng.uniform(0.05, t_max) for _ in range(draws)])

    def afun(s_nodes):
        out = np.empty((len(s_nodes), draws, 2, 2), dtype=complex)
        for i, rp in enumerate(params):
            ts = s_nodes * t1s[i]
            f = field_at(RabiField(rp.A, rp.A0, rp.omega), ts)
            out[:, i] = (-1j * t1s[i]) * np.einsum("tc,cij->tij", f, PAULI)
        return out

    scaled = oracle.IntegratorConfig(rel_tol=cfg.rel_tol,
                                     max_step=cfg.max_step / t1s.max(),
                                     min_step=cfg.min_step / t1s.max())
    y0 = np.broadcast_to(ID2, (draws, 2, 2)).copy()
    raw, _ = oracle.integrate_generator(afun, 0.0, 1.0, y0, scaled)
    w, _, vh = np.linalg.svd(raw)
    truth = w @ vh
    return np.array([max_abs(rabi_one_spin(rp, t) - truth[i])
                     for i, (rp, t) in enumerate(zip(params, t1s))])


def closed_form_propagator(family: str, rng):
    """A (callable t -> 4x4, problem) pair for residual-style checks."""
    if family == "free_interaction":
        j = ConstantProfile(float(rng.uniform(-2, 2)))
        p = TwoSpinProblem(J=j)
        return (lambda t: prop_free_interaction(j, 0.0, t).matrix), p
    if family == "equal_fields":
        f = _random_field(rng)
        j = ConstantProfile(float(rng.uniform(-2, 2)))
        p = TwoSpinProblem(G=f, F=f, J=j)
        return (lambda t: prop_equal_fields(f, j, 0.0, t).matrix), p
    if family == "constant_parallel":
        g, a, b = rng.uniform(-1.5, 1.5, 3)
        p = TwoSpinProblem(G=ConstantField((0.0, 0.0, float(a))),
                           F=ConstantField((0.0, 0.0, float(b))),
                           J=ConstantProfile(2 * float(g)))
        return (lambda t: prop_constant_parallel(g, a, b, t).matrix), p
    if family == "rabi_second_spin":
        rp = random_rabi_params(rng)
        p = TwoSpinProblem(F=RabiField(rp.A, rp.A0, rp.omega))
        return (lambda t: prop_rabi_second_spin(rp, t).matrix), p
    if family == "equal_rabi":
        rp = random_rabi_params(rng)
        j = ConstantProfile(float(rng.uniform(-2, 2)))
        f = RabiField(rp.A, rp.A0, rp.omega)
        p = TwoSpinProblem(G=f, F=f, J=j)
        return (lambda t: prop_equal_rabi(rp, j, 0.0, t).matrix), p
    if family == "noninteracting":
        g, f = _random_field(rng), _random_field(rng)
        p = TwoSpinProblem(G=g, F=f)
        return (lambda t: prop_noninteracting(g, f, 0.0, t).matrix), p
    raise ValueError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# algebraic checks (quick subset)
# ---------------------------------------------------------------------------


@check("pauli-algebra", quick=True)
def _check_pauli():
    eps = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[i, j, k], eps[j, i, k] = 1.0, -1.0
    for i in range(3):
        for j in range(3):
            comm = PAULI[i] @ PAULI[j] - PAULI[j] @ PAULI[i]
            expected = 2j * sum(eps[i, j, k] * PAULI[k] for k in range(3))
            assert max_abs(comm - expected) == 0.0
            anti = PAULI[i] @ PAULI[j] + PAULI[j] @ PAULI[i]
            assert max_abs(anti - 2 * (i == j) * ID2) == 0.0
    return "commutators and anticommutators exact"


@check("swap-matrix-identities", quick=True)
def _check_swap_matrix():
    a = linalg.swap_matrix()
    assert max_abs(a - a.conj().T) == 0.0
    assert max_abs(a @ a - ID4) == 0.0
    expected = np.zeros((4, 4))
    expected[0, 0] = expected[1, 2] = expected[2, 1] = expected[3, 3] = 1.0
    assert max_abs(a - expected) == 0.0
    for i in range(3):
        assert max_abs(a @ SPIN2[i] @ a - SPIN1[i]) <= 1e-15
        assert max_abs(a @ SPIN1[i] @ a - SPIN2[i]) <= 1e-15
        plus = SPIN2[i] + SPIN1[i]
        minus = SPIN2[i] - SPIN1[i]
        assert max_abs(a @ plus @ a - plus) <= 1e-15
        assert max_abs(a @ minus @ a + minus) <= 1e-15
    assert max_abs(a @ EXCHANGE @ a - EXCHANGE) <= 1e-15
    return "involution, symmetry and conjugation identities hold"


@check("spin-sectors-commute", quick=True)
def _check_sectors():
    worst = max(max_abs(SPIN2[i] @ SPIN1[j] - SPIN1[j] @ SPIN2[i])
                for i in range(3) for j in range(3))
    assert worst == 0.0
    return "all first-spin and second-spin operators commute exactly"


@check("expm-hermitian-unitary", quick=True)
def _check_expm():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(50):
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        h = (m + m.conj().T) / 2
        u = linalg.expm_skew_hermitian(h, float(rng.uniform(0.1, 5)))
        worst = max(worst, linalg.unitarity_defect(u))
    assert worst < 1e-12
    return f"worst unitarity defect {worst:.2e}"


@check("hamiltonian-forms-agree", quick=True)
def _check_h_forms():
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(100):
        g, f = rng.uniform(-2, 2, 3), rng.uniform(-2, 2, 3)
        j = float(rng.uniform(-2, 2))
        worst = max(worst, max_abs(two_spin_matrix(g, f, j)
                                   - two_spin_matrix_entrywise(g, f, j)))
    assert worst < 1e-14
    h = two_spin_matrix((0, 0, 0), (0, 0, 0), 2.0)
    expected = np.diag([1, -1, -1, 1]).astype(complex)
    expected[1, 2] = expected[2, 1] = 2.0
    assert max_abs(h - expected) == 0.0
    return f"operator and entrywise forms agree ({worst:.2e})"


@check("hamiltonian-hermitian-traceless", quick=True)
def _check_h_herm():
    rng = np.random.default_rng(13)
    worst_h = worst_tr = 0.0
    for _ in range(100):
        h = two_spin_matrix(rng.uniform(-3, 3, 3), rng.uniform(-3, 3, 3),
                            float(rng.uniform(-3, 3)))
        worst_h = max(worst_h, linalg.hermiticity_defect(h))
        worst_tr = max(worst_tr, abs(np.trace(h)))
    assert worst_h < 1e-13 and worst_tr < 1e-13
    return f"hermiticity {worst_h:.1e}, trace {worst_tr:.1e}"


@check("hamiltonian-swap-defect", quick=True)
def _check_h_swap():
    rng = np.random.default_rng(14)
    worst = 0.0
    for _ in range(100):
        p = TwoSpinProblem(G=_random_field(rng), F=_random_field(rng),
                           J=ConstantProfile(float(rng.uniform(-2, 2))))
        worst = max(worst, check_swap(p, float(rng.uniform(-5, 5))))
    assert worst < 1e-13
    return f"worst conjugation defect {worst:.2e}"


@check("field-evaluation", quick=True)
def _check_fields():
    rng = np.random.default_rng(15)
    worst = 0.0
    for _ in range(50):
        f = RabiField(A=float(rng.uniform(0.1, 3)), A0=float(rng.uniform(-2, 2)),
                      omega=float(rng.uniform(0.2, 4)),
                      phi=float(rng.uniform(0, 2 * np.pi)))
        ts = rng.uniform(-5, 5, 64)
        vals = field_at(f, ts)
        radius = np.hypot(vals[:, 0], vals[:, 1])
        worst = max(worst, float(np.abs(radius - abs(f.A)).max()))
    assert worst < 1e-12
    knots = tuple((t, np.sin(t)) for t in np.linspace(0, 4, 41))
    prof = SampledProfile(knots)
    parts = (interaction_integral(prof, 0.0, 1.3)
             + interaction_integral(prof, 1.3, 3.7))
    whole = interaction_integral(prof, 0.0, 3.7)
    assert abs(parts - whole) < 1e-10
    return f"rabi circle {worst:.1e}; coupling integral additive"


@check("stationary-basis", quick=True)
def _check_basis():
    b = stationary_basis().vectors
    gram = b.conj() @ b.T
    assert max_abs(gram - ID4) < 1e-14
    d = b.conj() @ EXCHANGE @ b.T
    assert max_abs(d - np.diag([1.0, 1.0, -3.0, 1.0])) < 1e-14
    return "orthonormal; diagonalizes the exchange operator as (1,1,-3,1)"


@check("quartic-two-forms", quick=True)
def _check_quartic_forms():
    rng = np.random.default_rng(16)
    worst_c = worst_e = 0.0
    for _ in range(200):
        g = float(rng.uniform(-2, 2))
        a, b = rng.uniform(-2, 2, 3), rng.uniform(-2, 2, 3)
        c1 = spectrum.quartic_d(g, a, b)
        c2 = spectrum.quartic_factored_coeffs(g, a, b)
        worst_c = max(worst_c, float(np.abs(c1 - c2).max()))
        lams = rng.uniform(-4, 4, 20)
        worst_e = max(worst_e, float(np.abs(
            np.polyval(c1, lams)
            - spectrum.quartic_factored_eval(g, a, b, lams)).max()))
    assert worst_c < 1e-9 and worst_e < 1e-9
    return f"coefficients {worst_c:.1e}, pointwise {worst_e:.1e}"


@check("spectrum-special-cases", quick=True)
def _check_spectrum_special():
    res = spectrum.solve_levels(1.0, np.zeros(3), np.zeros(3))
    assert np.abs(res.roots - np.array([-3.0, 1.0, 1.0, 1.0])).max() < 1e-10
    res2 = spectrum.solve_levels(1.0, (0, 0, 1), (0, 0, 1))
    assert np.abs(res2.roots - np.array([-3.0, -1.0, 1.0, 3.0])).max() < 1e-10
    return "triple root and z-field ladder reproduced to 1e-10"


@check("spectrum-vs-dense-eig", quick=True)
def _check_spectrum_dense():
    rng = np.random.default_rng(17)
    worst = worst_d = 0.0
    for _ in range(100):
        g = float(rng.uniform(-2, 2))
        a, b = rng.uniform(-2, 2, 3), rng.uniform(-2, 2, 3)
        res = spectrum.solve_levels(g, a, b)
        dense = np.linalg.eigvalsh(spectrum.build_D(g, a, b, 0.0))
        worst = max(worst, float(np.abs(np.sort(dense) - res.roots).max()))
        worst_d = max(worst_d, float(res.poly_residuals.max()
                                     / res.scale ** 4))
    assert worst < 1e-9 and worst_d < 1e-9
    return f"roots vs eigh {worst:.1e}; |d(root)| {worst_d:.1e}"


@check("spectrum-symmetries", quick=True)
def _check_spectrum_sym():
    rng = np.random.default_rng(18)
    worst_swap = worst_sum = 0.0
    for _ in range(50):
        g = float(rng.uniform(-2, 2))
        a, b = rng.uniform(-2, 2, 3), rng.uniform(-2, 2, 3)
        r1 = spectrum.solve_levels(g, a, b)
        r2 = spectrum.solve_levels(g, b, a)
        worst_swap = max(worst_swap, float(np.abs(r1.roots - r2.roots).max()))
        worst_sum = max(worst_sum, abs(float(r1.roots.sum())) / r1.scale)
    assert worst_swap < 1e-10 and worst_sum < 1e-10
    return f"field swap {worst_swap:.1e}; root sum {worst_sum:.1e}"


@check("stationary-rabi-levels", quick=True)
def _check_stationary_rabi():
    rng = np.random.default_rng(19)
    worst = 0.0
    for _ in range(20):
        j, a0 = float(rng.uniform(-3, 3)), float(rng.uniform(-2, 2))
        h = two_spin_matrix((0, 0, a0), (0, 0, a0), j)
        for lam, vec in spectrum.stationary_rabi(j, a0):
            worst = max(worst, max_abs(h @ vec - lam * vec))
    assert worst < 1e-12
    return f"eigenpair residual {worst:.1e}"


@check("rabi-closed-forms-agree", quick=True)
def _check_rabi_forms():
    rng = np.random.default_rng(20)
    worst = 0.0
    for _ in range(200):
        rp = random_rabi_params(rng)
        t = float(rng.uniform(0, 8))
        worst = max(worst, max_abs(rabi_literal_u(rp, t)
                                   - rabi_frame_u(rp, t)))
    assert worst < 1e-10
    return f"literal vs rotating-frame {worst:.2e}"


@check("propagator-unitarity", quick=True)
def _check_unitarity():
    rng = np.random.default_rng(21)
    worst = 0.0
    for family in ORACLE_FAMILIES:
        for _ in range(50):
            closed, _ = closed_form_propagator(family, rng)
            defect = linalg.unitarity_defect(closed(float(rng.uniform(0, 10))))
            worst = max(worst, defect)
    assert worst < 1e-10
    return f"worst defect {worst:.2e} across all families"


@check("free-interaction-arithmetic", quick=True)
def _check_free_arith():
    p = prop_free_interaction(ConstantProfile(0.0), 0.0, 3.0)
    assert max_abs(p.matrix - ID4) == 0.0
    p2 = prop_free_interaction(ConstantProfile(2.0), 0.0, np.pi)
    assert max_abs(p2.matrix + ID4) < 1e-13
    return "zero coupling gives identity; integral 2*pi gives -identity"


@check("noninteracting-two-forms", quick=True)
def _check_noninteracting_forms():
    rng = np.random.default_rng(22)
    worst = 0.0
    for _ in range(50):
        g, f = _random_field(rng), _random_field(rng)
        t = float(rng.uniform(0, 5))
        direct = prop_noninteracting(g, f, 0.0, t).matrix
        u_g = propagators.one_spin_propagator(g, 0.0, t)
        u_f = propagators.one_spin_propagator(f, 0.0, t)
        second = SWAP @ kron(ID2, u_g) @ SWAP @ kron(ID2, u_f)
        worst = max(worst, max_abs(direct - second))
    assert worst < 1e-12
    return f"product vs swap-conjugated form {worst:.2e}"


@check("second-spin-rabi-forms", quick=True)
def _check_second_spin_forms():
    rng = np.random.default_rng(23)
    worst = 0.0
    for _ in range(50):
        rp = random_rabi_params(rng)
        t = float(rng.uniform(0, 6))
        a = prop_rabi_second_spin(rp, t).matrix
        b = rabi_rotation_4x4(rp, t, spin=2).matrix
        worst = max(worst, max_abs(a - b))
    assert worst < 1e-13
    return f"kron form vs 4x4 rotation form {worst:.2e}"


@check("swap-conjugation-closed", quick=True)
def _check_swap_closed():
    rng = np.random.default_rng(24)
    worst = 0.0
    for _ in range(30):
        g, f = _random_field(rng), _random_field(rng)
        t = float(rng.uniform(0, 5))
        lhs = SWAP @ prop_noninteracting(g, f, 0.0, t).matrix @ SWAP
        rhs = prop_noninteracting(f, g, 0.0, t).matrix
        worst = max(worst, max_abs(lhs - rhs))
        gam, a, b = rng.uniform(-1.5, 1.5, 3)
        lhs = SWAP @ prop_constant_parallel(gam, a, b, t).matrix @ SWAP
        rhs = prop_constant_parallel(gam, b, a, t).matrix
        worst = max(worst, max_abs(lhs - rhs))
    assert worst < 1e-8
    return f"closed-form swap conjugation {worst:.2e}"


@check("km-map-identities", quick=True)
def _check_km():
    h = reductions.HADAMARD_LIKE
    assert max_abs(h @ h - ID2) < 1e-15
    rng = np.random.default_rng(25)
    worst = 0.0
    for _ in range(20):
        e, f = rng.uniform(-2, 2, 2)
        lhs = h @ (e * linalg.SX + f * linalg.SZ) @ h
        rhs = f * linalg.SX + e * linalg.SZ
        worst = max(worst, max_abs(lhs - rhs))
    assert worst < 1e-14
    return f"involution exact; axis-exchange conjugation {worst:.1e}"


@check("parallel-reduction-phases", quick=True)
def _check_parallel_phases():
    knots = tuple((t, 0.3 + 0.5 * np.sin(1.3 * t)) for t in np.linspace(0, 6, 61))
    red = reductions.reduce_parallel(SampledProfile(knots),
                                     ConstantProfile(0.4),
                                     ConstantProfile(0.9))
    worst = max(abs(abs(red.v1_phase(t)) - 1.0) for t in np.linspace(0, 6, 30))
    worst = max(worst, max(abs(abs(red.v4_phase(t)) - 1.0)
                           for t in np.linspace(0, 6, 30)))
    assert worst < 1e-12
    return f"outer components stay pure phases ({worst:.1e})"


@check("rotating-frame-closure", quick=True)
def _check_rotating_closure():
    rng = np.random.default_rng(26)
    worst = 0.0
    for _ in range(10):
        omega = float(rng.uniform(0.4, 3.0))
        f = random_rabi_params(rng)
        g = random_rabi_params(rng)
        f = RabiParams(f.A, f.A0, omega)
        g = RabiParams(g.A, g.A0, omega)
        rf = reductions.rotating_frame_reduce(
            f, float(rng.uniform(0, 2 * np.pi)),
            g, float(rng.uniform(0, 2 * np.pi)),
            float(rng.uniform(-2, 2)))
        res = spectrum.solve_levels(rf.gamma, rf.a, rf.b)
        for lam, vec in zip(res.roots, res.vectors):
            t = float(rng.uniform(0, 8))
            worst = max(worst, reductions.rotating_frame_residual(
                rf, float(lam), vec, omega, t))
    assert worst < 1e-8
    return f"worst residual {worst:.2e}"


@check("selection-rule", quick=True)
def _check_selection():
    rng = np.random.default_rng(27)
    basis = stationary_basis().vectors
    worst = 0.0
    for _ in range(10):
        rp = random_rabi_params(rng)
        j = float(rng.uniform(-2, 2))
        ts = np.linspace(0, 10, 50)
        mats = propagators.equal_rabi_matrices(rp, j, ts)
        elems = np.einsum("ja,tab,ib->tji", basis.conj(), mats, basis)
        sector = np.abs(elems[:, 2, [0, 1, 3]])
        sector = max(float(sector.max()),
                     float(np.abs(elems[:, [0, 1, 3], 2]).max()))
        worst = max(worst, sector)
    assert worst < 1e-10
    return f"singlet leakage {worst:.2e}"


@check("element-routes-and-sums", quick=True)
def _check_elements():
    rng = np.random.default_rng(28)
    worst_sum = worst_j = 0.0
    for _ in range(20):
        rp = random_rabi_params(rng)
        t = float(rng.uniform(0, 6))
        m = resonance.two_spin_elements(rp, float(rng.uniform(-2, 2)), t)
        sums = np.abs(m) ** 2 @ np.ones(4)
        worst_sum = max(worst_sum, float(np.abs(sums - 1).max()))
        probs = [np.abs(resonance.two_spin_elements(rp, j, t, check=False)) ** 2
                 for j in (0.0, 0.7, 2.3)]
        worst_j = max(worst_j, float(np.abs(probs[0] - probs[1]).max()),
                      float(np.abs(probs[0] - probs[2]).max()))
    assert worst_sum < 1e-9 and worst_j < 1e-10
    return f"row sums {worst_sum:.1e}; coupling independence {worst_j:.1e}"


@check("resonance-maxima", quick=True)
def _check_resonance_maxima():
    pair = resonance.resonance_frequencies(0.25, 1.0)
    assert pair.omega1 == 2.0 and abs(pair.omega2 - 1.5) < 1e-15
    result = resonance.scan(0.25, 1.0, 2.0, [pair.omega1, pair.omega2])
    at1, at2 = result.rows
    assert abs(at1.p14_max - 1.0) < 1e-6
    assert abs(at1.p21_max - 0.5) < 1e-6 and abs(at1.p24_max - 0.5) < 1e-6
    assert abs(at2.p21_max - 0.5) < 1e-6 and abs(at2.p24_max - 0.5) < 1e-6
    assert at2.p14_max < at1.p14_max
    assert max(at1.p3_leak, at2.p3_leak) < 1e-10
    return (f"pair flip peaks at {at1.p14_max:.8f}; "
            f"single flips at {at1.p21_max:.8f} and {at2.p21_max:.8f}")


# ---------------------------------------------------------------------------
# oracle-backed checks (full suite only)
# ---------------------------------------------------------------------------


@check("oracle-vs-expm-constant")
def _check_oracle_expm():
    rng = np.random.default_rng(30)
    worst = 0.0
    for _ in range(5):
        g, f = rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3)
        j = float(rng.uniform(-1, 1))
        p = TwoSpinProblem(G=ConstantField(tuple(g)), F=ConstantField(tuple(f)),
                           J=ConstantProfile(j))
        t = float(rng.uniform(0.5, 3))
        exact = linalg.expm_skew_hermitian(two_spin_matrix(g, f, j), t)
        got = oracle.integrate_propagator(p, 0.0, t).matrix
        worst = max(worst, max_abs(exact - got))
    assert worst < 1e-9
    return f"constant generator error {worst:.2e}"


@check("rk4-order")
def _check_rk4_order():
    g, f, j = (0.3, 0.4, 0.5), (0.1, -0.7, 0.2), 0.9
    p = TwoSpinProblem(G=ConstantField(g), F=ConstantField(f),
                       J=ConstantProfile(j))
    exact = linalg.expm_skew_hermitian(two_spin_matrix(g, f, j), 2.0)
    afun = lambda ts: -1j * hamiltonian_at(p, ts)
    err_n = max_abs(oracle.rk4_fixed(afun, 0.0, 2.0, 16, ID4) - exact)
    err_2n = max_abs(oracle.rk4_fixed(afun, 0.0, 2.0, 32, ID4) - exact)
    ratio = err_n / err_2n
    assert 12.0 <= ratio <= 20.0
    return f"halving error ratio {ratio:.2f}"


@check("oracle-composition")
def _check_oracle_composition():
    rp = RabiParams(0.8, 1.1, 1.7)
    p = TwoSpinProblem(G=RabiField(rp.A, rp.A0, rp.omega),
                       F=ConstantField((0.2, 0.0, 0.5)),
                       J=ConstantProfile(0.6))
    first = oracle.integrate_propagator(p, 0.0, 1.0).matrix
    second = oracle.integrate_propagator(p, 1.0, 2.0).matrix
    direct = oracle.integrate_propagator(p, 0.0, 2.0).matrix
    diff = max_abs(second @ first - direct)
    assert diff < 5 * oracle.DEFAULT_CONFIG.rel_tol
    return f"split vs direct {diff:.2e}"


@check("oracle-state-evolution")
def _check_oracle_state():
    rng = np.random.default_rng(31)
    p = TwoSpinProblem(G=RabiField(0.7, 0.9, 1.3),
                       F=ConstantField((0.1, 0.2, -0.4)),
                       J=ConstantProfile(0.8))
    u = rng.normal(size=4) + 1j * rng.normal(size=4)
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    u /= np.linalg.norm(u)
    v /= np.linalg.norm(v)
    raw = oracle.integrate_state(p, u, 0.0, 2.0, rescale=False)
    norm_defect = abs(np.linalg.norm(raw) - 1.0)
    a, b = 0.3 - 0.2j, 1.1 + 0.4j
    mixed = oracle.integrate_state(p, a * u + b * v, 0.0, 2.0, rescale=False)
    parts = (a * oracle.integrate_state(p, u, 0.0, 2.0, rescale=False)
             + b * oracle.integrate_state(p, v, 0.0, 2.0, rescale=False))
    lin_defect = float(np.abs(mixed - parts).max())
    assert norm_defect < 1e-9 and lin_defect < 1e-9
    return f"norm drift {norm_defect:.1e}; linearity {lin_defect:.1e}"


@check("closed-forms-vs-oracle")
def _check_families_oracle():
    rng = np.random.default_rng(32)
    details = []
    for family in ORACLE_FAMILIES:
        errs = closed_vs_oracle_errors(rng, family, draws=6, t_max=4.0)
        assert errs.max() < 1e-8, f"{family}: {errs.max():.3e}"
        details.append(f"{family} {errs.max():.1e}")
    errs = rabi_one_spin_oracle_errors(rng, draws=6, t_max=4.0)
    assert errs.max() < 1e-8
    details.append(f"rabi_one_spin {errs.max():.1e}")
    return "; ".join(details)


@check("swap-conjugation-oracle")
def _check_swap_oracle():
    rng = np.random.default_rng(33)
    pairs = []
    for _ in range(6):
        g, f = _random_field(rng), _random_field(rng)
        j = ConstantProfile(float(rng.uniform(-2, 2)))
        t = float(rng.uniform(0.2, 3.0))
        pairs.append((TwoSpinProblem(G=g, F=f, J=j),
                      TwoSpinProblem(G=f, F=g, J=j), t))
    problems = [p for a, b, _ in pairs for p in (a, b)]
    t1s = [t for _, _, t in pairs for _ in range(2)]
    mats = oracle.integrate_problems(problems, t1s)
    worst = max(max_abs(SWAP @ mats[2 * i] @ SWAP - mats[2 * i + 1])
                for i in range(len(pairs)))
    assert worst < 1e-8
    return f"worst defect {worst:.2e}"


@check("propagator-time-derivative")
def _check_fd_residual():
    rng = np.random.default_rng(34)
    worst = 0.0
    for family in ORACLE_FAMILIES:
        closed, p = closed_form_propagator(family, rng)
        hfun = lambda t: hamiltonian_at(p, t)
        for _ in range(4):
            t = float(rng.uniform(0.3, 5.0))
            worst = max(worst, oracle.schrodinger_residual(hfun, closed, t))
    assert worst < 1e-6
    return f"worst 5-point residual {worst:.2e}"


@check("propagator-composition")
def _check_composition():
    rng = np.random.default_rng(35)
    worst = 0.0
    for _ in range(5):
        t0, t1, t2 = np.sort(rng.uniform(0, 4, 3))
        j = ConstantProfile(float(rng.uniform(-2, 2)))
        f = _random_field(rng)
        rp = random_rabi_params(rng)
        jr = ConstantProfile(float(rng.uniform(-2, 2)))
        cases = [
            (prop_free_interaction(j, t0, t2).matrix,
             prop_free_interaction(j, t1, t2).matrix
             @ prop_free_interaction(j, t0, t1).matrix),
            (prop_equal_fields(f, j, t0, t2).matrix,
             prop_equal_fields(f, j, t1, t2).matrix
             @ prop_equal_fields(f, j, t0, t1).matrix),
            (prop_equal_rabi(rp, jr, t0, t2).matrix,
             prop_equal_rabi(rp, jr, t1, t2).matrix
             @ prop_equal_rabi(rp, jr, t0, t1).matrix),
            (prop_constant_parallel(0.4, 0.9, -0.3, t2 - t0).matrix,
             prop_constant_parallel(0.4, 0.9, -0.3, t2 - t1).matrix
             @ prop_constant_parallel(0.4, 0.9, -0.3, t1 - t0).matrix),
        ]
        for direct, split in cases:
            worst = max(worst, max_abs(direct - split))
    assert worst < 1e-9
    return f"worst composition defect {worst:.2e}"


@check("reparameterization")
def _check_reparam():
    p = TwoSpinProblem(G=ConstantField((0.3, 0.0, 0.8)),
                       F=ConstantField((0.0, 0.4, -0.2)),
                       J=ConstantProfile(0.9))
    base = reparameterize_check(p, lambda t: t, lambda t: 1.0, 1.1)
    rabi = TwoSpinProblem(G=RabiField(0.6, 1.0, 1.5),
                          F=RabiField(0.6, 1.0, 1.5),
                          J=ConstantProfile(0.7))
    squared = reparameterize_check(rabi, lambda t: t * t,
                                   lambda t: 2.0 * t, 1.2)
    assert base < 1e-7 and squared < 1e-7
    return f"identity map {base:.1e}; quadratic map {squared:.1e}"


@check("parallel-reduction-residual")
def _check_parallel_residual():
    knots1 = tuple((t, 0.8 + 0.4 * np.sin(1.1 * t)) for t in np.linspace(0, 5, 51))
    knots2 = tuple((t, -0.2 + 0.3 * np.cos(0.7 * t)) for t in np.linspace(0, 5, 51))
    red = reductions.reduce_parallel(SampledProfile(knots1),
                                     SampledProfile(knots2),
                                     ConstantProfile(0.6))
    p = reductions.parallel_problem(red)
    psi0 = np.array([0.8, 0.6j], dtype=complex)
    c1, c4 = 0.5 + 0.1j, -0.3 + 0.2j

    def solution(t):
        return reductions.assemble_parallel(red, c1, c4, psi0, t)

    hfun = lambda t: hamiltonian_at(p, t)
    worst = max(oracle.schrodinger_residual(hfun, solution, t)
                for t in (0.8, 2.1, 3.9))
    assert worst < 1e-7
    return f"assembled solution residual {worst:.2e}"


@check("parallel-vs-constant-parallel")
def _check_parallel_cross():
    b1, b2, eps = 0.9, -0.4, 0.7
    red = reductions.reduce_parallel(ConstantProfile(b1), ConstantProfile(b2),
                                     ConstantProfile(eps))
    worst = 0.0
    for t in (0.5, 1.7, 3.3):
        u = prop_constant_parallel(eps / 2, b1, b2, t).matrix
        for psi0 in np.eye(4, dtype=complex):
            got = reductions.assemble_parallel(red, psi0[0], psi0[3],
                                               psi0[1:3], t)
            worst = max(worst, float(np.abs(got - u @ psi0).max()))
    assert worst < 1e-9
    return f"reduction vs closed form {worst:.2e}"


@check("equal-rabi-sampled-coupling")
def _check_equal_rabi_sampled():
    knots = tuple((t, 0.9 + 0.6 * np.sin(0.8 * t)) for t in np.linspace(0, 4, 41))
    j = SampledProfile(knots)
    rp = RabiParams(0.7, 1.2, 1.9)
    f = RabiField(rp.A, rp.A0, rp.omega)
    p = TwoSpinProblem(G=f, F=f, J=j)
    t = 3.5
    closed = prop_equal_rabi(rp, j, 0.0, t).matrix
    truth = oracle.integrate_propagator(p, 0.0, t).matrix
    diff = max_abs(closed - truth)
    assert diff < 1e-8
    return f"time-dependent coupling vs oracle {diff:.2e}"


# ---------------------------------------------------------------------------
# mutation hook and runner
# ---------------------------------------------------------------------------


def _scale_phase(orig):
    def corrupted(phi):
        return orig(np.asarray(phi) * (1.0 + 1e-3))
    return corrupted


def _scale_coupling(orig):
    def corrupted(gamma, a, b, tau):
        return orig(gamma * (1.0 + 1e-3), a, b, tau)
    return corrupted


MUTATIONS = {
    "free_interaction": ("free_interaction_matrix", _scale_phase),
    "constant_parallel": ("prop_constant_parallel", _scale_coupling),
}


@contextmanager
def _mutation(label: str | None):
    if label is None or label == "":
        yield
        return
    if label not in MUTATIONS:
        raise ValueError(f"unknown mutation label {label!r}; "
                         f"known: {sorted(MUTATIONS)}")
    attr, wrapper = MUTATIONS[label]
    original = getattr(propagators, attr)
    setattr(propagators, attr, wrapper(original))
    try:
        yield
    finally:
        setattr(propagators, attr, original)


def run_checks(quick: bool = False, mutate: str | None = None,
               emit=None) -> list[CheckOutcome]:
    """Run the invariant suite; returns one outcome per check."""
    outcomes = []
    with _mutation(mutate):
        for name, is_quick, fn in CHECKS:
            if quick and not is_quick:
                continue
            start = time.perf_counter()
            try:
                detail = fn() or ""
                ok = True
            except AssertionError as exc:
                detail, ok = f"assertion failed: {exc}", False
            except Exception as exc:  # a corrupted build may raise anywhere
                detail, ok = f"{type(exc).__name__}: {exc}", False
            outcome = CheckOutcome(name=name, ok=ok,
                                   seconds=time.perf_counter() - start,
                                   detail=detail)
            outcomes.append(outcome)
            if emit is not None:
                status = "PASS" if ok else "FAIL"
                emit(f"{status}  {name:32s} {outcome.seconds:7.2f}s  {detail}")
    return outcomes
