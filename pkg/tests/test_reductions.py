import numpy as np
import pytest

from twospin import oracle
from twospin.errors import NotAnEigenpair
from twospin.hamiltonian import hamiltonian_at
from twospin.linalg import EXCHANGE, ID2, kron, max_abs
from twospin.model import (ConstantProfile, RabiField, SampledProfile,
                           TwoSpinProblem, field_at)
from twospin.propagators import (RabiParams, expm_pauli,
                                 prop_constant_parallel, rabi_one_spin)
from twospin.reductions import (HADAMARD_LIKE, ParallelReduction,
                                RotatingFrameProblem, assemble_parallel,
                                corotating_rotation, km_map, parallel_problem,
                                reduce_parallel, rotating_frame_reduce,
                                rotating_frame_residual,
                                rotating_frame_solution, solve_reduced,
                                to_time_dependent_problem)
from twospin.spectrum import solve_levels


def _sine_profile(amp, freq, offset, span=6.0, n=61):
    return SampledProfile(tuple(
        (t, offset + amp * np.sin(freq * t)) for t in np.linspace(0, span, n)))


# ---------------------------------------------------------------------------
# parallel-field reduction
# ---------------------------------------------------------------------------


def test_reduced_field_equal_fields():
    b = ConstantProfile(0.8)
    red = reduce_parallel(b, b, ConstantProfile(1.3))
    assert np.allclose(red.reduced_field(2.0), [1.3, 0.0, 0.0])


def test_reduced_field_constant_coupling():
    red = reduce_parallel(_sine_profile(0.5, 1.1, 0.2),
                          ConstantProfile(-0.3), ConstantProfile(0.7))
    for t in (0.0, 1.2, 3.4):
        k = red.reduced_field(t)
        assert k[0] == pytest.approx(0.7)
        assert k[1] == 0.0
        assert k[2] == pytest.approx(red.b_minus(t))


def test_reduced_field_constant_difference():
    # B1 - B2 fixed while the coupling varies: field (J(t), 0, eps)
    eps = 0.4
    b1 = _sine_profile(0.6, 0.9, 0.1)
    b2 = SampledProfile(tuple((t, v - eps) for t, v in b1.knots))
    red = reduce_parallel(b1, b2, _sine_profile(0.3, 1.7, 1.0))
    for t in (0.5, 2.2, 4.0):
        k = red.reduced_field(t)
        assert k[2] == pytest.approx(eps, abs=1e-9)


def test_outer_phases_are_pure():
    red = reduce_parallel(_sine_profile(0.5, 1.3, 0.4), ConstantProfile(0.2),
                          _sine_profile(0.4, 0.7, 0.8))
    for t in np.linspace(0, 5, 17):
        assert abs(abs(red.v1_phase(t)) - 1.0) < 1e-12
        assert abs(abs(red.v4_phase(t)) - 1.0) < 1e-12


def test_outer_phase_values_constant_case():
    eps, b1v, b2v = 0.9, 0.7, -0.2
    red = reduce_parallel(ConstantProfile(b1v), ConstantProfile(b2v),
                          ConstantProfile(eps))
    t = 1.8
    plus = b1v + b2v
    assert red.v1_phase(t) == pytest.approx(np.exp(-1j * (eps / 2 + plus) * t))
    assert red.v4_phase(t) == pytest.approx(np.exp(-1j * (eps / 2 - plus) * t))


def test_decoupled_top_component():
    red = reduce_parallel(_sine_profile(0.5, 1.3, 0.4), ConstantProfile(0.2),
                          ConstantProfile(0.7))
    psi = assemble_parallel(red, 1.0, 0.0, np.zeros(2), 2.9)
    assert abs(abs(psi[0]) - 1.0) < 1e-12
    assert np.abs(psi[1:]).max() < 1e-12


def test_assembled_solution_residual_sampled_fields():
    red = reduce_parallel(_sine_profile(0.4, 1.1, 0.8),
                          _sine_profile(0.3, 0.7, -0.2),
                          ConstantProfile(0.6))
    p = parallel_problem(red)
    hfun = lambda t: hamiltonian_at(p, t)
    psi0 = np.array([0.8, 0.6j])
    sol = lambda t: assemble_parallel(red, 0.5 + 0.1j, -0.3 + 0.2j, psi0, t)
    for t in (0.9, 2.3, 4.1):
        assert oracle.schrodinger_residual(hfun, sol, t) < 1e-7


def test_assembled_norm_conserved():
    red = reduce_parallel(_sine_profile(0.4, 1.1, 0.8), ConstantProfile(0.1),
                          ConstantProfile(0.6))
    psi0 = np.array([0.4, -0.3j])
    start = assemble_parallel(red, 0.5, 0.2j, psi0, 0.0)
    later = assemble_parallel(red, 0.5, 0.2j, psi0, 3.7)
    assert abs(np.linalg.norm(later) - np.linalg.norm(start)) < 1e-10


def test_constant_case_matches_constant_parallel_propagator():
    b1v, b2v, eps = 0.9, -0.4, 0.7
    red = reduce_parallel(ConstantProfile(b1v), ConstantProfile(b2v),
                          ConstantProfile(eps))
    for t in (0.6, 1.9, 3.4):
        u = prop_constant_parallel(eps / 2, b1v, b2v, t).matrix
        for e in np.eye(4, dtype=complex):
            got = assemble_parallel(red, e[0], e[3], e[1:3], t)
            assert max_abs(got - u @ e) < 1e-9


def test_solve_reduced_frames_differ_by_phase():
    red = reduce_parallel(ConstantProfile(0.5), ConstantProfile(-0.1),
                          ConstantProfile(0.8))
    psi0 = np.array([1.0, 0.5j])
    t = 2.2
    bare = solve_reduced(red, psi0, t, frame="bare")
    primed = solve_reduced(red, psi0, t, frame="primed")
    assert max_abs(primed - np.exp(1j * 0.8 * t / 2) * bare) < 1e-12
    with pytest.raises(ValueError):
        solve_reduced(red, psi0, t, frame="rotating")


# ---------------------------------------------------------------------------
# the x/z exchange map
# ---------------------------------------------------------------------------


def test_km_map_direct_action():
    out = km_map(np.array([1.0, 0.0]))
    assert np.allclose(out, np.array([1.0, 1.0]) / np.sqrt(2))


def test_km_map_involutive():
    rng = np.random.default_rng(31)
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    assert max_abs(km_map(km_map(v)) - v) < 1e-15


def test_km_map_conjugation_identity():
    from twospin.linalg import SX, SZ
    rng = np.random.default_rng(32)
    for _ in range(20):
        e, f = rng.uniform(-2, 2, 2)
        lhs = HADAMARD_LIKE @ (e * SX + f * SZ) @ HADAMARD_LIKE
        assert max_abs(lhs - (f * SX + e * SZ)) < 1e-14


def test_km_map_transports_solutions():
    # evolve under (eps, 0, f); the mapped state solves (f, 0, eps)
    eps, f, t = 1.0, 0.5, 1.7
    phi0 = np.array([0.8, -0.6j])
    phi_t = expm_pauli((eps, 0, f), t) @ phi0
    mapped = km_map(phi_t)
    direct = expm_pauli((f, 0, eps), t) @ km_map(phi0)
    assert max_abs(mapped - direct) < 1e-10


# ---------------------------------------------------------------------------
# rotating-frame reduction
# ---------------------------------------------------------------------------


def test_rotating_frame_reduce_substitutions():
    rf = rotating_frame_reduce(RabiParams(A=1.0, A0=2.0, omega=2.0), 0.0,
                               RabiParams(A=0.0, A0=1.0, omega=2.0), 0.0,
                               j_coupling=0.0)
    assert np.allclose(rf.a, [0.5, 0.0, 0.5])
    assert rf.gamma == 0.0
    rf2 = rotating_frame_reduce(RabiParams(A=0.5, A0=1.0, omega=2.0), 0.3,
                                RabiParams(A=0.0, A0=1.0, omega=2.0), 0.0,
                                j_coupling=3.0)
    assert np.allclose(rf2.b, [0.0, 0.0, 0.0])  # B0 = omega/2, B = 0
    assert rf2.gamma == pytest.approx(0.75)


def test_rotating_frame_reduce_rejects_mismatched_drives():
    with pytest.raises(ValueError):
        rotating_frame_reduce(RabiParams(1.0, 1.0, 2.0), 0.0,
                              RabiParams(1.0, 1.0, 3.0), 0.0, 1.0)


def test_round_trip_through_time_dependent_problem():
    rf = RotatingFrameProblem(gamma=0.4,
                              a=np.array([0.3, 0.2, -0.1]),
                              b=np.array([0.0, -0.5, 0.25]))
    omega = 1.7
    p = to_time_dependent_problem(rf, omega)
    back = rotating_frame_reduce(
        RabiParams(p.F.A, p.F.A0, omega), p.F.phi,
        RabiParams(p.G.A, p.G.A0, omega), p.G.phi,
        p.J.value)
    assert np.allclose(back.a, rf.a) and np.allclose(back.b, rf.b)
    assert back.gamma == pytest.approx(rf.gamma)


def test_rotating_frame_solution_initial_value():
    rf = rotating_frame_reduce(RabiParams(0.8, 1.1, 1.5), 0.0,
                               RabiParams(0.4, 0.9, 1.5), 0.7, 1.2)
    res = solve_levels(rf.gamma, rf.a, rf.b)
    psi0 = rotating_frame_solution(rf, float(res.roots[0]), res.vectors[0],
                                   1.5, 0.0)
    assert max_abs(psi0 - res.vectors[0]) < 1e-12


def test_rotating_frame_solution_rejects_bogus_pair():
    rf = RotatingFrameProblem(gamma=0.3, a=np.array([0.1, 0.0, 0.4]),
                              b=np.array([0.2, 0.0, -0.3]))
    with pytest.raises(NotAnEigenpair):
        rotating_frame_solution(rf, 0.123, np.array([1, 0, 0, 0]), 1.0, 0.5)


def test_rotating_frame_residual_many_times():
    rng = np.random.default_rng(33)
    omega = 1.9
    rf = rotating_frame_reduce(RabiParams(0.7, 1.3, omega), 0.4,
                               RabiParams(0.5, 0.8, omega), 2.1, 1.6)
    res = solve_levels(rf.gamma, rf.a, rf.b)
    for lam, vec in zip(res.roots, res.vectors):
        for t in rng.uniform(0, 10, 50):
            assert rotating_frame_residual(rf, float(lam), vec, omega,
                                           float(t)) < 1e-8


def test_rotating_frame_residual_finite_difference_cross_check():
    omega = 1.4
    rf = rotating_frame_reduce(RabiParams(0.6, 1.0, omega), 0.0,
                               RabiParams(0.3, 0.7, omega), 0.9, 0.8)
    res = solve_levels(rf.gamma, rf.a, rf.b)
    p = to_time_dependent_problem(rf, omega)
    hfun = lambda t: hamiltonian_at(p, t)
    lam, vec = float(res.roots[2]), res.vectors[2]
    sol = lambda t: rotating_frame_solution(rf, lam, vec, omega, t)
    assert oracle.schrodinger_residual(hfun, sol, 1.3) < 1e-8


def test_pure_second_spin_rabi_case_matches_product_propagator():
    # coupling off and the first-spin scaled field zero: the reconstructed
    # solution is the z-rotation times Rabi propagator applied to C
    omega = 2.0
    f = RabiParams(A=0.9, A0=1.6, omega=omega)
    g = RabiParams(A=0.0, A0=omega / 2, omega=omega)
    rf = rotating_frame_reduce(f, 0.0, g, 0.0, 0.0)
    assert np.allclose(rf.b, 0.0) and rf.gamma == 0.0
    res = solve_levels(rf.gamma, rf.a, rf.b)
    for lam, vec in zip(res.roots, res.vectors):
        for t in (0.7, 1.9, 3.2):
            got = rotating_frame_solution(rf, float(lam), vec, omega, t)
            u_first = np.diag([np.exp(-1j * omega * t / 2),
                               np.exp(1j * omega * t / 2)])
            full = kron(u_first, rabi_one_spin(f, t))
            assert max_abs(got - full @ vec) < 1e-9


def test_corotating_rotation_preserves_exchange_expectation():
    rng = np.random.default_rng(34)
    for _ in range(20):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        before = psi.conj() @ EXCHANGE @ psi
        rot = corotating_rotation(1.3, float(rng.uniform(0, 7))) @ psi
        after = rot.conj() @ EXCHANGE @ rot
        assert abs(before - after) < 1e-10
