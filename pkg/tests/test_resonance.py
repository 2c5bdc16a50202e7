import numpy as np
import pytest

from twospin.model import ConstantProfile, stationary_basis
from twospin.propagators import RabiParams, prop_equal_rabi, rabi_one_spin
from twospin.resonance import (rabi_probability, resonance_frequencies, scan,
                               transition_prefactor, two_spin_elements)


def _random_rp(rng):
    return RabiParams(A=float(rng.uniform(0.1, 2)),
                      A0=float(rng.uniform(0.1, 2)),
                      omega=float(rng.uniform(0.3, 3)))


# ---------------------------------------------------------------------------
# one-spin probability
# ---------------------------------------------------------------------------


def test_probability_zero_at_start():
    assert rabi_probability(RabiParams(1.0, 2.0, 3.0), 0.0) == 0.0


def test_probability_unit_prefactor_on_resonance():
    rp = RabiParams(A=0.6, A0=1.1, omega=2.2)
    assert transition_prefactor(rp) == pytest.approx(1.0)
    t_peak = np.pi / (2 * rp.omega_R)
    assert rabi_probability(rp, t_peak) == pytest.approx(1.0)


def test_probability_matches_matrix_element():
    rp = RabiParams(A=1.0, A0=2.0, omega=3.0)
    t = 0.7
    u = rabi_one_spin(rp, t)
    assert abs(rabi_probability(rp, t) - abs(u[1, 0]) ** 2) < 1e-12


def test_probability_formula_from_frequency_ratio():
    rng = np.random.default_rng(41)
    for _ in range(50):
        rp = _random_rp(rng)
        t = float(rng.uniform(0, 5))
        ratio2 = (rp.omega_R / rp.omega) ** 2
        expected = (ratio2 - rp.a0 ** 2) / ratio2 * np.sin(rp.omega_R * t) ** 2
        assert abs(rabi_probability(rp, t) - expected) < 1e-12


# ---------------------------------------------------------------------------
# two-spin matrix elements
# ---------------------------------------------------------------------------


def test_elements_dual_route_consistency():
    rng = np.random.default_rng(42)
    for _ in range(25):
        rp = _random_rp(rng)
        # the check flag itself enforces 1e-10 dual-route agreement
        two_spin_elements(rp, float(rng.uniform(-2, 2)),
                          float(rng.uniform(0, 6)))


def test_singlet_selection_rule():
    rng = np.random.default_rng(43)
    for _ in range(10):
        rp = _random_rp(rng)
        m = two_spin_elements(rp, 1.0, float(rng.uniform(0, 8)))
        for k in (0, 1, 3):
            assert abs(m[2, k]) < 1e-10
            assert abs(m[k, 2]) < 1e-10


def test_pair_flip_probability_is_squared_envelope():
    rng = np.random.default_rng(44)
    for _ in range(20):
        rp = _random_rp(rng)
        t = float(rng.uniform(0, 6))
        m = two_spin_elements(rp, 0.8, t)
        expected = rabi_probability(rp, t) ** 2
        assert abs(abs(m[3, 0]) ** 2 - expected) < 1e-10


def test_single_flip_probability_product_form():
    rng = np.random.default_rng(45)
    for _ in range(20):
        rp = _random_rp(rng)
        t = float(rng.uniform(0, 6))
        u = rabi_one_spin(rp, t)
        m = two_spin_elements(rp, 1.3, t)
        expected = 2 * abs(u[0, 0]) ** 2 * abs(u[1, 0]) ** 2
        assert abs(abs(m[1, 0]) ** 2 - expected) < 1e-10


def test_rows_sum_to_one():
    rp = RabiParams(0.7, 1.2, 1.8)
    m = two_spin_elements(rp, 0.9, 2.6)
    sums = (np.abs(m) ** 2).sum(axis=0)
    assert np.abs(sums - 1.0).max() < 1e-9


def test_probabilities_independent_of_coupling():
    rng = np.random.default_rng(46)
    rp = _random_rp(rng)
    t = 2.9
    base = np.abs(two_spin_elements(rp, 0.0, t, check=False)) ** 2
    for j in (0.5, 1.7, -2.3):
        probs = np.abs(two_spin_elements(rp, j, t, check=False)) ** 2
        assert np.abs(probs - base).max() < 1e-10


def test_coupling_enters_amplitudes_as_phase():
    rp = RabiParams(0.5, 1.0, 1.5)
    t = 1.3
    m0 = two_spin_elements(rp, 0.0, t, check=False)
    m1 = two_spin_elements(rp, 2.0, t, check=False)
    # triplet-sector amplitudes pick up exp(-i J t / 2)
    phase = np.exp(-1j * 2.0 * t / 2)
    assert abs(m1[3, 0] - phase * m0[3, 0]) < 1e-12


# ---------------------------------------------------------------------------
# resonance frequencies and scans
# ---------------------------------------------------------------------------


def test_resonance_frequency_values():
    pair = resonance_frequencies(0.25, 1.0)
    assert pair.omega1 == 2.0
    assert pair.omega2 == pytest.approx(1.5)
    assert not pair.omega2_degenerate


def test_resonance_frequencies_coalesce_without_amplitude():
    pair = resonance_frequencies(0.0, 0.8)
    assert pair.omega1 == pair.omega2


def test_resonance_frequency_degenerate_flag():
    pair = resonance_frequencies(1.0, 1.0)
    assert pair.omega2 == 0.0 and pair.omega2_degenerate


def test_scan_peaks_at_both_resonances():
    pair = resonance_frequencies(0.25, 1.0)
    result = scan(0.25, 1.0, 2.0, [pair.omega1, pair.omega2])
    at1, at2 = result.rows
    assert at1.p14_max == pytest.approx(1.0, abs=1e-6)
    assert at1.p21_max == pytest.approx(0.5, abs=1e-6)
    assert at1.p24_max == pytest.approx(0.5, abs=1e-6)
    assert at2.p21_max == pytest.approx(0.5, abs=1e-6)
    assert at2.p24_max == pytest.approx(0.5, abs=1e-6)
    # second resonance of the pair flip is suppressed
    assert at2.p14_max < 0.5


def test_scan_leak_is_negligible():
    result = scan(0.3, 1.0, 1.5, np.linspace(0.5, 3.0, 9))
    assert result.column("p3_leak").max() < 1e-10


def test_scan_pair_flip_decreases_off_resonance():
    omegas = np.linspace(2.0, 6.0, 9)   # at and above the peak
    result = scan(0.25, 1.0, 2.0, omegas)
    p14 = result.column("p14_max")
    assert p14[0] == pytest.approx(1.0, abs=1e-6)
    assert np.all(np.diff(p14) < 0)


def test_scan_rejects_zero_frequency():
    with pytest.raises(ValueError):
        scan(0.25, 1.0, 2.0, [1.0, 0.0, 2.0])


def test_scan_threads_agree_with_serial():
    omegas = np.linspace(0.7, 2.7, 6)
    serial = scan(0.25, 1.0, 2.0, omegas, threads=1)
    parallel = scan(0.25, 1.0, 2.0, omegas, threads=4)
    for a, b in zip(serial.rows, parallel.rows):
        assert a == b


def test_scan_peak_times_locate_maxima():
    pair = resonance_frequencies(0.25, 1.0)
    row = scan(0.25, 1.0, 2.0, [pair.omega1]).rows[0]
    rp = RabiParams(0.25, 1.0, pair.omega1)
    m = two_spin_elements(rp, 2.0, row.t14, check=False)
    assert abs(m[3, 0]) ** 2 == pytest.approx(row.p14_max, abs=1e-9)
    m2 = two_spin_elements(rp, 2.0, row.t21, check=False)
    assert abs(m2[1, 0]) ** 2 == pytest.approx(row.p21_max, abs=1e-9)


def test_equal_rabi_elements_against_direct_sandwich():
    # independent sandwich of the composed propagator
    rp = RabiParams(0.6, 1.1, 1.7)
    basis = stationary_basis().vectors
    t = 2.2
    r = prop_equal_rabi(rp, ConstantProfile(0.9), 0.0, t).matrix
    m = two_spin_elements(rp, 0.9, t)
    direct = basis.conj() @ r @ basis.T
    assert np.abs(m - direct).max() < 1e-12
