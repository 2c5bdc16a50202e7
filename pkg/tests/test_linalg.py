import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twospin import linalg
from twospin.errors import NonHermitianInput
from twospin.linalg import (EXCHANGE, ID2, ID4, PAULI, SPIN1, SPIN2, SWAP,
                            kron, max_abs)

EPSILON = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    EPSILON[_i, _j, _k], EPSILON[_j, _i, _k] = 1.0, -1.0


def test_pauli_commutators_exact():
    for i in range(3):
        for j in range(3):
            comm = PAULI[i] @ PAULI[j] - PAULI[j] @ PAULI[i]
            expected = 2j * sum(EPSILON[i, j, k] * PAULI[k] for k in range(3))
            assert max_abs(comm - expected) == 0.0


def test_pauli_anticommutators_exact():
    for i in range(3):
        for j in range(3):
            anti = PAULI[i] @ PAULI[j] + PAULI[j] @ PAULI[i]
            assert max_abs(anti - 2 * (i == j) * ID2) == 0.0


def test_kron_identity_cases():
    assert max_abs(kron(ID2, ID2) - ID4) == 0.0
    assert max_abs(kron(PAULI[2], PAULI[2])
                   - np.diag([1, -1, -1, 1])) == 0.0


def test_kron_first_factor_is_first_spin():
    # sigma_x on the first spin is block-off-diagonal identity
    expected = np.zeros((4, 4), dtype=complex)
    expected[:2, 2:] = ID2
    expected[2:, :2] = ID2
    assert max_abs(kron(PAULI[0], ID2) - expected) == 0.0
    assert max_abs(SPIN1[0] - expected) == 0.0


def test_swap_matrix_entries():
    expected = np.array([[1, 0, 0, 0],
                         [0, 0, 1, 0],
                         [0, 1, 0, 0],
                         [0, 0, 0, 1]], dtype=complex)
    assert max_abs(linalg.swap_matrix() - expected) == 0.0
    assert np.isclose(np.linalg.det(SWAP).real, -1.0)


def test_swap_is_involutive_hermitian():
    assert max_abs(SWAP @ SWAP - ID4) == 0.0
    assert max_abs(SWAP - SWAP.conj().T) == 0.0


def test_swap_conjugation_exchanges_spins():
    for i in range(3):
        assert max_abs(SWAP @ SPIN1[i] @ SWAP - SPIN2[i]) <= 1e-15
        assert max_abs(SWAP @ SPIN2[i] @ SWAP - SPIN1[i]) <= 1e-15
    assert max_abs(SWAP @ EXCHANGE @ SWAP - EXCHANGE) <= 1e-15


def test_swap_conjugation_sum_difference():
    for i in range(3):
        plus = SPIN2[i] + SPIN1[i]
        minus = SPIN2[i] - SPIN1[i]
        assert max_abs(SWAP @ plus @ SWAP - plus) <= 1e-15
        assert max_abs(SWAP @ minus @ SWAP + minus) <= 1e-15


def test_spin_sectors_commute_exactly():
    for i in range(3):
        for j in range(3):
            assert max_abs(SPIN2[i] @ SPIN1[j] - SPIN1[j] @ SPIN2[i]) == 0.0


def test_expm_zero_generator():
    u = linalg.expm_skew_hermitian(np.zeros((4, 4)), 3.7)
    assert max_abs(u - ID4) == 0.0


def test_expm_exchange_eigenphases():
    # EXCHANGE has eigenvalues (1, 1, 1, -3), so the eigenphases of
    # exp(-i EXCHANGE t) are exp(-i t) three times and exp(3 i t)
    t = 0.83
    u = linalg.expm_skew_hermitian(EXCHANGE, t)
    phases = np.sort_complex(np.linalg.eigvals(u))
    expected = np.sort_complex(np.array(
        [np.exp(-1j * t)] * 3 + [np.exp(3j * t)]))
    assert max_abs(phases - expected) < 1e-12


def test_expm_rejects_non_hermitian():
    m = np.zeros((4, 4), dtype=complex)
    m[0, 1] = 1.0
    with pytest.raises(NonHermitianInput):
        linalg.expm_skew_hermitian(m, 1.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1),
       st.floats(min_value=0.01, max_value=10.0))
def test_expm_unitary_for_random_hermitian(seed, t):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h = (m + m.conj().T) / 2
    u = linalg.expm_skew_hermitian(h, t)
    assert linalg.unitarity_defect(u) < 1e-12


def test_sinc_series_branch_matches_direct():
    for x in (1e-7, -3e-7, 1e-6):
        assert abs(linalg.sinc(x) - 1.0) < 1e-12
    xs = np.array([1e-9, 1e-3, 0.5, 2.0])
    direct = np.sin(xs) / xs
    assert np.abs(linalg.sinc(xs) - direct).max() < 1e-12
