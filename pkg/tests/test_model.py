import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twospin.errors import OutOfRange, ZeroDriveFrequency
from twospin.linalg import EXCHANGE, ID4, max_abs
from twospin.model import (ConstantField, ConstantProfile, ParallelZField,
                           RabiField, SampledProfile, TwoSpinProblem,
                           ZeroField, exchange_eigenvalues, field_at,
                           interaction_integral, profile_value,
                           stationary_basis)


def test_rabi_field_values():
    f = RabiField(A=1.0, A0=2.0, omega=3.0)
    assert np.allclose(field_at(f, 0.0), [1.0, 0.0, 2.0], atol=1e-15)
    g = RabiField(A=1.0, A0=0.0, omega=np.pi, phi=np.pi / 2)
    assert np.allclose(field_at(g, 0.0), [0.0, 1.0, 0.0], atol=1e-15)


def test_zero_field_everywhere():
    for t in (-2.0, 0.0, 17.3):
        assert np.all(field_at(ZeroField(), t) == 0.0)


def test_constant_and_parallel_fields():
    c = ConstantField((0.3, -0.2, 1.5))
    assert np.allclose(field_at(c, 5.0), [0.3, -0.2, 1.5])
    p = ParallelZField(ConstantProfile(0.7))
    assert np.allclose(field_at(p, 2.0), [0.0, 0.0, 0.7])


def test_field_at_vectorized_shape():
    f = RabiField(A=0.5, A0=1.0, omega=2.0)
    ts = np.linspace(0, 5, 11)
    vals = field_at(f, ts)
    assert vals.shape == (11, 3)
    for i, t in enumerate(ts):
        assert np.allclose(vals[i], field_at(f, float(t)))


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=0.05, max_value=5.0),
       st.floats(min_value=-3.0, max_value=3.0),
       st.floats(min_value=0.1, max_value=5.0),
       st.floats(min_value=0.0, max_value=6.3),
       st.floats(min_value=-20.0, max_value=20.0))
def test_rabi_field_traces_circle(amp, a0, omega, phi, t):
    f = RabiField(A=amp, A0=a0, omega=omega, phi=phi)
    v = field_at(f, t)
    assert abs(np.hypot(v[0], v[1]) - amp) < 1e-12


def test_rabi_requires_nonzero_omega():
    with pytest.raises(ZeroDriveFrequency):
        RabiField(A=1.0, A0=0.0, omega=0.0)


def test_constant_integral_exact():
    j = ConstantProfile(2.0)
    assert interaction_integral(j, 0.0, np.pi) == pytest.approx(2 * np.pi,
                                                                abs=1e-15)
    assert interaction_integral(j, 1.3, 1.3) == 0.0


def test_sampled_linear_ramp_integral():
    # J(tau) = tau sampled densely; the antiderivative tau^2/2 is the oracle
    knots = tuple((t, t) for t in np.linspace(0.0, 1.0, 101))
    prof = SampledProfile(knots)
    assert abs(interaction_integral(prof, 0.0, 1.0) - 0.5) < 1e-8
    assert abs(interaction_integral(prof, 0.2, 0.9)
               - (0.9 ** 2 - 0.2 ** 2) / 2) < 1e-8


def test_sampled_integral_additive():
    rng = np.random.default_rng(5)
    knots = tuple((t, float(rng.normal())) for t in np.linspace(0, 4, 21))
    prof = SampledProfile(knots)
    a = interaction_integral(prof, 0.0, 1.7)
    b = interaction_integral(prof, 1.7, 3.2)
    whole = interaction_integral(prof, 0.0, 3.2)
    assert abs(a + b - whole) < 1e-10


def test_sampled_integral_reversed_sign():
    knots = tuple((t, 1.0 + t) for t in np.linspace(0, 2, 21))
    prof = SampledProfile(knots)
    fwd = interaction_integral(prof, 0.3, 1.8)
    assert abs(interaction_integral(prof, 1.8, 0.3) + fwd) < 1e-12


def test_out_of_range_rejected():
    prof = SampledProfile(((0.0, 1.0), (1.0, 2.0)))
    with pytest.raises(OutOfRange):
        profile_value(prof, 1.5)
    with pytest.raises(OutOfRange):
        interaction_integral(prof, 0.0, 2.0)


def test_linear_interpolation_flag():
    prof = SampledProfile(((0.0, 0.0), (1.0, 2.0), (2.0, 0.0)),
                          interp="linear")
    assert profile_value(prof, 0.5) == pytest.approx(1.0)
    # triangle area
    assert interaction_integral(prof, 0.0, 2.0) == pytest.approx(2.0,
                                                                 abs=1e-12)


def test_sampled_profile_validation():
    with pytest.raises(ValueError):
        SampledProfile(((0.0, 1.0),))
    with pytest.raises(ValueError):
        SampledProfile(((0.0, 1.0), (0.0, 2.0)))
    with pytest.raises(ValueError):
        SampledProfile(((0.0, 1.0), (1.0, 2.0)), interp="spline")


def test_problem_requires_finite_t0():
    with pytest.raises(ValueError):
        TwoSpinProblem(t0=np.inf)


def test_stationary_basis_orthonormal():
    b = stationary_basis().vectors
    assert max_abs(b.conj() @ b.T - ID4) < 1e-14


def test_stationary_basis_diagonalizes_exchange():
    b = stationary_basis().vectors
    assert max_abs(EXCHANGE @ b[2] + 3.0 * b[2]) < 1e-14   # singlet
    assert max_abs(EXCHANGE @ b[0] - b[0]) < 1e-14          # both-up triplet
    d = b.conj() @ EXCHANGE @ b.T
    assert max_abs(d - np.diag(exchange_eigenvalues())) < 1e-14


def test_singlet_is_antisymmetric_combination():
    b = stationary_basis()
    expected = np.array([0, -1, 1, 0]) / np.sqrt(2)
    assert max_abs(b.singlet - expected) < 1e-15
