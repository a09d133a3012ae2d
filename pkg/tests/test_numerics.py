import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lambda_holonomy.errors import DimensionMismatch, NotAntiHermitian
from lambda_holonomy.numerics import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    matexp,
    matexp_skew,
    ordered_product,
    pauli_components,
    pauli_decompose,
    unitarity_residual,
)
from lambda_holonomy.lambda_gauge import frame_matrix

from conftest import random_anti_hermitian


def taylor_oracle(m, order=30):
    """Plain partial sum of the exponential series, no scaling."""
    out = np.eye(m.shape[0], dtype=complex)
    term = np.eye(m.shape[0], dtype=complex)
    for k in range(1, order + 1):
        term = term @ m / k
        out = out + term
    return out


def test_exp_of_zero_is_identity():
    assert np.array_equal(matexp_skew(np.zeros((3, 3))), np.eye(3))


def test_exp_of_half_pi_sigma_x():
    u = matexp_skew(1j * math.pi / 2 * SIGMA_X)
    np.testing.assert_allclose(u, 1j * SIGMA_X, atol=1e-15)


@pytest.mark.parametrize("dim", [2, 3])
def test_matches_taylor_oracle(rng, dim):
    for _ in range(200):
        m = random_anti_hermitian(rng, dim, rng.uniform(0.01, 1.0))
        np.testing.assert_allclose(matexp_skew(m), taylor_oracle(m), atol=1e-13, rtol=0)


def test_rejects_hermitian_input():
    with pytest.raises(NotAntiHermitian):
        matexp_skew(SIGMA_X)


def test_general_exp_handles_non_normal():
    m = np.array([[0.3, 1.0], [0.0, -0.2]], dtype=complex)
    np.testing.assert_allclose(matexp(m), taylor_oracle(m, 60), atol=1e-14)


def test_stacked_exponentials_match_single(rng):
    stack = np.stack([random_anti_hermitian(rng, 3, s) for s in (0.0, 0.1, 3.0, 9.0)])
    out = matexp_skew(stack)
    for m, u in zip(stack, out):
        np.testing.assert_allclose(u, matexp_skew(m), atol=1e-14)


@given(st.integers(0, 2**32 - 1), st.floats(0.0, 10.0), st.sampled_from([2, 3]))
def test_exp_is_unitary_and_invertible(seed, norm, dim):
    m = random_anti_hermitian(np.random.default_rng(seed), dim, norm)
    u = matexp_skew(m)
    assert unitarity_residual(u) <= 1e-12
    np.testing.assert_allclose(u @ matexp_skew(-m), np.eye(dim), atol=1e-12)


def test_unitarity_residual_values():
    assert unitarity_residual(np.eye(3)) == 0.0
    assert unitarity_residual(2 * np.eye(2)) == pytest.approx(3 * math.sqrt(2), rel=1e-15)


def test_frame_unitarity_at_random_angles(rng):
    theta = rng.uniform(0, math.pi / 2, 1000)
    phi = rng.uniform(0, 2 * math.pi, 1000)
    for gamma in rng.uniform(0, math.pi / 4, 5):
        assert unitarity_residual(frame_matrix(theta, phi, gamma)).max() <= 1e-13


def test_pauli_decompose_examples():
    assert pauli_decompose(SIGMA_Y).as_array().tolist() == [0, 0, 1, 0]
    assert pauli_decompose(-1j * SIGMA_Z).as_array().tolist() == [0, 0, 0, -1j]


def test_pauli_decompose_rejects_3x3():
    with pytest.raises(DimensionMismatch):
        pauli_decompose(np.eye(3))


def test_pauli_round_trip(rng):
    for _ in range(1000):
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        np.testing.assert_allclose(pauli_decompose(m).recompose(), m, atol=1e-14, rtol=0)


@given(st.integers(0, 2**32 - 1), st.complex_numbers(max_magnitude=10), st.complex_numbers(max_magnitude=10))
def test_pauli_decompose_is_linear(seed, a, b):
    r = np.random.default_rng(seed)
    m, n = (r.normal(size=(2, 2)) + 1j * r.normal(size=(2, 2)) for _ in range(2))
    lhs = pauli_components(a * m + b * n)
    rhs = a * pauli_components(m) + b * pauli_components(n)
    np.testing.assert_allclose(lhs, rhs, atol=1e-13 * (1 + abs(a) + abs(b)) * 10)


def test_ordered_product_puts_later_factors_left(rng):
    factors = np.stack([matexp_skew(random_anti_hermitian(rng, 2, 1.0)) for _ in range(7)])
    expected = np.eye(2)
    for f in factors:
        expected = f @ expected
    np.testing.assert_allclose(ordered_product(factors), expected, atol=1e-14)
