import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqcoding import operators as ops
from cqcoding import sampling as sm
from oracles import binary_entropy, eigenvalues_2x2

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 5)


def test_eig_identity():
    dec = ops.eig_decompose(np.eye(2))
    np.testing.assert_array_equal(dec.eigenvalues, [1.0, 1.0])
    np.testing.assert_allclose(dec.reconstruct(), np.eye(2), atol=1e-15)
    # canonical tie-break: the standard basis itself
    np.testing.assert_allclose(dec.eigenvectors, np.eye(2), atol=1e-15)


def test_eig_diagonal():
    dec = ops.eig_decompose(np.diag([0.75, 0.25]))
    np.testing.assert_allclose(dec.eigenvalues, [0.75, 0.25])
    np.testing.assert_allclose(dec.projectors[0], np.diag([1, 0]), atol=1e-15)
    np.testing.assert_allclose(dec.projectors[1], np.diag([0, 1]), atol=1e-15)


def test_eig_zero_plus_matches_characteristic_polynomial():
    plus = np.array([1, 1]) / np.sqrt(2)
    m = (np.diag([1.0, 0.0]) + np.outer(plus, plus)) / 2
    dec = ops.eig_decompose(m)
    expected = eigenvalues_2x2(m)
    np.testing.assert_allclose(dec.eigenvalues, expected, atol=1e-12)
    np.testing.assert_allclose(dec.eigenvalues, [0.8535533905932737, 0.1464466094067262], atol=1e-12)


def test_eig_degenerate_basis_is_canonical():
    # eigenspace for eigenvalue 1 of diag(1, 1, 0) rotated inside its own span
    c, s = math.cos(0.3), math.sin(0.3)
    rot = np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])
    m = rot @ np.diag([1.0, 1.0, 0.0]) @ rot.T
    dec = ops.eig_decompose(m)
    np.testing.assert_allclose(dec.eigenvectors[:, :2], np.eye(3)[:, :2], atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(seeds, dims)
def test_eig_invariants(seed, d):
    rng = np.random.default_rng(seed)
    a = sm.random_hermitian(d, rng)
    if d > 2 and rng.uniform() < 0.5:
        # force a degenerate eigenvalue
        w, v = np.linalg.eigh(a)
        w[1] = w[0]
        a = (v * w) @ v.conj().T
        a = (a + a.conj().T) / 2
    dec = ops.eig_decompose(a)
    v = dec.eigenvectors
    assert np.all(np.diff(dec.eigenvalues) <= 0)
    assert np.max(np.abs(v.conj().T @ v - np.eye(d))) < 1e-9
    assert np.max(np.abs(dec.reconstruct() - a)) < 1e-9
    again = ops.eig_decompose(a.copy())
    assert dec.same_as(again)


def test_eig_failure_reports_matrix():
    bad = np.array([[np.nan, 0], [0, 1.0]])
    with pytest.raises(ops.EigenDecompositionError, match="matrix"):
        ops.eig_decompose(bad)


def test_tensor_examples():
    np.testing.assert_array_equal(ops.tensor(np.eye(2), np.eye(2)), np.eye(4))
    np.testing.assert_array_equal(ops.tensor(np.diag([1, 0]), np.diag([0, 1])), np.diag([0, 1, 0, 0]))


def test_tensor_cap():
    with pytest.raises(ops.DimensionCapError):
        ops.tensor(np.eye(64), np.eye(65))
    with pytest.raises(ops.DimensionCapError):
        ops.tensor(np.eye(4), np.eye(4), cap=15)


def test_tensor_trace_multiplicative():
    rng = np.random.default_rng(0)
    for _ in range(100):
        a = sm.random_hermitian(int(rng.integers(1, 4)), rng)
        b = sm.random_hermitian(int(rng.integers(1, 4)), rng)
        assert np.trace(ops.tensor(a, b)) == pytest.approx(np.trace(a) * np.trace(b), abs=1e-10)


@pytest.mark.parametrize("matrix, expected", [
    (np.eye(2), 2.0),
    (np.diag([1.0, 0.0]) - np.eye(2) / 2, 1.0),
    (np.zeros((3, 3)), 0.0),
])
def test_trace_norm(matrix, expected):
    assert ops.trace_norm(matrix) == pytest.approx(expected, abs=1e-12)


def test_positive_negative_parts_examples():
    plus, minus = ops.positive_negative_parts(np.diag([3.0, -2.0]))
    np.testing.assert_allclose(plus, np.diag([3, 0]), atol=1e-12)
    np.testing.assert_allclose(minus, np.diag([0, 2]), atol=1e-12)
    psd = np.array([[2, 1], [1, 2]], dtype=complex)
    plus, minus = ops.positive_negative_parts(psd)
    np.testing.assert_allclose(plus, psd, atol=1e-12)
    np.testing.assert_allclose(minus, 0, atol=1e-12)


def test_positive_negative_parts_random():
    rng = np.random.default_rng(1)
    for _ in range(100):
        a = sm.random_hermitian(int(rng.integers(1, 6)), rng)
        plus, minus = ops.positive_negative_parts(a)
        assert ops.min_eigenvalue(plus) > -1e-9 and ops.min_eigenvalue(minus) > -1e-9
        assert np.max(np.abs(plus - minus - a)) < 1e-9
        assert np.max(np.abs(plus @ minus)) < 1e-9
        eig_sum = np.sum(np.abs(np.linalg.eigvalsh(a)))
        assert np.trace(plus).real + np.trace(minus).real == pytest.approx(eig_sum, abs=1e-9)


@settings(max_examples=80, deadline=None)
@given(seeds, dims)
def test_trace_norm_is_max_over_contractions(seed, d):
    rng = np.random.default_rng(seed)
    a = sm.random_hermitian(d, rng)
    norm = ops.trace_norm(a)
    sign = ops.sign_operator(a)
    assert np.trace(a @ sign).real == pytest.approx(norm, abs=1e-9)
    # any -I <= B <= I: random Hermitian rescaled into the operator interval
    b = sm.random_hermitian(d, rng)
    b = b / max(1.0, np.max(np.abs(np.linalg.eigvalsh(b))))
    assert np.trace(a @ b).real <= norm + 1e-9


def test_entropy_examples():
    rng = np.random.default_rng(2)
    assert ops.von_neumann_entropy(sm.random_pure_state(3, rng)) == pytest.approx(0, abs=1e-9)
    assert ops.von_neumann_entropy(np.eye(2) / 2) == pytest.approx(1.0, abs=1e-12)
    assert ops.von_neumann_entropy(np.diag([0.75, 0.25])) == pytest.approx(0.8112781244591328, abs=1e-12)
    assert binary_entropy(0.25) == pytest.approx(0.8112781244591328, abs=1e-15)


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(2, 5))
def test_entropy_concave_and_bounded(seed, d):
    rng = np.random.default_rng(seed)
    rho, sigma = sm.random_density(d, rng), sm.random_density(d, rng)
    h = ops.von_neumann_entropy
    assert 0 <= h(rho) <= math.log2(d) + 1e-9
    assert h((rho + sigma) / 2) >= (h(rho) + h(sigma)) / 2 - 1e-9


def test_density_validation():
    with pytest.raises(ValueError, match="unit trace"):
        ops.density(np.eye(2))
    with pytest.raises(ValueError, match="negative eigenvalue"):
        ops.density(np.diag([1.5, -0.5]))
    with pytest.raises(ValueError, match="Hermitian"):
        ops.density(np.array([[0.5, 1], [0, 0.5]]))
    clamped = ops.density(np.diag([1 + 5e-11, -5e-11]))
    assert np.min(np.linalg.eigvalsh(clamped)) >= 0
