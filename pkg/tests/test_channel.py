import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqcoding import channel as ch
from cqcoding import operators as ops
from cqcoding import sampling as sm
from cqcoding.channel import CqChannel
from oracles import binary_entropy, classical_capacity, classical_mutual_info

seeds = st.integers(0, 2**32 - 1)


def test_zero_plus_mutual_info(zero_plus):
    # H(PW) from the 2x2 eigenvalues; both letters pure
    expected = binary_entropy(0.8535533905932737)
    assert ch.mutual_info(zero_plus, [0.5, 0.5]) == pytest.approx(expected, abs=1e-12)
    assert ch.mutual_info(zero_plus, [0.5, 0.5]) == pytest.approx(0.6008760366928563, abs=1e-12)


def test_diagonal_channel_mutual_info():
    W = CqChannel.from_states([np.diag([1.0, 0.0]), np.diag([0.5, 0.5])])
    expected = binary_entropy(0.75) - 0.5
    assert ch.mutual_info(W, [0.5, 0.5]) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.3112781244591328, abs=1e-15)


def test_capacity_orthogonal(orthogonal_pure):
    res = ch.capacity(orthogonal_pure)
    assert res.capacity == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_allclose(res.maximizer, [0.5, 0.5], atol=1e-6)
    assert res.gap_bound <= 1e-9


def test_capacity_zero_plus(zero_plus):
    res = ch.capacity(zero_plus)
    assert res.capacity == pytest.approx(0.6008760366928563, abs=1e-9)
    assert ch.capacity_grid_oracle(zero_plus, 0.01) == pytest.approx(res.capacity, abs=1e-4)


def test_capacity_bsc(bsc):
    res = ch.capacity(bsc)
    assert res.capacity == pytest.approx(1 - binary_entropy(0.1), abs=1e-9)
    assert res.capacity == pytest.approx(0.5310044064107188, abs=1e-9)


def test_capacity_single_letter():
    W = CqChannel.from_states([np.eye(2) / 2])
    res = ch.capacity(W)
    assert res.capacity == pytest.approx(0.0, abs=1e-12)
    assert res.iterations == 0 or res.gap_bound <= 1e-9


def test_capacity_iteration_cap_raises():
    # asymmetric, so the uniform start is not already optimal
    W = CqChannel.from_states([np.diag([1.0, 0.0]), np.diag([0.5, 0.5])])
    with pytest.raises(ch.CapacityError) as info:
        ch.capacity(W, tol=1e-15, max_iter=2)
    assert info.value.best is not None


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(2, 3), st.integers(2, 3))
def test_capacity_agrees_with_grid(seed, a, d):
    rng = np.random.default_rng(seed)
    W = sm.random_channel(a, d, rng)
    res = ch.capacity(W)
    grid = ch.capacity_grid_oracle(W, 0.02 if a == 3 else 0.005)
    assert grid <= res.capacity + 1e-9
    assert res.capacity - grid < 5e-3
    assert ch.mutual_info(W, res.maximizer) == pytest.approx(res.capacity, abs=1e-9)


def test_commuting_channels_match_classical_oracle():
    rng = np.random.default_rng(11)
    for _ in range(25):
        a, d = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        W = sm.random_commuting_channel(a, d, rng)
        # rotated channels share the eigenbasis, so read probabilities there
        U = W.decompositions[0].eigenvectors
        V = np.array([np.real(np.diag(U.conj().T @ s @ U)) for s in W.states])
        assert ch.capacity(W).capacity == pytest.approx(classical_capacity(V), abs=1e-6)
        p = sm.random_distribution(a, rng)
        assert ch.mutual_info(W, p) == pytest.approx(classical_mutual_info(V, p), abs=1e-9)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_mutual_info_concave_and_bounded(seed):
    rng = np.random.default_rng(seed)
    a, d = int(rng.integers(2, 5)), int(rng.integers(2, 5))
    W = sm.random_channel(a, d, rng)
    p, q = sm.random_distribution(a, rng), sm.random_distribution(a, rng)
    ip, iq = ch.mutual_info(W, p), ch.mutual_info(W, q)
    assert -1e-12 <= ip <= min(math.log2(a), math.log2(d)) + 1e-9
    assert ch.mutual_info(W, (p + q) / 2) >= (ip + iq) / 2 - 1e-9


def test_relative_entropy():
    assert ch.relative_entropy(np.diag([1.0, 0.0]), np.eye(2) / 2) == pytest.approx(1.0, abs=1e-12)
    assert ch.relative_entropy(np.eye(2) / 2, np.diag([1.0, 0.0])) == math.inf
    rho = np.diag([0.75, 0.25])
    assert ch.relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-12)


def test_channel_validation():
    with pytest.raises(ValueError, match="dimension"):
        CqChannel.from_states([np.eye(2) / 2, np.eye(3) / 3])
    with pytest.raises(ValueError, match="distinct"):
        CqChannel(("x", "x"), (np.eye(2) / 2, np.eye(2) / 2))
    with pytest.raises(ValueError):
        CqChannel.from_states([np.eye(2)])


def test_as_distribution():
    np.testing.assert_allclose(ch.as_distribution([0.25, 0.75]), [0.25, 0.75])
    with pytest.raises(ValueError):
        ch.as_distribution([0.5, 0.6])
    with pytest.raises(ValueError):
        ch.as_distribution([1.5, -0.5])
    with pytest.raises(ValueError):
        ch.as_distribution([0.5, 0.5], 3)


def test_product_state_and_commuting(orthogonal_pure, zero_plus):
    s = orthogonal_pure.product_state((0, 1))
    np.testing.assert_allclose(s, np.diag([0, 1, 0, 0]), atol=1e-15)
    assert orthogonal_pure.is_commuting()
    assert not zero_plus.is_commuting()
    with pytest.raises(ops.DimensionCapError):
        orthogonal_pure.product_state((0,) * 13)
