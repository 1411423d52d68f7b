import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superpose.binary_threshold import (
    binary_supports,
    brute_force_margins,
    monotone_transform_separation,
    separation_margins,
)
from superpose.constructions import rademacher_matrix
from superpose.core import gram
from superpose.errors import ContractViolation, EnumerationGuardError, ParameterError
from superpose.recovery import recovery_check


def all_binary_readouts(A, B, k):
    C = gram(B, A)
    m = C.shape[0]
    for support in binary_supports(m, k):
        z = np.zeros(m)
        z[list(support)] = 1.0
        yield z, C @ z


def test_binary_supports_count():
    assert sum(1 for _ in binary_supports(6, 2)) == 1 + 6 + 15


@pytest.mark.parametrize("k", [1, 2, 4])
def test_identity_margins(k):
    r = separation_margins(np.eye(6), np.eye(6), k)
    assert np.all(r.min_active == 1.0) and np.all(r.max_inactive == 0.0)
    assert r.separable


def test_two_feature_margins(pair2):
    A, B = pair2
    r = separation_margins(A, B, 2)
    np.testing.assert_allclose(r.margin, 1.0, atol=1e-12)
    assert r.thresholds_valid(0.5)


def test_small_rademacher_against_enumeration():
    A = rademacher_matrix(4, 8, seed=3)
    B = rademacher_matrix(4, 8, seed=4)
    fast, slow = separation_margins(A, B, 2), brute_force_margins(A, B, 2)
    np.testing.assert_allclose(fast.min_active, slow.min_active, atol=1e-12)
    np.testing.assert_allclose(fast.max_inactive, slow.max_inactive, atol=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_random_instances_against_enumeration(seed):
    rng = np.random.default_rng(seed)
    d, m, k = rng.integers(2, 7), rng.integers(3, 11), rng.integers(1, 4)
    k = min(k, m)
    A, B = rng.standard_normal((d, m)), rng.standard_normal((d, m))
    fast, slow = separation_margins(A, B, k), brute_force_margins(A, B, k)
    np.testing.assert_allclose(fast.min_active, slow.min_active, atol=1e-9)
    np.testing.assert_allclose(fast.max_inactive, slow.max_inactive, atol=1e-9)
    assert fast.separable == slow.separable


def test_enumeration_guard():
    with pytest.raises(EnumerationGuardError):
        brute_force_margins(np.eye(17), np.eye(17), 1)
    with pytest.raises(EnumerationGuardError):
        brute_force_margins(np.eye(8), np.eye(8), 5)
    with pytest.raises(ParameterError):
        separation_margins(np.eye(3), np.eye(3), 4)


def test_witness_thresholds_separate_every_input():
    A = rademacher_matrix(60, 12, seed=5)
    r = separation_margins(A, A, 2)
    assert r.separable
    for t in (r.witness_thresholds, r.midpoint_thresholds):
        assert r.thresholds_valid(t)
        for z, y in all_binary_readouts(A, A, 2):
            np.testing.assert_array_equal(y > t, z == 1.0)


def test_non_separable_has_no_thresholds():
    C = np.array([[1.0, 2.0], [0.0, 1.0]])
    r = separation_margins(np.eye(2), C.T, 1)
    assert not r.separable
    assert r.witness_thresholds is None and r.midpoint_thresholds is None
    assert r.to_dict()["witness_thresholds"] is None


def test_k_at_least_sqrt_m_flag():
    assert separation_margins(np.eye(9), np.eye(9), 3).to_dict()["k_at_least_sqrt_m"]
    assert not separation_margins(np.eye(9), np.eye(9), 2).to_dict()["k_at_least_sqrt_m"]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, 5), st.floats(0.1, 10.0))
def test_column_scaling_covariance(seed, col, c):
    rng = np.random.default_rng(seed)
    A, B = rng.standard_normal((4, 6)), rng.standard_normal((4, 6))
    base = separation_margins(A, B, 2)
    B2 = B.copy()
    B2[:, col] *= c
    scaled = separation_margins(A, B2, 2)
    # scaling probe i scales row i of the interference matrix
    assert scaled.min_active[col] == pytest.approx(c * base.min_active[col], rel=1e-9, abs=1e-12)
    assert scaled.max_inactive[col] == pytest.approx(c * base.max_inactive[col], rel=1e-9, abs=1e-12)
    assert scaled.separable == base.separable


@pytest.mark.parametrize("seed", range(10))
def test_recovery_below_half_gives_half_threshold(seed):
    rng = np.random.default_rng(seed)
    A = np.linalg.qr(rng.standard_normal((30, 10)))[0]
    B = A + 0.02 * rng.standard_normal((30, 10))
    assert recovery_check(A, B, 2, 0.45)
    r = separation_margins(A, B, 2)
    assert r.separable and r.thresholds_valid(0.5)


def relu(x):
    return np.maximum(x, 0.0)


@pytest.fixture(scope="module")
def separable_pair():
    A = rademacher_matrix(200, 16, seed=9)
    return A, A


def test_identity_sigma_with_explicit_offset(separable_pair):
    A, B = separable_pair
    r = separation_margins(A, B, 2)
    assert monotone_transform_separation(A, B, 2, lambda x: x, b_offset=-r.witness_thresholds)
    assert not monotone_transform_separation(A, B, 2, lambda x: x, b_offset=0.0)


@pytest.mark.parametrize(
    "sigma",
    [np.tanh, relu, lambda x: x - 0.3, lambda x: 0.5 * np.tanh(x / 2), math.atan],
    ids=["tanh", "relu", "shifted-identity", "centred-sigmoid", "scalar-atan"],
)
def test_auto_offset_succeeds_for_separable(separable_pair, sigma):
    A, B = separable_pair
    assert monotone_transform_separation(A, B, 2, sigma)


def test_table_sigma(separable_pair):
    A, B = separable_pair
    xs = np.linspace(-5, 5, 11)
    assert monotone_transform_separation(A, B, 2, (xs, np.tanh(xs)))
    with pytest.raises(ParameterError):
        monotone_transform_separation(A, B, 2, (xs[::-1], xs))


def test_sigma_without_sign_change_fails(separable_pair):
    A, B = separable_pair
    assert not monotone_transform_separation(A, B, 2, lambda x: 2.0 + np.tanh(x))
    assert not monotone_transform_separation(A, B, 2, lambda x: np.tanh(x) - 2.0)


def test_non_monotone_sigma_rejected(separable_pair):
    A, B = separable_pair
    with pytest.raises(ContractViolation):
        monotone_transform_separation(A, B, 2, np.sin)


def find_non_separable():
    for seed in itertools.count():
        rng = np.random.default_rng(seed)
        A, B = rng.standard_normal((3, 7)), rng.standard_normal((3, 7))
        if not separation_margins(A, B, 2).separable:
            return A, B


def test_non_separable_rejected_by_every_offset():
    A, B = find_non_separable()
    assert not brute_force_margins(A, B, 2).separable
    assert not monotone_transform_separation(A, B, 2, np.tanh)
    rng = np.random.default_rng(0)
    for _ in range(50):
        b = rng.uniform(-5, 5, 7)
        assert not monotone_transform_separation(A, B, 2, lambda x: x, b_offset=b)


@pytest.mark.parametrize("seed", range(8))
def test_transform_result_matches_enumeration(seed):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((8, 9)) / np.sqrt(8)
    B = A + rng.uniform(0, 0.5) * rng.standard_normal((8, 9))
    b = -rng.uniform(0.2, 0.8, 9)
    got = monotone_transform_separation(A, B, 2, np.tanh, b_offset=b)
    expected = all(
        np.array_equal(np.tanh(y + b) > 0, z == 1.0) for z, y in all_binary_readouts(A, B, 2)
    )
    assert got == expected
