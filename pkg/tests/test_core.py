import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superpose.constructions import rademacher_matrix
from superpose.core import (
    SparseVector,
    as_matrix,
    coherence,
    column_norms,
    gram,
    normalize_columns,
)
from superpose.errors import (
    DegenerateInputError,
    DimensionError,
    NonFiniteError,
    ParameterError,
    SingularColumnError,
)

from conftest import loop_gram, pair_scan_mu


def test_gram_two_feature_is_identity(pair2):
    A, B = pair2
    np.testing.assert_allclose(gram(B, A), np.eye(2), atol=1e-12, rtol=0)


def test_gram_identity():
    np.testing.assert_array_equal(gram(np.eye(3), np.eye(3)), np.eye(3))


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_gram_matches_triple_loop(seed):
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((3, 2))
    A = rng.standard_normal((3, 2))
    np.testing.assert_allclose(gram(B, A), loop_gram(B.tolist(), A.tolist()), atol=1e-12, rtol=0)


def test_gram_shape_mismatch_names_both_shapes():
    with pytest.raises(DimensionError, match=r"3x2.*3x4"):
        gram(np.ones((3, 2)), np.ones((3, 4)))


def test_gram_output_is_read_only():
    C = gram(np.eye(2), np.eye(2))
    with pytest.raises(ValueError):
        C[0, 0] = 5.0


def test_as_matrix_rejects_non_finite():
    with pytest.raises(NonFiniteError, match=r"\(1, 0\)"):
        as_matrix([[1.0, 2.0], [np.nan, 0.0]])
    with pytest.raises(DimensionError):
        as_matrix([1.0, 2.0])


def test_coherence_identity():
    s = coherence(np.eye(4))
    assert s.mu == 0.0
    assert s.diag_min == s.diag_max == 1.0


def test_coherence_two_feature(pair2):
    A, B = pair2
    assert coherence(gram(B, A)).mu < 1e-12


def test_coherence_matches_pair_scan():
    M = rademacher_matrix(16, 64, seed=3)
    C = gram(M, M)
    s = coherence(C)
    mu, pair = pair_scan_mu(C.tolist())
    assert s.mu == mu
    assert s.argmax_pair == pair
    assert s.mu == abs(C[s.argmax_pair])


def test_coherence_ties_go_to_smallest_pair():
    C = np.array([[1.0, 0.5, -0.5], [0.5, 1.0, 0.1], [0.5, 0.2, 1.0]])
    assert coherence(C).argmax_pair == (0, 1)


def test_coherence_degenerate():
    with pytest.raises(DegenerateInputError):
        coherence(np.eye(1))
    with pytest.raises(DimensionError):
        coherence(np.ones((2, 3)))


def test_normalize_columns():
    np.testing.assert_allclose(normalize_columns([[3.0], [4.0]]), [[0.6], [0.8]], atol=1e-15)
    unit = np.eye(3)[:, :2]
    np.testing.assert_allclose(normalize_columns(unit), unit, atol=1e-12)


def test_normalize_columns_seeded_norms():
    M = np.random.default_rng(11).standard_normal((7, 30))
    N = normalize_columns(M)
    norms = [math.sqrt(sum(x * x for x in N[:, j])) for j in range(N.shape[1])]
    np.testing.assert_allclose(norms, 1.0, atol=1e-12, rtol=0)
    # direction preserved: positive multiple of the input column
    ratios = N / M
    np.testing.assert_allclose(ratios, np.broadcast_to(ratios[0], ratios.shape), rtol=1e-12)
    assert np.all(ratios > 0)


def test_normalize_columns_zero_column():
    with pytest.raises(SingularColumnError) as err:
        normalize_columns([[1.0, 0.0, 2.0], [0.0, 0.0, 1.0]])
    assert err.value.index == 1


matrices = st.integers(1, 6).flatmap(
    lambda d: st.integers(2, 6).flatmap(
        lambda m: st.tuples(
            st.lists(st.floats(-10, 10), min_size=d * m, max_size=d * m).map(lambda v: np.reshape(v, (d, m))),
            st.lists(st.floats(-10, 10), min_size=d * m, max_size=d * m).map(lambda v: np.reshape(v, (d, m))),
        )
    )
)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_gram_transpose_symmetry(pair):
    B, A = pair
    np.testing.assert_allclose(gram(B, A).T, gram(A, B), atol=1e-12, rtol=0)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_self_gram_diagonal_is_squared_norms(pair):
    M, _ = pair
    s = coherence(gram(M, M))
    sq = column_norms(M) ** 2
    assert s.diag_min == pytest.approx(sq.min(), abs=1e-12, rel=1e-12)
    assert s.diag_max == pytest.approx(sq.max(), abs=1e-12, rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32), st.permutations(range(8)))
def test_coherence_permutation_invariant(seed, perm):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((5, 8))
    B = rng.standard_normal((5, 8))
    base = coherence(gram(B, A)).mu
    assert coherence(gram(B[:, perm], A[:, perm])).mu == base


def test_sparse_vector_roundtrip_and_validation():
    z = SparseVector(6, (1, 4), (0.5, -1.0))
    np.testing.assert_array_equal(z.to_dense(), [0, 0.5, 0, 0, -1.0, 0])
    assert SparseVector.from_dense(z.to_dense()) == z
    assert z.sparsity == 2
    with pytest.raises(ParameterError):
        SparseVector(6, (4, 1), (0.5, 0.5))
    with pytest.raises(ParameterError):
        SparseVector(6, (1,), (1.5,))
    with pytest.raises(ParameterError):
        SparseVector(3, (3,), (1.0,))
    with pytest.raises(ParameterError):
        SparseVector(6, (1,), (0.5,), binary=True)


def test_sparse_vector_random_modes():
    rng = np.random.default_rng(0)
    for mode in ("signs", "uniform", "binary"):
        z = SparseVector.random(20, 5, rng, mode)
        assert z.sparsity == 5
        assert z.binary == (mode == "binary")
