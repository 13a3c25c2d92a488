import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mcdm_rank import ConvergenceError, ValidationError
from mcdm_rank.fuzzy import defuzzify_centroid
from mcdm_rank.weighting import (
    PAPER_WEIGHTS,
    RANDOM_INDEX,
    PairwiseComparisonMatrix,
    WeightVector,
    aggregate_judgments,
    derive_weights,
    fuzzify_weights,
    principal_eigenvector,
)

CRITERIA = list(PAPER_WEIGHTS)
W = list(PAPER_WEIGHTS.values())


def eig_oracle(entries):
    """Principal eigenpair via full eigendecomposition."""
    vals, vecs = np.linalg.eig(np.asarray(entries, dtype=float))
    k = int(np.argmax(vals.real))
    v = np.abs(vecs[:, k].real)
    return vals[k].real, v / v.sum()


positive_weights = st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=2, max_size=10)


def test_paper_weights_recovered():
    wv = derive_weights(PairwiseComparisonMatrix.from_weights(CRITERIA, W))
    assert wv.criteria == tuple(CRITERIA)
    assert np.allclose(wv.weights, W, atol=1e-8, rtol=0)
    assert wv.consistency_ratio <= 1e-8
    lam, v = eig_oracle(PairwiseComparisonMatrix.from_weights(CRITERIA, W).entries)
    assert np.allclose(v, W, atol=1e-12)
    assert lam == pytest.approx(4.0, abs=1e-9)


def test_two_by_two_ones():
    wv = derive_weights(PairwiseComparisonMatrix(("a", "b"), [[1, 1], [1, 1]]))
    assert wv.weights == (0.5, 0.5)
    assert wv.consistency_ratio == 0


@pytest.mark.parametrize("n", range(2, 11))
def test_all_ones_uniform(n):
    wv = derive_weights(PairwiseComparisonMatrix(tuple(f"c{i}" for i in range(n)), np.ones((n, n))))
    assert np.allclose(wv.weights, 1.0 / n, atol=1e-15)
    assert wv.consistency_ratio == pytest.approx(0.0, abs=1e-12)


@given(positive_weights)
def test_consistent_recovery(raw):
    w = np.array(raw) / np.sum(raw)
    wv = derive_weights(PairwiseComparisonMatrix.from_weights([f"c{i}" for i in range(len(w))], w))
    assert np.allclose(wv.weights, w, atol=1e-8, rtol=0)
    assert wv.consistency_ratio <= 1e-8


@settings(max_examples=50)
@given(st.integers(min_value=3, max_value=7), st.randoms(use_true_random=False))
def test_matches_eigendecomposition_on_inconsistent(n, rnd):
    scale = [1 / 9, 1 / 7, 1 / 5, 1 / 3, 1, 3, 5, 7, 9]
    a = np.ones((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            a[i, j] = rnd.choice(scale)
            a[j, i] = 1 / a[i, j]
    m = PairwiseComparisonMatrix(tuple(f"c{i}" for i in range(n)), a)
    wv = derive_weights(m)
    lam, v = eig_oracle(a)
    assert np.allclose(wv.weights, v, atol=1e-9)
    assert wv.lambda_max == pytest.approx(lam, abs=1e-8)
    assert wv.consistency_ratio == pytest.approx(max(0.0, (lam - n) / (n - 1) / RANDOM_INDEX[n]), abs=1e-8)


def test_known_inconsistent_matrix_cr():
    # classic Saaty-style 3x3: CR well above 0.10
    a = [[1, 9, 1 / 9], [1 / 9, 1, 9], [9, 1 / 9, 1]]
    wv = derive_weights(PairwiseComparisonMatrix(("x", "y", "z"), a))
    lam, _ = eig_oracle(a)
    assert wv.consistency_ratio == pytest.approx((lam - 3) / 2 / 0.58, abs=1e-9)
    assert wv.consistency_ratio > 0.10


@given(positive_weights, st.randoms(use_true_random=False))
def test_relabel_invariance(raw, rnd):
    w = np.array(raw) / np.sum(raw)
    names = [f"c{i}" for i in range(len(w))]
    perm = list(range(len(w)))
    rnd.shuffle(perm)
    base = derive_weights(PairwiseComparisonMatrix.from_weights(names, w))
    shuffled = derive_weights(
        PairwiseComparisonMatrix.from_weights([names[i] for i in perm], w[perm])
    )
    assert np.allclose(shuffled.weights, np.array(base.weights)[perm], atol=1e-12)


def test_power_iteration_cap():
    a = np.array([[1, 3, 5], [1 / 3, 1, 7], [1 / 5, 1 / 7, 1]])
    with pytest.raises(ConvergenceError) as info:
        principal_eigenvector(a, max_iter=1)
    assert info.value.residual > 0
    assert "residual" in str(info.value)


def test_aggregate_single_is_identity():
    m = PairwiseComparisonMatrix.from_weights(CRITERIA, W)
    assert aggregate_judgments([m]) is m


def test_aggregate_geometric_mean():
    a = PairwiseComparisonMatrix(("x", "y"), [[1, 2], [0.5, 1]])
    b = PairwiseComparisonMatrix(("x", "y"), [[1, 8], [0.125, 1]])
    got = aggregate_judgments([a, b])
    assert got.entries[0, 1] == 4.0
    assert got.entries[1, 0] == 0.25
    assert got.entries[0, 1] * got.entries[1, 0] == 1.0


@given(positive_weights, st.integers(min_value=1, max_value=5))
def test_aggregate_identical(raw, k):
    m = PairwiseComparisonMatrix.from_weights([f"c{i}" for i in range(len(raw))], raw)
    got = aggregate_judgments([m] * k)
    assert np.allclose(got.entries, m.entries, rtol=1e-12, atol=0)


def test_aggregate_order_mismatch():
    a = PairwiseComparisonMatrix(("x", "y"), [[1, 2], [0.5, 1]])
    b = PairwiseComparisonMatrix(("y", "x"), [[1, 2], [0.5, 1]])
    with pytest.raises(ValidationError, match="'x' vs 'y'"):
        aggregate_judgments([a, b])
    with pytest.raises(ValidationError):
        aggregate_judgments([])


@pytest.mark.parametrize("entries, msg", [
    ([[1, 2], [2, 1]], "not reciprocal"),
    ([[2, 1], [1, 1]], "diagonal"),
    ([[1, -1], [-1, 1]], "positive"),
    ([[1, 2, 3], [0.5, 1, 1]], "shape"),
])
def test_matrix_validation(entries, msg):
    with pytest.raises(ValidationError, match=msg):
        PairwiseComparisonMatrix(("x", "y"), entries)


def test_matrix_needs_two():
    with pytest.raises(ValidationError, match="at least 2"):
        PairwiseComparisonMatrix(("x",), [[1]])


def test_matrix_json(tmp_path):
    m = PairwiseComparisonMatrix.from_weights(CRITERIA, W)
    path = tmp_path / "m.json"
    path.write_text(json.dumps(m.to_json_obj()))
    assert np.array_equal(PairwiseComparisonMatrix.load(path).entries, m.entries)


@pytest.mark.parametrize("w, spread, expected", [
    (0.60, 0.25, (0.45, 0.60, 0.75)),
    (0.9, 0.2, (0.72, 0.9, 1.0)),
    (0.3, 0.0, (0.3, 0.3, 0.3)),
])
def test_fuzzify_examples(w, spread, expected):
    wv = WeightVector(("a", "b"), (w, 1 - w))
    got = fuzzify_weights(wv, spread).fuzzy_weights[0]
    assert got.as_tuple() == pytest.approx(expected, abs=1e-15)
    assert got.m == w


@pytest.mark.parametrize("spread", [-0.1, 1.0, 1.5])
def test_fuzzify_spread_range(spread):
    with pytest.raises(ValidationError, match="spread"):
        fuzzify_weights(WeightVector.paper(), spread)


@given(positive_weights)
def test_zero_spread_centroid_recovers(raw):
    w = np.array(raw) / np.sum(raw)
    wv = WeightVector(tuple(f"c{i}" for i in range(len(w))), tuple(w))
    fz = fuzzify_weights(wv, 0.0)
    assert fz.weights == wv.weights
    assert tuple(defuzzify_centroid(t) for t in fz.fuzzy_weights) == wv.weights


def test_weight_vector_validation():
    with pytest.raises(ValidationError, match="sum"):
        WeightVector(("a", "b"), (0.5, 0.6))
    with pytest.raises(ValidationError, match="positive"):
        WeightVector(("a", "b"), (1.0, 0.0))
    with pytest.raises(ValidationError, match="duplicate"):
        WeightVector(("a", "A"), (0.5, 0.5))


def test_weight_vector_reorder_and_json(tmp_path):
    wv = WeightVector.paper()
    r = wv.reorder(["about", "Skills", "EDUCATION", "Experience"])
    assert r.weights == (0.05, 0.60, 0.15, 0.20)
    with pytest.raises(ValidationError, match="do not match"):
        wv.reorder(["Skills", "Experience"])
    path = tmp_path / "w.json"
    path.write_text(json.dumps({"criteria": CRITERIA, "weights": W}))
    assert WeightVector.load(path) == wv
