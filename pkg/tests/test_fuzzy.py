import json
import math

import pytest
from hypothesis import given, strategies as st

from mcdm_rank import ValidationError
from mcdm_rank.fuzzy import (
    DEFAULT_VOCABULARY,
    LinguisticVocabulary,
    TriangularFuzzyNumber as TFN,
    defuzzify_centroid,
    lookup_linguistic,
    tfn_aggregate,
    tfn_distance,
    tfn_new,
)

finite = st.floats(min_value=0.0, max_value=10.0, allow_nan=False)


@st.composite
def tfns(draw):
    l, m, u = sorted(draw(st.lists(finite, min_size=3, max_size=3)))
    return TFN(l, m, u)


def test_construct_medium():
    a = tfn_new(0.3, 0.5, 0.7)
    assert a.as_tuple() == (0.3, 0.5, 0.7)
    assert a == DEFAULT_VOCABULARY.lookup("Medium")


def test_degenerate_allowed():
    a = tfn_new(1, 1, 1)
    assert a.is_degenerate
    assert defuzzify_centroid(a) == 1.0


@pytest.mark.parametrize("args, field", [
    ((0.5, 0.3, 0.7), "l > m"),
    ((0.1, 0.8, 0.7), "m > u"),
    ((math.nan, 0.5, 0.7), "field l"),
    ((0.1, 0.5, math.inf), "field u"),
])
def test_construction_errors_name_field(args, field):
    with pytest.raises(ValidationError, match=field):
        tfn_new(*args)


@given(st.lists(finite, min_size=3, max_size=3))
def test_ordering_enforced(triple):
    l, m, u = triple
    if l <= m <= u:
        t = TFN(l, m, u)
        assert t.l <= t.m <= t.u
    else:
        with pytest.raises(ValidationError):
            TFN(l, m, u)


@pytest.mark.parametrize("term, expected", [
    ("Very High", (0.7, 0.9, 1.0)),
    ("very low", (0.0, 0.1, 0.3)),
    ("  HIGH ", (0.5, 0.7, 0.9)),
])
def test_lookup(term, expected):
    assert lookup_linguistic(DEFAULT_VOCABULARY, term).as_tuple() == expected


def test_lookup_unknown_lists_terms():
    with pytest.raises(ValidationError, match="Very Low, Low, Medium, High, Very High"):
        lookup_linguistic(DEFAULT_VOCABULARY, "Gigantic")


def test_default_vocabulary_is_five_terms():
    assert DEFAULT_VOCABULARY.terms == ["Very Low", "Low", "Medium", "High", "Very High"]


def test_vocabulary_rejects_duplicates_and_disorder():
    with pytest.raises(ValidationError, match="duplicate"):
        LinguisticVocabulary([("Low", TFN(0, 0.1, 0.2)), ("low", TFN(0.1, 0.3, 0.5))])
    with pytest.raises(ValidationError, match="increase"):
        LinguisticVocabulary([("A", TFN(0.1, 0.5, 0.6)), ("B", TFN(0, 0.5, 0.9))])
    with pytest.raises(ValidationError, match="empty"):
        LinguisticVocabulary([])


def test_vocabulary_json_roundtrip(tmp_path):
    text = DEFAULT_VOCABULARY.to_json()
    assert LinguisticVocabulary.from_json(text) == DEFAULT_VOCABULARY
    path = tmp_path / "vocab.json"
    path.write_text(text)
    assert LinguisticVocabulary.load(path) == DEFAULT_VOCABULARY
    assert json.loads(text)[0] == {"term": "Very Low", "l": 0.0, "m": 0.1, "u": 0.3}


def test_vocabulary_json_errors():
    with pytest.raises(ValidationError):
        LinguisticVocabulary.from_json('{"term": "x"}')
    with pytest.raises(ValidationError, match="lacks u"):
        LinguisticVocabulary.from_json('[{"term": "x", "l": 0, "m": 1}]')
    with pytest.raises(ValidationError, match="not valid JSON"):
        LinguisticVocabulary.from_json("[")


@pytest.mark.parametrize("tfns_in, expected", [
    ([(0.3, 0.5, 0.7), (0.5, 0.7, 0.9)], (0.4, 0.6, 0.8)),
    ([(0.1, 0.3, 0.5)], (0.1, 0.3, 0.5)),
    ([(0, 0.1, 0.3), (0.7, 0.9, 1.0)], (0.35, 0.5, 0.65)),
])
def test_aggregate_examples(tfns_in, expected):
    got = tfn_aggregate([TFN(*t) for t in tfns_in])
    assert got.as_tuple() == pytest.approx(expected, abs=1e-15)


def test_aggregate_empty():
    with pytest.raises(ValidationError):
        tfn_aggregate([])


@given(tfns(), st.integers(min_value=1, max_value=12))
def test_aggregate_idempotent(a, k):
    got = tfn_aggregate([a] * k)
    assert got.as_tuple() == pytest.approx(a.as_tuple(), abs=1e-12)


@given(st.lists(tfns(), min_size=1, max_size=6), st.lists(tfns(), min_size=1, max_size=6))
def test_aggregate_linearity(xs, ys):
    combined = tfn_aggregate(xs + ys)
    a, b = tfn_aggregate(xs), tfn_aggregate(ys)
    n, k = len(xs), len(ys)
    for field in ("l", "m", "u"):
        weighted = (getattr(a, field) * n + getattr(b, field) * k) / (n + k)
        assert getattr(combined, field) == pytest.approx(weighted, abs=1e-12)


def test_centroid_examples():
    assert defuzzify_centroid(TFN(0.3, 0.5, 0.7)) == pytest.approx(0.5, abs=1e-15)
    assert defuzzify_centroid(TFN(0.7, 0.9, 1.0)) == pytest.approx(2.6 / 3, abs=1e-15)
    assert defuzzify_centroid(TFN(2, 2, 2)) == 2


@given(finite)
def test_centroid_degenerate_exact(c):
    assert defuzzify_centroid(TFN(c, c, c)) == c


@given(finite, finite)
def test_centroid_symmetric_equals_modal(m, h):
    a = TFN(m - h, m, m + h)
    assert defuzzify_centroid(a) == pytest.approx(a.m, abs=1e-12)


def test_distance_examples():
    assert tfn_distance(TFN(0.3, 0.5, 0.7), TFN(0.3, 0.5, 0.7)) == 0
    assert tfn_distance(TFN(0, 0, 0), TFN(1, 1, 1)) == 1
    # vertex formula: sqrt((0.7^2 + 0.8^2 + 0.7^2) / 3) = sqrt(0.54)
    hand = math.sqrt((0.49 + 0.64 + 0.49) / 3)
    assert tfn_distance(TFN(0.0, 0.1, 0.3), TFN(0.7, 0.9, 1.0)) == pytest.approx(hand, abs=1e-12)
    assert hand == pytest.approx(0.7348469228, abs=1e-10)


@given(tfns(), tfns(), tfns())
def test_distance_metric_axioms(a, b, c):
    dab, dba = tfn_distance(a, b), tfn_distance(b, a)
    assert dab >= 0
    assert dab == pytest.approx(dba, abs=1e-12)
    assert tfn_distance(a, a) == 0
    if a.as_tuple() != b.as_tuple():
        assert dab > 0
    assert tfn_distance(a, c) <= dab + tfn_distance(b, c) + 1e-9


@given(finite, finite)
def test_distance_degenerate_is_abs(x, y):
    assert tfn_distance(TFN(x, x, x), TFN(y, y, y)) == abs(x - y)


def test_component_product():
    got = TFN(0.5, 0.8, 1.0) * TFN(0.45, 0.60, 0.75)
    assert got.as_tuple() == pytest.approx((0.225, 0.48, 0.75), abs=1e-15)
    assert (TFN(1, 2, 3) * 2).as_tuple() == (2, 4, 6)
