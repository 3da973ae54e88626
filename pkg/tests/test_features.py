import math
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from junolog.errors import EmptyCorpus, InsufficientData
from junolog.features import (
    Dictionary,
    FeatureScaler,
    IdfTable,
    bow_count_row,
    build_dictionary,
    extract_features,
    fit_feature_scaler,
    fit_idf,
    oov_count,
    scale,
    tfidf_sum,
    token_length,
)

words = st.sampled_from(list("abcdefgh") + ["fail", "link", "up"])
messages = st.lists(words, max_size=12)


def test_dictionary_first_appearance_order():
    d = build_dictionary([["a", "b"], ["b", "c"]])
    assert d.words == ("a", "b", "c") and d.m == 3
    assert build_dictionary([["a", "b"], ["b", "c"]], min_df=2).words == ("b",)


def test_dictionary_counts_documents_not_occurrences():
    assert build_dictionary([["a", "a"], ["b"]], min_df=2).words == ()


def test_dictionary_empty():
    with pytest.raises(EmptyCorpus):
        build_dictionary([])


def test_dictionary_rejects_duplicates():
    with pytest.raises(ValueError):
        Dictionary(("a", "a"))


def test_bow_rows():
    d = Dictionary(("a", "b", "c"))
    assert bow_count_row(["a", "a", "c"], d).tolist() == [2, 0, 1]
    assert bow_count_row(["x", "y"], d).tolist() == [0, 0, 0]
    assert bow_count_row([], d).tolist() == [0, 0, 0]


def test_token_length_and_oov():
    assert token_length(["last", "message", "repeated", "times"]) == 4
    assert token_length([]) == 0 and token_length(["a"]) == 1
    d = Dictionary(("a", "b", "c"))
    assert oov_count(["a", "a", "x", "y"], d) == 2
    assert oov_count(["a", "b"], d) == 0
    assert oov_count([], d) == 0


def _four_logs():
    # "fail" in 2 of 4 logs, "link" in all 4
    return [["fail", "link"], ["fail", "link"], ["link"], ["link", "up"]]


def test_idf_values():
    t = fit_idf(_four_logs())
    assert t.N == 4 and t.df["fail"] == 2 and t.df_floor == 1
    assert t.idf("fail") == pytest.approx(0.693147, abs=1e-6)
    assert t.idf("link") == 0.0
    assert t.idf("never") == pytest.approx(1.386294, abs=1e-6)


def test_idf_empty():
    with pytest.raises(EmptyCorpus):
        fit_idf([])


def test_idf_log_base():
    t = fit_idf(_four_logs(), log_base=2)
    assert t.idf("fail") == pytest.approx(1.0)
    with pytest.raises(ValueError):
        IdfTable({}, 4, log_base=1)


def test_tfidf_sum_golden():
    t = fit_idf(_four_logs())
    assert abs(tfidf_sum(["fail", "fail", "link"], t) - 2 * math.log(2)) <= 1e-9
    assert tfidf_sum(["link", "link"], t) == 0.0
    assert tfidf_sum([], t) == 0.0


def test_extract_features_golden():
    t = fit_idf(_four_logs())
    d = Dictionary(("fail", "link", "up"))
    fv = extract_features(["fail", "fail", "link"], d, t)
    assert (fv.S, fv.L) == (3, 0)
    assert abs(fv.G - 1.3862943611198906) <= 1e-9
    assert tuple(extract_features([], d, t)) == (0, 0, 0.0)


def test_extract_features_single_log_clamp():
    fv = extract_features(["zzz"], Dictionary(("a",)), IdfTable({}, 1))
    assert tuple(fv) == (1, 1, 0.0)


def test_scaler_two_points():
    s = fit_feature_scaler([(0, 0, 0), (2, 2, 2)])
    assert s.mean == (1.0, 1.0, 1.0)
    assert np.allclose(s.std, math.sqrt(2), rtol=0, atol=1e-15)
    assert np.allclose(scale((2, 2, 2), s), 1 / math.sqrt(2), rtol=0, atol=1e-15)
    assert scale(s.mean, s).tolist() == [0.0, 0.0, 0.0]


def test_scaler_zero_variance_and_disabled():
    s = fit_feature_scaler([(3, 1, 2)] * 4)
    assert s.std == (1.0, 1.0, 1.0)
    off = fit_feature_scaler([(0, 0, 0), (2, 2, 2)], enabled=False)
    assert scale((5, 6, 7.5), off).tolist() == [5.0, 6.0, 7.5]


def test_scaler_needs_two():
    with pytest.raises(InsufficientData):
        fit_feature_scaler([(1, 2, 3)])


@given(messages, st.lists(words, max_size=8, unique=True))
def test_oov_matches_brute_force(msg, vocab):
    d = Dictionary(tuple(vocab))
    brute = sum(1 for w in msg if w not in vocab)
    assert oov_count(msg, d) == brute
    assert token_length(msg) - int(bow_count_row(msg, d).sum()) == brute
    assert 0 <= brute <= len(msg)


@given(st.lists(messages, min_size=1, max_size=10), messages)
def test_tfidf_equals_per_token_sum(training, msg):
    t = fit_idf(training)
    per_token = sum(t.idf(w) for w in msg)
    assert tfidf_sum(msg, t) == pytest.approx(per_token, rel=1e-12, abs=1e-12)
    assert tfidf_sum(msg, t) >= 0


@given(st.lists(messages, min_size=1, max_size=10))
def test_idf_zero_iff_everywhere(training):
    t = fit_idf(training)
    for w in t.df:
        assert (t.idf(w) == 0) == all(w in m for m in training)


@given(st.lists(messages, min_size=1, max_size=8), messages, words,
       st.lists(words, max_size=6, unique=True))
def test_monotone_in_added_token(training, msg, extra, vocab):
    t, d = fit_idf(training), Dictionary(tuple(vocab))
    before = extract_features(msg, d, t)
    after = extract_features(msg + [extra], d, t)
    assert after.S == before.S + 1
    assert after.G >= before.G
    assert after.L == before.L + (0 if extra in d else 1)


@settings(max_examples=50)
@given(st.lists(st.tuples(*[st.floats(-100, 100)] * 3), min_size=2, max_size=20),
       st.tuples(*[st.floats(-100, 100)] * 3))
def test_scale_inverse(rows, v):
    s = fit_feature_scaler(rows)
    back = s.inverse_transform(s.transform(np.array(v)))
    assert np.allclose(back, v, rtol=0, atol=1e-12)


def test_feature_invariants_on_synth(synth_corpus):
    msgs = [e.tokens for e in synth_corpus]
    d = build_dictionary([e.tokens for e in synth_corpus if e.label.value == "normal"])
    t = fit_idf(msgs)
    for m in msgs[:300]:
        fv = extract_features(m, d, t)
        assert 0 <= fv.L <= fv.S and fv.G >= 0
        assert fv.S == len(m)
        if fv.S == 0:
            assert fv.L == 0 and fv.G == 0
