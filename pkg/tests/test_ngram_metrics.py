import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sacrebleu.metrics import BLEU, CHRF

from editlens.core import TokenSequence
from editlens.exceptions import EmptyCorpus, EmptyReferenceSet
from editlens.ngram_metrics import (
    BleuConfig,
    ChrfConfig,
    bleu_corpus,
    bleu_sentence,
    bleu_statistics,
    chrf,
    chrf_corpus,
    closest_ref_length,
)

from oracles import clipped_precision


def seq(text):
    return TokenSequence.from_words(text.split())


def test_bleu_brevity_example():
    hyp, ref = seq("a b c d"), seq("a b c d e")
    r = bleu_corpus([hyp], [[ref]])
    assert r.components["precisions"] == [1.0, 1.0, 1.0, 1.0]
    assert r.score == pytest.approx(math.exp(-0.25), abs=1e-12)
    assert r.score == pytest.approx(0.7788, abs=1e-4)


def test_bleu_identity_and_disjoint():
    s = seq("the cat sat on the mat")
    assert bleu_corpus([s], [[s]]).score == 1.0
    r = bleu_corpus([seq("x y z w")], [[s]])
    assert r.score == 0.0 and r.components["zero_precision"] is True


def test_bleu_zero_higher_order_without_smoothing():
    r = bleu_corpus([seq("a b x c d")], [[seq("a b y c d")]])
    assert r.score == 0.0 and r.components["zero_precision"]


@pytest.mark.parametrize("hyp_len, refs, expected", [(5, [4, 6], 4), (5, [7, 3], 3), (5, [5, 9], 5), (2, [9, 8], 8)])
def test_closest_ref_length_ties_to_shorter(hyp_len, refs, expected):
    assert closest_ref_length(hyp_len, refs) == expected


@settings(max_examples=100)
@given(
    st.lists(st.sampled_from("abcde"), max_size=10),
    st.lists(st.lists(st.sampled_from("abcde"), max_size=10), min_size=1, max_size=3),
)
def test_clipped_counts_against_oracle(hyp, refs):
    stats = bleu_statistics(hyp, refs, 4)
    for n in range(1, 5):
        m, t = clipped_precision(hyp, refs, n)
        assert stats[1 + n] == m and stats[5 + n] == t


@settings(max_examples=60)
@given(
    st.lists(st.sampled_from("abcde"), max_size=10),
    st.lists(st.sampled_from("abcde"), max_size=10),
    st.lists(st.sampled_from("abcde"), max_size=10),
)
def test_adding_reference_never_reduces_clipped_matches(hyp, r1, r2):
    one = bleu_statistics(hyp, [r1])
    two = bleu_statistics(hyp, [r1, r2])
    assert all(b >= a for a, b in zip(one[2:6], two[2:6]))
    assert chrf("".join(hyp), ["".join(r1), "".join(r2)]).score >= chrf("".join(hyp), ["".join(r1)]).score


def test_chrf_hand_example():
    cfg = ChrfConfig(char_order=2, beta=2)
    p, r = Fraction(1), (Fraction(1) * Fraction(2, 3) + Fraction(1, 2)) / 2
    assert r == Fraction(7, 12)
    expected = 5 * p * r / (4 * p + r)
    got = chrf("ab", ["abc"], cfg)
    assert got.score == pytest.approx(float(expected), abs=1e-12)
    assert got.score == pytest.approx(0.6364, abs=1e-4)


def test_chrf_identity_disjoint_and_whitespace():
    assert chrf("hello world", ["hello world"]).score == 1.0
    assert chrf("abc", ["xyz"]).score == 0.0
    assert chrf("hel lo", ["hello"]).score == 1.0


def test_chrf_empty_refs():
    with pytest.raises(EmptyReferenceSet):
        chrf("a", [])


def test_empty_corpora():
    with pytest.raises(EmptyCorpus):
        bleu_corpus([], [])
    with pytest.raises(EmptyCorpus):
        chrf_corpus([], [])


def test_config_validation():
    with pytest.raises(ValueError):
        BleuConfig(max_order=0)
    with pytest.raises(ValueError):
        ChrfConfig(beta=0)
    assert BleuConfig.parse_smoothing("floor:0.2") == ("floor", 0.2)
    with pytest.raises(ValueError):
        BleuConfig.parse_smoothing("exp")


words = st.lists(st.sampled_from(["the", "cat", "sat", "on", "a", "mat", "dog", "ran"]), min_size=1, max_size=12)


@settings(max_examples=100, deadline=None)
@given(words, st.lists(words, min_size=1, max_size=3))
def test_range(hyp, refs):
    b = bleu_sentence(TokenSequence.from_words(hyp), [TokenSequence.from_words(r) for r in refs]).score
    c = chrf(" ".join(hyp), [" ".join(r) for r in refs]).score
    assert 0 <= b <= 1 and 0 <= c <= 1


@settings(max_examples=50, deadline=None)
@given(words)
def test_identity(x):
    s = TokenSequence.from_words(x)
    assert bleu_sentence(s, [s]).score == pytest.approx(1.0)
    assert chrf(" ".join(x), [" ".join(x)]).score == pytest.approx(1.0)


@pytest.mark.parametrize("smoothing, sb_method", [("floor", "floor"), ("add-k", "add-k"), ("none", "none")])
def test_sentence_bleu_matches_reference_scorer(smoothing, sb_method):
    rng = random.Random(11)
    vocab = "the cat sat on a mat dog ran far away".split()
    cfg = BleuConfig(4, smoothing, effective_order=True)
    scorer = BLEU(tokenize="none", smooth_method=sb_method, smooth_value=cfg.smoothing_value, effective_order=True, force=True)
    for _ in range(200):
        hyp = [rng.choice(vocab) for _ in range(rng.randint(1, 12))]
        refs = [[rng.choice(vocab) for _ in range(rng.randint(1, 12))] for _ in range(rng.randint(1, 3))]
        ours = bleu_sentence(TokenSequence.from_words(hyp), [TokenSequence.from_words(r) for r in refs], cfg).score
        theirs = scorer.sentence_score(" ".join(hyp), [" ".join(r) for r in refs]).score / 100
        assert ours == pytest.approx(theirs, abs=1e-9)


def test_sentence_chrf_matches_reference_scorer():
    rng = random.Random(12)
    alphabet = "abcde "
    scorer = CHRF()
    for _ in range(200):
        hyp = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 20)))
        refs = ["".join(rng.choice(alphabet) for _ in range(rng.randint(1, 20))) for _ in range(rng.randint(1, 3))]
        ours = chrf(hyp, refs).score
        theirs = scorer.sentence_score(hyp, refs).score / 100
        assert ours == pytest.approx(theirs, abs=1e-9)
