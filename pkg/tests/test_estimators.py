import math
from decimal import Decimal

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.linear_model import LinearRegression
from sklearn.pipeline import make_pipeline

from editlens.estimators import PairMetricTransformer, RateBandEstimator, check_pairs
from editlens.exceptions import InputError

PAIRS = [
    ("the cat sat on the mat", "the cat sat on a mat"),
    ("a b x y", ["x y a b", "a b x y"]),
    ("kitten", "sitting"),
]


def test_get_params_and_clone():
    t = PairMetricTransformer(metrics=("ter", "lev"), level="char")
    params = t.get_params()
    assert params["metrics"] == ("ter", "lev") and params["level"] == "char"
    c = clone(t)
    assert c.get_params() == params and c is not t


def test_transform_shape_and_values():
    t = PairMetricTransformer(metrics=("ter", "chrf", "lev", "bleu")).fit(PAIRS)
    X = t.transform(PAIRS)
    assert X.shape == (3, 4)
    assert X[1, 0] == 0.0  # second reference matches exactly
    assert X[0, 0] == pytest.approx(1 / 6)
    assert list(t.get_feature_names_out()) == ["ter", "chrf", "lev", "bleu"]


def test_char_level_distance():
    X = PairMetricTransformer(metrics="lev", level="char").fit_transform([("kitten", "sitting")])
    assert X[0, 0] == pytest.approx(3 / 7)


def test_ter_nan_for_empty_reference():
    X = PairMetricTransformer(metrics=("ter",)).fit_transform([("a", "")])
    assert math.isnan(X[0, 0])


def test_array_input():
    arr = np.array([["a b", "a c"], ["x", "x"]], dtype=object)
    X = PairMetricTransformer(metrics=("lev",)).fit_transform(arr)
    assert X[:, 0].tolist() == [0.5, 0.0]


@pytest.mark.parametrize("bad", ["just a string", [], [("a",)], [(1, "b")], [("a", [])], np.zeros((2, 3))])
def test_input_validation(bad):
    with pytest.raises(InputError):
        check_pairs(bad)


def test_unknown_metric():
    with pytest.raises(InputError):
        PairMetricTransformer(metrics=("meteor",)).fit(PAIRS)


def test_unfitted_transform():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        PairMetricTransformer().transform(PAIRS)


def test_in_pipeline():
    pipe = make_pipeline(PairMetricTransformer(metrics=("ter", "chrf")), LinearRegression())
    pipe.fit(PAIRS, [0.1, 0.0, 0.5])
    assert pipe.predict(PAIRS).shape == (3,)


def test_rate_band_estimator():
    est = RateBandEstimator().fit(PAIRS)
    mults = est.predict([("a b c d e f g h i j", "a b c d e f g h i j"), ("x", "y")])
    assert list(mults) == [Decimal("0.1"), Decimal("1.0")]
    assert est.weighted_wordcount([("a b c d e f g h i j", "a b c d e f g h i j")]) == Decimal("1.0")
    assert clone(est).get_params()["similarity_from"] == "lev"


def test_rate_band_estimator_ter_source():
    est = RateBandEstimator(similarity_from="ter").fit(PAIRS)
    assert est.similarity([("a b x y", "x y a b")])[0] == pytest.approx(0.75)
    with pytest.raises(InputError):
        RateBandEstimator(similarity_from="bleu").fit(PAIRS)
