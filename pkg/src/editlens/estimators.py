"""scikit-learn compatible wrappers.

:class:`PairMetricTransformer` turns (hypothesis, references) pairs into a
feature matrix with one column per metric, so the metrics can sit inside a
``Pipeline`` (e.g. as quality-estimation features). :class:`RateBandEstimator`
predicts the rate multiplier of each pair from a similarity source.
"""

from __future__ import annotations

from decimal import Decimal
from fractions import Fraction
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .distances import Algorithm, DistanceVariant, Level
from .distances import compute as compute_distance
from .exceptions import InputError, ZeroDenominator
from .ngram_metrics import BleuConfig, ChrfConfig, bleu_sentence, chrf
from .rates import RateBandTable, band_for, default_table
from .ter import TerConfig, ter
from .tokenize import NormalizationConfig, char_units, normalize_text, tokenize

_METRICS = ("ter", "bleu", "chrf", "lev", "dl-osa", "dl", "lcs")


def check_pairs(X) -> list[tuple[str, tuple[str, ...]]]:
    """Validate and canonicalize input pairs.

    Accepts a sequence of ``(hyp, ref)`` or ``(hyp, [ref, ...])`` items, or a
    2-column array of strings. Returns ``[(hyp, (ref, ...)), ...]``.
    """
    if isinstance(X, np.ndarray):
        if X.ndim != 2 or X.shape[1] != 2:
            raise InputError(f"expected an (n, 2) array of strings, got shape {X.shape}")
        X = X.tolist()
    if isinstance(X, (str, bytes)):
        raise InputError("expected a sequence of (hypothesis, references) pairs, got a string")
    out = []
    for row, item in enumerate(X):
        try:
            hyp, refs = item
        except (TypeError, ValueError):
            raise InputError(f"row {row}: expected a (hypothesis, references) pair") from None
        if isinstance(refs, str):
            refs = (refs,)
        refs = tuple(refs)
        if not isinstance(hyp, str) or not refs or not all(isinstance(r, str) for r in refs):
            raise InputError(f"row {row}: hypothesis and references must be strings (at least one reference)")
        out.append((hyp, refs))
    if not out:
        raise InputError("no input pairs")
    return out


def check_metric_names(metrics) -> tuple[str, ...]:
    if isinstance(metrics, str):
        metrics = (metrics,)
    metrics = tuple(metrics)
    if not metrics:
        raise InputError("at least one metric is required")
    for name in metrics:
        if name not in _METRICS and not name.startswith("ngram:"):
            raise InputError(f"unknown metric {name!r}")
    return metrics


class PairMetricTransformer(TransformerMixin, BaseEstimator):
    """One feature column per metric for each (hypothesis, references) pair.

    Distance columns are normalized distances at ``level``; ``ter`` is the raw
    (unclamped) edit rate; ``bleu`` is smoothed sentence BLEU.
    """

    def __init__(
        self,
        metrics=("ter", "chrf"),
        level="token",
        lowercase=True,
        split_punctuation=True,
        max_shift_span=10,
        max_shift_distance=50,
        chrf_order=6,
        chrf_beta=2.0,
        bleu_order=4,
    ):
        self.metrics = metrics
        self.level = level
        self.lowercase = lowercase
        self.split_punctuation = split_punctuation
        self.max_shift_span = max_shift_span
        self.max_shift_distance = max_shift_distance
        self.chrf_order = chrf_order
        self.chrf_beta = chrf_beta
        self.bleu_order = bleu_order

    def fit(self, X, y=None):
        check_pairs(X)
        self.metrics_ = check_metric_names(self.metrics)
        self.level_ = Level(self.level)
        self.normalization_ = NormalizationConfig(self.lowercase, self.split_punctuation)
        self.ter_config_ = TerConfig(self.max_shift_span, self.max_shift_distance, not self.lowercase)
        self.chrf_config_ = ChrfConfig(self.chrf_order, self.chrf_beta)
        self.bleu_config_ = BleuConfig.sentence_default(self.bleu_order)
        self.n_features_out_ = len(self.metrics_)
        return self

    def _units(self, text):
        if self.level_ is Level.TOKEN:
            return tokenize(text, self.normalization_).words
        return char_units(normalize_text(text, self.normalization_))

    def _score(self, name, hyp, refs) -> float:
        norm = self.normalization_
        if name == "ter":
            try:
                return float(ter(tokenize(hyp, norm), [tokenize(r, norm) for r in refs], self.ter_config_).score)
            except ZeroDenominator:
                return float("nan")
        if name == "bleu":
            return bleu_sentence(tokenize(hyp, norm), [tokenize(r, norm) for r in refs], self.bleu_config_).score
        if name == "chrf":
            return chrf(normalize_text(hyp, norm), [normalize_text(r, norm) for r in refs], self.chrf_config_).score
        variant = DistanceVariant.parse(name, self.level_)
        a = self._units(hyp)
        return float(min(compute_distance(variant, a, self._units(r)).score for r in refs))

    def transform(self, X):
        check_is_fitted(self, "metrics_")
        pairs = check_pairs(X)
        out = np.empty((len(pairs), self.n_features_out_), dtype=float)
        for i, (hyp, refs) in enumerate(pairs):
            for j, name in enumerate(self.metrics_):
                out[i, j] = self._score(name, hyp, refs)
        return out

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "metrics_")
        return np.asarray(self.metrics_, dtype=object)


class RateBandEstimator(BaseEstimator):
    """Predict the rate multiplier for each pair from a similarity source.

    ``similarity_from`` is ``"lev"`` (1 - normalized Levenshtein at ``level``)
    or ``"ter"`` (1 - min(TER, 1)).
    """

    def __init__(self, table: RateBandTable | None = None, similarity_from="lev", level="token", lowercase=True):
        self.table = table
        self.similarity_from = similarity_from
        self.level = level
        self.lowercase = lowercase

    def fit(self, X, y=None):
        check_pairs(X)
        if self.similarity_from not in ("lev", "ter"):
            raise InputError("similarity_from must be 'lev' or 'ter'")
        self.table_ = self.table if self.table is not None else default_table()
        self.level_ = Level(self.level)
        self.normalization_ = NormalizationConfig(lowercase=self.lowercase)
        return self

    def similarity(self, X) -> list[Fraction]:
        check_is_fitted(self, "table_")
        norm = self.normalization_
        out = []
        for hyp, refs in check_pairs(X):
            if self.similarity_from == "ter":
                try:
                    score = ter(tokenize(hyp, norm), [tokenize(r, norm) for r in refs]).score
                except ZeroDenominator:
                    out.append(Fraction(0))
                    continue
                out.append(1 - min(score, Fraction(1)))
            else:
                variant = DistanceVariant(Algorithm.LEVENSHTEIN, self.level_)
                if self.level_ is Level.TOKEN:
                    units = lambda t: tokenize(t, norm).words  # noqa: E731
                else:
                    units = lambda t: char_units(normalize_text(t, norm))  # noqa: E731
                a = units(hyp)
                out.append(1 - min(compute_distance(variant, a, units(r)).score for r in refs))
        return out

    def predict(self, X) -> np.ndarray:
        return np.asarray([band_for(s, self.table_)[1] for s in self.similarity(X)], dtype=object)

    def weighted_wordcount(self, X, token_counts: Sequence[int] | None = None) -> Decimal:
        """Weighted word count; token counts default to hypothesis token counts."""
        pairs = check_pairs(X)
        if token_counts is None:
            token_counts = [len(tokenize(h, self.normalization_)) for h, _ in pairs]
        return sum((Decimal(c) * m for c, m in zip(token_counts, self.predict(X))), Decimal(0))
