"""BLEU and chrF, both computed from additive per-segment statistics."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .core import MetricResult, TokenSequence
from .exceptions import EmptyCorpus, EmptyReferenceSet, InputError
from .tokenize import char_units

SMOOTHING_METHODS = ("none", "floor", "add-k")
_SMOOTHING_DEFAULTS = {"none": None, "floor": 0.1, "add-k": 1}


@dataclass(frozen=True)
class BleuConfig:
    max_order: int = 4
    smoothing: str = "none"
    smoothing_value: float | None = None
    effective_order: bool = False

    def __post_init__(self):
        if self.max_order < 1:
            raise ValueError("max_order must be >= 1")
        if self.smoothing not in SMOOTHING_METHODS:
            raise ValueError(f"smoothing must be one of {SMOOTHING_METHODS}")
        if self.smoothing_value is None:
            object.__setattr__(self, "smoothing_value", _SMOOTHING_DEFAULTS[self.smoothing])

    @classmethod
    def sentence_default(cls, max_order: int = 4) -> "BleuConfig":
        return cls(max_order, "floor", 0.1, effective_order=True)

    @classmethod
    def parse_smoothing(cls, text: str) -> tuple[str, float | None]:
        """Parse ``none``, ``floor[:eps]`` or ``add-k[:k]``."""
        method, _, value = text.partition(":")
        if method not in SMOOTHING_METHODS:
            raise ValueError(f"unknown smoothing {text!r}")
        if method == "none" and value:
            raise ValueError("smoothing 'none' takes no value")
        return method, float(value) if value else None

    def to_dict(self) -> dict:
        return {
            "max_order": self.max_order,
            "smoothing": self.smoothing,
            "smoothing_value": self.smoothing_value,
            "effective_order": self.effective_order,
        }


@dataclass(frozen=True)
class ChrfConfig:
    char_order: int = 6
    beta: float = 2.0
    remove_whitespace: bool = True

    def __post_init__(self):
        if self.char_order < 1:
            raise ValueError("char_order must be >= 1")
        if not self.beta > 0:
            raise ValueError("beta must be positive")

    def to_dict(self) -> dict:
        return {"char_order": self.char_order, "beta": self.beta, "remove_whitespace": self.remove_whitespace}


# -- BLEU -------------------------------------------------------------------------


def _ngrams(words: Sequence[str], max_order: int) -> Counter:
    counts: Counter = Counter()
    for n in range(1, max_order + 1):
        for i in range(len(words) - n + 1):
            counts[tuple(words[i : i + n])] += 1
    return counts


def closest_ref_length(hyp_len: int, ref_lens: Sequence[int]) -> int:
    """Reference length closest to ``hyp_len``; ties go to the shorter one."""
    return min(ref_lens, key=lambda l: (abs(hyp_len - l), l))


def bleu_statistics(hyp: Sequence[str], refs: Sequence[Sequence[str]], max_order: int = 4) -> list[int]:
    """``[hyp_len, ref_len, matches_1..N, totals_1..N]`` for one segment."""
    if not refs:
        raise EmptyReferenceSet("BLEU needs at least one reference")
    hyp_counts = _ngrams(hyp, max_order)
    max_ref: Counter = Counter()
    for ref in refs:
        max_ref |= _ngrams(ref, max_order)
    matches = [0] * max_order
    totals = [0] * max_order
    for gram, count in hyp_counts.items():
        n = len(gram) - 1
        totals[n] += count
        matches[n] += min(count, max_ref.get(gram, 0))
    ref_len = closest_ref_length(len(hyp), [len(r) for r in refs])
    return [len(hyp), ref_len, *matches, *totals]


def bleu_from_statistics(stats: Sequence[int], config: BleuConfig) -> MetricResult:
    order = config.max_order
    hyp_len, ref_len = stats[0], stats[1]
    matches = [float(m) for m in stats[2 : 2 + order]]
    totals = [float(t) for t in stats[2 + order : 2 + 2 * order]]
    if hyp_len < ref_len:
        bp = math.exp(1 - ref_len / hyp_len) if hyp_len > 0 else 0.0
    else:
        bp = 1.0
    precisions = [0.0] * order
    used = order
    zero = False
    if any(matches):
        for n in range(order):
            if config.smoothing == "add-k" and n > 0:
                matches[n] += config.smoothing_value
                totals[n] += config.smoothing_value
            if totals[n] == 0:
                if config.effective_order:
                    used = n
                break
            if matches[n] == 0:
                if config.smoothing == "floor":
                    precisions[n] = config.smoothing_value / totals[n]
            else:
                precisions[n] = matches[n] / totals[n]
        used = max(used, 1)
        if any(p == 0 for p in precisions[:used]):
            zero = True
            score = 0.0
        else:
            score = bp * math.exp(sum(math.log(p) for p in precisions[:used]) / used)
    else:
        zero = True
        score = 0.0
    comps = {
        "precisions": precisions,
        "matches": list(stats[2 : 2 + order]),
        "totals": list(stats[2 + order : 2 + 2 * order]),
        "brevity_penalty": bp,
        "hyp_length": hyp_len,
        "ref_length": ref_len,
        "zero_precision": zero,
    }
    return MetricResult("bleu", score, comps)


def bleu_sentence(hyp: TokenSequence, refs: Sequence[TokenSequence], config: BleuConfig | None = None) -> MetricResult:
    config = config or BleuConfig.sentence_default()
    stats = bleu_statistics(hyp.words, [r.words for r in refs], config.max_order)
    return bleu_from_statistics(stats, config)


def bleu_corpus(
    hyps: Sequence[TokenSequence],
    refs: Sequence[Sequence[TokenSequence]],
    config: BleuConfig = BleuConfig(),
) -> MetricResult:
    """Corpus BLEU from pooled n-gram statistics.

    ``refs[i]`` is the reference set for ``hyps[i]``.
    """
    if not hyps:
        raise EmptyCorpus("BLEU needs at least one segment")
    if len(hyps) != len(refs):
        raise InputError(f"{len(hyps)} hypotheses but {len(refs)} reference sets")
    pooled = None
    for hyp, ref_set in zip(hyps, refs):
        stats = bleu_statistics(hyp.words, [r.words for r in ref_set], config.max_order)
        pooled = stats if pooled is None else [a + b for a, b in zip(pooled, stats)]
    return bleu_from_statistics(pooled, config)


# -- chrF -------------------------------------------------------------------------


def _char_ngrams(text: str, order: int, remove_whitespace: bool) -> list[Counter]:
    if remove_whitespace:
        text = "".join(text.split())
    units = char_units(text)
    out = []
    for n in range(1, order + 1):
        out.append(Counter(tuple(units[i : i + n]) for i in range(len(units) - n + 1)))
    return out


def _match_stats(hyp_ngrams: list[Counter], ref_ngrams: list[Counter]) -> list[int]:
    stats = []
    for h, r in zip(hyp_ngrams, ref_ngrams):
        stats.extend([sum(h.values()), sum(r.values()), sum((h & r).values())])
    return stats


def chrf_from_statistics(stats: Sequence[int], config: ChrfConfig) -> MetricResult:
    """F-beta of the precision and recall averaged over orders present on both sides."""
    factor = config.beta**2
    sum_p = sum_r = 0.0
    effective = 0
    for n in range(config.char_order):
        n_hyp, n_ref, n_match = stats[3 * n : 3 * n + 3]
        if n_hyp > 0 and n_ref > 0:
            sum_p += n_match / n_hyp
            sum_r += n_match / n_ref
            effective += 1
    if effective:
        avg_p, avg_r = sum_p / effective, sum_r / effective
    else:
        avg_p = avg_r = 0.0
    if avg_p + avg_r > 0:
        score = (1 + factor) * avg_p * avg_r / (factor * avg_p + avg_r)
    else:
        score = 0.0
    comps = {
        "avg_precision": avg_p,
        "avg_recall": avg_r,
        "effective_order": effective,
        "statistics": list(stats),
    }
    return MetricResult("chrf", score, comps)


def chrf_statistics(hyp: str, refs: Sequence[str], config: ChrfConfig = ChrfConfig()) -> tuple[list[int], int]:
    """Statistics against the best-scoring reference and that reference's index."""
    if not refs:
        raise EmptyReferenceSet("chrF needs at least one reference")
    hyp_ngrams = _char_ngrams(hyp, config.char_order, config.remove_whitespace)
    best = None
    for idx, ref in enumerate(refs):
        stats = _match_stats(hyp_ngrams, _char_ngrams(ref, config.char_order, config.remove_whitespace))
        score = chrf_from_statistics(stats, config).score
        if best is None or score > best[0]:
            best = (score, stats, idx)
    return best[1], best[2]


def chrf(hyp: str, refs: Sequence[str], config: ChrfConfig = ChrfConfig()) -> MetricResult:
    stats, idx = chrf_statistics(hyp, refs, config)
    result = chrf_from_statistics(stats, config)
    result.components["best_ref_index"] = idx
    return result


def chrf_corpus(hyps: Sequence[str], refs: Sequence[Sequence[str]], config: ChrfConfig = ChrfConfig()) -> MetricResult:
    if not hyps:
        raise EmptyCorpus("chrF needs at least one segment")
    if len(hyps) != len(refs):
        raise InputError(f"{len(hyps)} hypotheses but {len(refs)} reference sets")
    pooled = [0] * (3 * config.char_order)
    for hyp, ref_set in zip(hyps, refs):
        stats, _ = chrf_statistics(hyp, ref_set, config)
        pooled = [a + b for a, b in zip(pooled, stats)]
    return chrf_from_statistics(pooled, config)
