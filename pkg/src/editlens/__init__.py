"""Edit distances, TER with shift traces, BLEU/chrF, edit-log (HER) analysis,
perturbation staircases and rate-band word counts."""

__version__ = "0.1.0"

from .core import (
    EditOperation,
    EditScript,
    MetricResult,
    OpKind,
    Token,
    TokenSequence,
    replay,
    script_cost,
)
from .distances import damerau, lcs_distance, levenshtein, ngram_distance, normalized
from .her import EditLog, LoggedAction, contrast_with_ter, validate_log
from .ngram_metrics import BleuConfig, ChrfConfig, bleu_corpus, bleu_sentence, chrf
from .rates import RateBandTable, band_for, weighted_wordcount
from .staircase import PerturbationSpec, apply_staircase, run_staircase
from .ter import TerConfig, TerResult, ter
from .tokenize import NormalizationConfig, char_units, tokenize
