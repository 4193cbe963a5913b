"""Normalization and tokenization shared by every metric."""

from __future__ import annotations

import re
import unicodedata
from dataclasses import asdict, dataclass

import regex

from .core import Token, TokenSequence

_HYPHENS = frozenset("-‐‑")
_CHUNK_RE = re.compile(r"\S+")
_GRAPHEME_RE = regex.compile(r"\X")


@dataclass(frozen=True)
class NormalizationConfig:
    lowercase: bool = True
    split_punctuation: bool = True
    collapse_whitespace: bool = True
    unicode_nfc: bool = True

    def __post_init__(self):
        if not self.collapse_whitespace:
            raise ValueError("collapse_whitespace cannot be disabled")

    def to_dict(self) -> dict:
        return asdict(self)


DEFAULT_CONFIG = NormalizationConfig()


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _split_chunk(chunk: str) -> list[tuple[int, str]]:
    """Split a whitespace-free chunk into (offset, piece) around punctuation.

    A hyphen with a non-punctuation character on both sides stays inside its word.
    """
    pieces = []
    start = None
    for pos, ch in enumerate(chunk):
        standalone = _is_punct(ch)
        if standalone and ch in _HYPHENS and 0 < pos < len(chunk) - 1:
            standalone = _is_punct(chunk[pos - 1]) or _is_punct(chunk[pos + 1])
        if standalone:
            if start is not None:
                pieces.append((start, chunk[start:pos]))
                start = None
            pieces.append((pos, ch))
        elif start is None:
            start = pos
    if start is not None:
        pieces.append((start, chunk[start:]))
    return pieces


def _normalize_piece(piece: str, config: NormalizationConfig) -> str:
    if config.unicode_nfc:
        piece = unicodedata.normalize("NFC", piece)
    if config.lowercase:
        piece = piece.lower()
    return piece


def tokenize(raw: str, config: NormalizationConfig = DEFAULT_CONFIG) -> TokenSequence:
    """Tokenize ``raw`` into a :class:`TokenSequence`.

    Offsets point into ``raw``; case folding and NFC are applied per token so
    the offsets stay exact.
    """
    tokens: list[Token] = []
    for m in _CHUNK_RE.finditer(raw):
        chunk = m.group()
        pieces = _split_chunk(chunk) if config.split_punctuation else [(0, chunk)]
        for offset, piece in pieces:
            text = _normalize_piece(piece, config)
            tokens.append(Token(text, len(tokens), m.start() + offset))
    return TokenSequence(tuple(tokens), raw, config)


def join(seq: TokenSequence) -> str:
    return " ".join(t.text for t in seq.tokens)


def normalize_text(raw: str, config: NormalizationConfig = DEFAULT_CONFIG) -> str:
    """Apply case folding, NFC and whitespace collapsing without splitting punctuation.

    This is the text that character-level metrics see.
    """
    return " ".join(_normalize_piece(chunk, config) for chunk in raw.split())


def char_units(raw: str) -> list[str]:
    """Split ``raw`` into extended grapheme clusters."""
    return _GRAPHEME_RE.findall(raw)
