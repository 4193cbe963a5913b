"""Shared domain types: tokens, edit operations, edit scripts and metric results.

Index conventions used throughout the package:

* spans are half-open and zero-based;
* an ``Insert`` at ``[i, i)`` places its payload in the gap before token ``i``;
* a ``Shift`` of ``[i, j)`` with ``shift_dest = d`` lifts the span out and drops
  it immediately after the token that sat at index ``d`` before the move
  (``d = -1`` means the front of the sequence);
* the ops of an :class:`EditScript` are stored in application order, so each
  op's indexes refer to the working sequence left behind by the ops before it.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Iterable, Sequence

from .exceptions import InvalidOperation, ReplayMismatch, SpanOutOfBounds

if TYPE_CHECKING:
    from .tokenize import NormalizationConfig

Span = tuple[int, int]


@dataclass(frozen=True)
class Token:
    text: str
    index: int
    char_offset: int

    def __post_init__(self):
        if not self.text or any(ch.isspace() for ch in self.text):
            raise ValueError(f"token text must be non-empty without whitespace: {self.text!r}")


@dataclass(frozen=True)
class TokenSequence:
    tokens: tuple[Token, ...]
    raw: str
    normalization: "NormalizationConfig | None" = None

    def __post_init__(self):
        last = -1
        for pos, tok in enumerate(self.tokens):
            if tok.index != pos:
                raise ValueError(f"token {tok.text!r} has index {tok.index}, expected {pos}")
            if tok.char_offset <= last:
                raise ValueError("token char offsets must be strictly increasing")
            last = tok.char_offset

    @classmethod
    def from_words(cls, words: Iterable[str], normalization=None) -> "TokenSequence":
        """Build a sequence whose raw text is the single-space join of ``words``."""
        tokens = []
        offset = 0
        for pos, word in enumerate(words):
            tokens.append(Token(word, pos, offset))
            offset += len(word) + 1
        raw = " ".join(t.text for t in tokens)
        return cls(tuple(tokens), raw, normalization)

    @property
    def words(self) -> tuple[str, ...]:
        return tuple(t.text for t in self.tokens)

    def joined(self) -> str:
        return " ".join(self.words)

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def __getitem__(self, item):
        return self.tokens[item]


class OpKind(str, enum.Enum):
    INSERT = "INSERT"
    DELETE = "DELETE"
    SUBSTITUTE = "SUBSTITUTE"
    SHIFT = "SHIFT"
    MATCH = "MATCH"


@dataclass(frozen=True)
class EditOperation:
    """One typed edit action.

    ``expected`` optionally pins the tokens that must currently occupy
    ``hyp_span`` (Match, Substitute, Delete); replay checks them when present.
    """

    kind: OpKind
    hyp_span: Span
    ref_span: Span = (0, 0)
    shift_dest: int | None = None
    payload: tuple[str, ...] = ()
    expected: tuple[str, ...] = ()

    def __post_init__(self):
        i, j = self.hyp_span
        k, l = self.ref_span
        if i < 0 or j < i or k < 0 or l < k:
            raise InvalidOperation(f"malformed spans {self.hyp_span} {self.ref_span}")
        n = j - i
        kind = self.kind
        if kind is not OpKind.SHIFT and self.shift_dest is not None:
            raise InvalidOperation(f"{kind.value} cannot carry a shift destination")
        if self.expected and len(self.expected) != n:
            raise InvalidOperation("expected tokens must cover hyp_span exactly")
        if kind is OpKind.INSERT:
            if n != 0 or not self.payload:
                raise InvalidOperation("INSERT needs an empty hyp_span and a payload")
        elif kind is OpKind.DELETE:
            if n == 0 or self.payload:
                raise InvalidOperation("DELETE needs a non-empty hyp_span and no payload")
        elif kind is OpKind.SUBSTITUTE:
            if n == 0 or not self.payload:
                raise InvalidOperation("SUBSTITUTE needs a non-empty hyp_span and a payload")
            if self.expected and tuple(self.expected) == tuple(self.payload):
                raise InvalidOperation("SUBSTITUTE payload must differ from the replaced tokens")
        elif kind is OpKind.SHIFT:
            if n == 0 or self.payload:
                raise InvalidOperation("SHIFT needs a non-empty hyp_span and no payload")
            if self.shift_dest is None or self.shift_dest < -1:
                raise InvalidOperation("SHIFT needs a destination >= -1")
            if i - 1 <= self.shift_dest < j:
                raise InvalidOperation(
                    f"SHIFT destination {self.shift_dest} does not move span {self.hyp_span}"
                )
        elif kind is OpKind.MATCH:
            if n == 0 or self.payload:
                raise InvalidOperation("MATCH needs a non-empty hyp_span and no payload")
            if l - k != n:
                raise InvalidOperation("MATCH spans must have equal length")

    @property
    def cost(self) -> int:
        return 0 if self.kind is OpKind.MATCH else 1

    def apply(self, words: list[str]) -> list[str]:
        """Return a new working sequence with this op applied."""
        i, j = self.hyp_span
        if j > len(words):
            raise SpanOutOfBounds(
                f"{self.kind.value} span [{i},{j}) outside working sequence of length {len(words)}"
            )
        current = tuple(words[i:j])
        if self.expected and current != tuple(self.expected):
            raise ReplayMismatch(
                f"{self.kind.value} [{i},{j}) expected {list(self.expected)}, found {list(current)}"
            )
        kind = self.kind
        if kind is OpKind.MATCH:
            return list(words)
        if kind is OpKind.INSERT:
            return words[:i] + list(self.payload) + words[i:]
        if kind is OpKind.DELETE:
            return words[:i] + words[j:]
        if kind is OpKind.SUBSTITUTE:
            if current == tuple(self.payload):
                raise ReplayMismatch(f"SUBSTITUTE [{i},{j}) replaces {list(current)} with itself")
            return words[:i] + list(self.payload) + words[j:]
        # SHIFT
        if self.shift_dest >= len(words):
            raise SpanOutOfBounds(
                f"SHIFT destination {self.shift_dest} outside working sequence of length {len(words)}"
            )
        return shift_words(words, i, j, self.shift_dest + 1)

    def length_delta(self) -> int:
        i, j = self.hyp_span
        if self.kind in (OpKind.INSERT, OpKind.SUBSTITUTE):
            return len(self.payload) - (j - i)
        if self.kind is OpKind.DELETE:
            return -(j - i)
        return 0


def shift_words(words: Sequence[str], start: int, end: int, gap: int) -> list[str]:
    """Move ``words[start:end]`` into the gap before ``words[gap]`` (original indexing)."""
    words = list(words)
    span = words[start:end]
    if gap < start:
        return words[:gap] + span + words[gap:start] + words[end:]
    if gap > end:
        return words[:start] + words[end:gap] + span + words[gap:]
    raise InvalidOperation(f"gap {gap} lies inside or on the edge of [{start},{end})")


@dataclass(frozen=True)
class EditScript:
    ops: tuple[EditOperation, ...]
    source_len: int
    target_len: int

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        delta = sum(op.length_delta() for op in self.ops)
        if self.source_len + delta != self.target_len:
            raise InvalidOperation(
                f"ops change length by {delta}, cannot map {self.source_len} -> {self.target_len}"
            )

    @property
    def cost(self) -> int:
        return script_cost(self)

    def counts(self) -> dict[str, int]:
        out = {kind.value.lower(): 0 for kind in OpKind}
        for op in self.ops:
            out[op.kind.value.lower()] += 1
        return out

    def to_text(self) -> str:
        return format_ops(self.ops)


def replay_words(ops: Iterable[EditOperation], words: Sequence[str]) -> list[str]:
    work = list(words)
    for op in ops:
        work = op.apply(work)
    return work


def replay(script: EditScript, source: TokenSequence) -> TokenSequence:
    """Apply ``script`` to ``source`` and return the resulting sequence."""
    if script.source_len != len(source):
        raise SpanOutOfBounds(
            f"script expects a source of {script.source_len} tokens, got {len(source)}"
        )
    words = replay_words(script.ops, source.words)
    if len(words) != script.target_len:
        raise ReplayMismatch(f"replay produced {len(words)} tokens, expected {script.target_len}")
    return TokenSequence.from_words(words, source.normalization)


def script_cost(script: EditScript) -> int:
    return sum(op.cost for op in script.ops)


# -- line-oriented serialization ------------------------------------------------

_SPAN_RE = re.compile(r"^\[(\d+),(\d+)\)$")

_KIND_ALIASES = {
    "INSERT": OpKind.INSERT,
    "DELETE": OpKind.DELETE,
    "SUBSTITUTE": OpKind.SUBSTITUTE,
    "REPLACE": OpKind.SUBSTITUTE,
    "SHIFT": OpKind.SHIFT,
    "MOVE": OpKind.SHIFT,
    "MATCH": OpKind.MATCH,
}


def _fmt_span(span: Span) -> str:
    return f"[{span[0]},{span[1]})"


def format_op(op: EditOperation, kind_name: str | None = None) -> str:
    name = kind_name or op.kind.value
    if op.kind is OpKind.SHIFT:
        return f"{name} {_fmt_span(op.hyp_span)} -> {op.shift_dest}"
    parts = [name, _fmt_span(op.hyp_span), _fmt_span(op.ref_span)]
    parts.extend(op.payload)
    return " ".join(parts)


def format_ops(ops: Iterable[EditOperation]) -> str:
    return "".join(format_op(op) + "\n" for op in ops)


def parse_op(line: str) -> tuple[str, EditOperation]:
    """Parse one serialized op; returns the kind keyword as written and the op.

    Grammar: ``KIND [i,j) [[k,l)] [-> d] [payload ...]``. The reference span is
    optional so hand-written edit logs can leave it out.
    """
    fields = line.split()
    if not fields:
        raise InvalidOperation("empty op line")
    name = fields[0].upper()
    if name not in _KIND_ALIASES:
        raise InvalidOperation(f"unknown op kind {fields[0]!r}")
    kind = _KIND_ALIASES[name]
    rest = fields[1:]
    spans = []
    while rest and len(spans) < 2 and _SPAN_RE.match(rest[0]):
        m = _SPAN_RE.match(rest[0])
        spans.append((int(m.group(1)), int(m.group(2))))
        rest = rest[1:]
    if not spans:
        raise InvalidOperation(f"missing span in {line!r}")
    hyp_span = spans[0]
    ref_span = spans[1] if len(spans) > 1 else None
    dest = None
    if kind is OpKind.SHIFT:
        if len(rest) != 2 or rest[0] != "->":
            raise InvalidOperation(f"{name} needs '-> dest': {line!r}")
        try:
            dest = int(rest[1])
        except ValueError:
            raise InvalidOperation(f"bad shift destination in {line!r}") from None
        rest = []
    if ref_span is None:
        if kind is OpKind.MATCH:
            ref_span = hyp_span
        elif kind is OpKind.INSERT:
            ref_span = (hyp_span[0], hyp_span[0] + len(rest))
        elif kind is OpKind.SUBSTITUTE:
            ref_span = (hyp_span[0], hyp_span[0] + len(rest))
        elif kind is OpKind.SHIFT:
            ref_span = (0, 0)
        else:
            ref_span = (hyp_span[0], hyp_span[0])
    op = EditOperation(kind, hyp_span, ref_span, dest, tuple(rest))
    return name, op


def parse_ops(text: str) -> list[EditOperation]:
    """Parse serialized ops, skipping blank lines and ``#`` comments."""
    ops = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            ops.append(parse_op(stripped)[1])
        except InvalidOperation as exc:
            raise InvalidOperation(f"line {lineno}: {exc}") from None
    return ops


# -- results ----------------------------------------------------------------------


def _jsonable(value: Any) -> Any:
    if isinstance(value, Fraction):
        return float(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


@dataclass(frozen=True)
class MetricResult:
    metric_name: str
    score: float | Fraction
    components: dict[str, Any] = field(default_factory=dict)
    segment_id: str | None = None

    def to_dict(self) -> dict[str, Any]:
        out = {
            "metric": self.metric_name,
            "score": _jsonable(self.score),
            "components": _jsonable(self.components),
        }
        if self.segment_id is not None:
            out["segment_id"] = self.segment_id
        return out


def edit_rate(components: dict[str, Any], edit_keys: Sequence[str], denominator_key: str) -> Fraction:
    """Exact edit-rate score from result components."""
    num = sum(Fraction(components[k]) for k in edit_keys)
    den = Fraction(components[denominator_key])
    if den == 0:
        return Fraction(0)
    return num / den
