"""Edit-log analysis: score recorded editing actions and contrast them with TER.

A log records what an editor actually did, one action per line, in the same
grammar as serialized edit scripts (``INSERT``/``DELETE``/``REPLACE``/``MOVE``;
``SUBSTITUTE`` and ``SHIFT`` are accepted as synonyms, ``MATCH`` lines are
ignored). Each action is weighted by the number of words it touches, so a
moved phrase of n words costs n, where TER charges a single shift.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .core import EditOperation, OpKind, TokenSequence, parse_op
from .exceptions import (
    EditLensError,
    InputError,
    InputMismatch,
    InvalidOperation,
    LogReplayMismatch,
    ZeroDenominator,
)
from .ter import TerResult

CATEGORIES = ("insert", "delete", "replace", "move")


class ActionKind(str, enum.Enum):
    INSERT = "INSERT"
    DELETE = "DELETE"
    REPLACE = "REPLACE"
    MOVE = "MOVE"


_TO_OP = {
    ActionKind.INSERT: OpKind.INSERT,
    ActionKind.DELETE: OpKind.DELETE,
    ActionKind.REPLACE: OpKind.SUBSTITUTE,
    ActionKind.MOVE: OpKind.SHIFT,
}
_FROM_OP = {v: k for k, v in _TO_OP.items()}


@dataclass(frozen=True)
class LoggedAction:
    kind: ActionKind
    span: tuple[int, int]
    dest: int | None = None
    payload: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "kind", ActionKind(self.kind))
        object.__setattr__(self, "payload", tuple(self.payload))
        self.to_operation()  # validates shape

    @property
    def affected_words(self) -> int:
        i, j = self.span
        if self.kind is ActionKind.INSERT:
            return len(self.payload)
        if self.kind is ActionKind.REPLACE:
            return max(j - i, len(self.payload))
        return j - i

    def to_operation(self) -> EditOperation:
        i, j = self.span
        op_kind = _TO_OP[self.kind]
        if op_kind is OpKind.SHIFT:
            return EditOperation(op_kind, (i, j), (0, 0), self.dest)
        if op_kind is OpKind.DELETE:
            return EditOperation(op_kind, (i, j), (i, i))
        return EditOperation(op_kind, (i, j), (i, i + len(self.payload)), payload=self.payload)

    @classmethod
    def from_operation(cls, op: EditOperation) -> "LoggedAction":
        if op.kind is OpKind.MATCH:
            raise InvalidOperation("MATCH is not an editing action")
        return cls(_FROM_OP[op.kind], op.hyp_span, op.shift_dest, op.payload)

    def to_line(self) -> str:
        i, j = self.span
        if self.kind is ActionKind.MOVE:
            return f"MOVE [{i},{j}) -> {self.dest}"
        return " ".join([self.kind.value, f"[{i},{j})", *self.payload])

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind.value.lower(), "span": list(self.span)}
        if self.dest is not None:
            out["dest"] = self.dest
        if self.payload:
            out["payload"] = list(self.payload)
        out["affected_words"] = self.affected_words
        return out


@dataclass(frozen=True)
class EditLog:
    entries: tuple[LoggedAction, ...]
    source: TokenSequence
    final: TokenSequence

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    def to_text(self) -> str:
        return "".join(a.to_line() + "\n" for a in self.entries)


@dataclass(frozen=True)
class HerResult:
    action_counts: dict[str, int]
    affected_word_total: int
    her_score: Fraction
    denominator: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "action_counts": dict(self.action_counts),
            "affected_word_total": self.affected_word_total,
            "her_score": float(self.her_score),
            "denominator": self.denominator,
        }


def parse_log(text: str, source: TokenSequence, final: TokenSequence) -> EditLog:
    """Parse a line-oriented log; blank lines, ``#`` comments and ``MATCH`` lines are skipped."""
    entries = []
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            _, op = parse_op(stripped)
        except InvalidOperation as exc:
            raise InputError(f"log line {lineno}: {exc}") from None
        if op.kind is OpKind.MATCH:
            continue
        entries.append(LoggedAction.from_operation(op))
    return EditLog(tuple(entries), source, final)


def replay_actions(actions: Iterable[LoggedAction], words: Sequence[str]) -> list[str]:
    work = list(words)
    for action in actions:
        work = action.to_operation().apply(work)
    return work


def validate_log(log: EditLog, denominator: str = "target") -> HerResult:
    """Check that the log replays ``source`` into ``final`` and score it.

    ``denominator`` selects the normalizing length: ``"target"`` (final text,
    the default) or ``"source"``.
    """
    if denominator not in ("target", "source"):
        raise ValueError("denominator must be 'target' or 'source'")
    try:
        produced = replay_actions(log.entries, log.source.words)
    except EditLensError as exc:
        raise LogReplayMismatch(f"log does not replay: {exc}") from None
    if tuple(produced) != log.final.words:
        raise LogReplayMismatch(
            f"log replays to {' '.join(produced)!r}, expected {log.final.joined()!r}"
        )
    counts = {c: 0 for c in CATEGORIES}
    for action in log.entries:
        counts[action.kind.value.lower()] += 1
    total = sum(a.affected_words for a in log.entries)
    den = len(log.final) if denominator == "target" else len(log.source)
    if den == 0:
        if total:
            raise ZeroDenominator(f"{denominator} text is empty but the log edits {total} words")
        score = Fraction(0)
    else:
        score = Fraction(total, den)
    return HerResult(counts, total, score, den)


# -- contrast with TER ------------------------------------------------------------


def _category(kind: OpKind) -> str | None:
    return {
        OpKind.INSERT: "insert",
        OpKind.DELETE: "delete",
        OpKind.SUBSTITUTE: "replace",
        OpKind.SHIFT: "move",
    }.get(kind)


def edit_items(ops: Iterable[EditOperation], words: Sequence[str]) -> dict[str, Counter]:
    """Token-identity items touched by each category of op, found by replaying ``ops``.

    Insert/delete contribute one item per token; a replace contributes
    ``(old, new)`` pairs per token (or one whole-span pair when lengths differ);
    a move contributes the moved phrase as one item.
    """
    items = {c: Counter() for c in CATEGORIES}
    work = list(words)
    for op in ops:
        cat = _category(op.kind)
        i, j = op.hyp_span
        current = tuple(work[i:j])
        if cat == "insert":
            items[cat].update(op.payload)
        elif cat == "delete":
            items[cat].update(current)
        elif cat == "replace":
            if len(current) == len(op.payload):
                items[cat].update(zip(current, op.payload))
            else:
                items[cat][(current, op.payload)] += 1
        elif cat == "move":
            items[cat][current] += 1
        work = op.apply(work)
    return items


def invert_items(items: dict[str, Counter]) -> dict[str, Counter]:
    """Items as seen from the opposite direction (target back to source)."""
    replaced = Counter()
    for (old, new), count in items["replace"].items():
        replaced[(new, old)] += count
    return {
        "insert": Counter(items["delete"]),
        "delete": Counter(items["insert"]),
        "replace": replaced,
        "move": Counter(items["move"]),
    }


def agreement(expected: dict[str, Counter], observed: dict[str, Counter]) -> dict[str, dict[str, Any]]:
    """Per-category precision/recall of ``observed`` items against ``expected`` ones.

    Precision is undefined (``None``) when nothing was observed, recall when
    nothing was expected; both are 1 when the category is empty on both sides.
    """
    out = {}
    for cat in CATEGORIES:
        exp, obs = expected[cat], observed[cat]
        matched = sum((exp & obs).values())
        n_exp, n_obs = sum(exp.values()), sum(obs.values())
        if n_exp == 0 and n_obs == 0:
            precision = recall = 1.0
        else:
            precision = matched / n_obs if n_obs else None
            recall = matched / n_exp if n_exp else None
        out[cat] = {
            "expected_items": n_exp,
            "observed_items": n_obs,
            "matched_items": matched,
            "precision": precision,
            "recall": recall,
            "exact": exp == obs,
        }
    return out


@dataclass(frozen=True)
class DiscrepancyReport:
    recorded_counts: dict[str, int]
    ter_counts: dict[str, int]
    categories: dict[str, dict[str, Any]]
    recorded_actions: int
    ter_edits: int
    action_discrepancy: int
    affected_word_total: int
    her_score: Fraction
    ter_score: Fraction
    ratio: Fraction | None
    notes: list[str] = field(default_factory=list)

    @property
    def ratio_undefined(self) -> bool:
        return self.ratio is None

    def to_dict(self) -> dict[str, Any]:
        return {
            "recorded_counts": dict(self.recorded_counts),
            "ter_counts": dict(self.ter_counts),
            "categories": self.categories,
            "recorded_actions": self.recorded_actions,
            "ter_edits": self.ter_edits,
            "action_discrepancy": self.action_discrepancy,
            "affected_word_total": self.affected_word_total,
            "her_score": float(self.her_score),
            "ter_score": float(self.ter_score),
            "her_ter_ratio": None if self.ratio is None else float(self.ratio),
            "ratio_undefined": self.ratio_undefined,
            "notes": list(self.notes),
        }


def contrast_with_ter(log: EditLog, ter_result: TerResult, denominator: str = "target") -> DiscrepancyReport:
    """Compare logged actions with TER's minimal script between the same two texts.

    ``ter_result`` must score ``log.source`` (hypothesis) against ``log.final``.
    """
    fold = (lambda ws: ws) if ter_result.case_sensitive else (lambda ws: tuple(w.lower() for w in ws))
    if fold(log.source.words) != ter_result.hyp_words or fold(log.final.words) != ter_result.ref_words:
        raise InputMismatch("TER result was computed over different sequences than the log")
    her = validate_log(log, denominator)
    log_ops = [a.to_operation() for a in log.entries]
    logged = edit_items(log_ops, fold(log.source.words))
    ter_ops = [op for op in ter_result.script.ops if op.kind is not OpKind.MATCH]
    found = edit_items(ter_ops, ter_result.hyp_words)
    ter_counts = {
        "insert": ter_result.insertions,
        "delete": ter_result.deletions,
        "replace": ter_result.substitutions,
        "move": ter_result.shifts,
    }
    recorded = len(log.entries)
    ratio = her.her_score / ter_result.score if ter_result.score else None
    notes = []
    moved_words = sum(a.affected_words for a in log.entries if a.kind is ActionKind.MOVE)
    if moved_words:
        notes.append(
            f"logged moves touch {moved_words} words; TER charges each shift 1 regardless of length"
        )
    if ratio is None:
        notes.append("TER score is 0, HER/TER ratio undefined")
    return DiscrepancyReport(
        recorded_counts=her.action_counts,
        ter_counts=ter_counts,
        categories=agreement(logged, found),
        recorded_actions=recorded,
        ter_edits=ter_result.numerator,
        action_discrepancy=recorded - ter_result.numerator,
        affected_word_total=her.affected_word_total,
        her_score=her.her_score,
        ter_score=ter_result.score,
        ratio=ratio,
        notes=notes,
    )
