"""Translation Edit Rate with greedy shift search.

The numerator is the number of shifts plus the Levenshtein distance of the
shifted hypothesis; the denominator is the average reference length.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .core import EditOperation, EditScript, MetricResult, OpKind, TokenSequence, shift_words
from .distances import alignment_path, path_to_ops
from .exceptions import EmptyReferenceSet, InvalidOperation, ZeroDenominator


@dataclass(frozen=True)
class TerConfig:
    max_shift_span: int = 10
    max_shift_distance: int = 50
    case_sensitive: bool = False

    def __post_init__(self):
        if self.max_shift_span < 0 or self.max_shift_distance < 0:
            raise ValueError("shift limits must be non-negative (0 disables shifting)")

    def to_dict(self) -> dict:
        return asdict(self)


class ShiftCandidate(NamedTuple):
    start: int
    end: int
    gap: int
    new_distance: int

    @property
    def dest(self) -> int:
        """Destination in :class:`EditOperation` convention (token index the span lands after)."""
        return self.gap - 1

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)


@dataclass(frozen=True)
class TerResult:
    score: Fraction
    insertions: int
    deletions: int
    substitutions: int
    shifts: int
    ref_length_avg: Fraction
    best_ref_index: int
    script: EditScript
    hyp_words: tuple[str, ...]
    ref_words: tuple[str, ...]
    case_sensitive: bool = False

    @property
    def numerator(self) -> int:
        return self.insertions + self.deletions + self.substitutions + self.shifts

    def to_metric_result(self, segment_id: str | None = None) -> MetricResult:
        comps = {
            "insertions": self.insertions,
            "deletions": self.deletions,
            "substitutions": self.substitutions,
            "shifts": self.shifts,
            "edits": self.numerator,
            "ref_length": self.ref_length_avg,
            "best_ref_index": self.best_ref_index,
        }
        return MetricResult("ter", self.score, comps, segment_id)


def _encode(hyp: Sequence[str], ref: Sequence[str]) -> tuple[list[int], list[int]]:
    vocab: dict[str, int] = {}
    h = [vocab.setdefault(w, len(vocab)) for w in hyp]
    r = [vocab.setdefault(w, len(vocab)) for w in ref]
    return h, r


def _edit_distance(h: Sequence[int], r: Sequence[int]) -> int:
    prev = list(range(len(r) + 1))
    for i, hi in enumerate(h, 1):
        cur = [i]
        left = i
        for j, rj in enumerate(r, 1):
            diag = prev[j - 1] + (hi != rj)
            up = prev[j] + 1
            left = left + 1
            best = diag if diag < up else up
            if left < best:
                best = left
            cur.append(best)
            left = best
        prev = cur
    return prev[-1]


def _alignment_info(path, n_hyp: int, n_ref: int):
    hyp_err = [1] * n_hyp
    ref_err = [1] * n_ref
    align = [0] * n_ref
    for kind, i, j in path:
        if kind is OpKind.MATCH:
            hyp_err[i] = ref_err[j] = 0
            align[j] = i
        elif kind is OpKind.SUBSTITUTE:
            align[j] = i
        elif kind is OpKind.INSERT:
            align[j] = i - 1
    return hyp_err, ref_err, align


def shift_candidates(hyp: Sequence, ref: Sequence, alignment, config: TerConfig) -> list[ShiftCandidate]:
    """Enumerate admissible shifts of ``hyp`` toward ``ref``.

    ``alignment`` is the current alignment path (see
    :func:`editlens.distances.alignment_path`). A candidate span must equal a
    reference substring, contain at least one misaligned hypothesis token,
    cover at least one misaligned reference token, and land next to the
    hypothesis token aligned with the reference position before (or inside)
    its reference match.
    """
    if config.max_shift_span == 0:
        return []
    n_hyp, n_ref = len(hyp), len(ref)
    hyp_err, ref_err, align = _alignment_info(alignment, n_hyp, n_ref)
    h, r = _encode(hyp, ref)
    seen: set[tuple[int, int, int]] = set()
    out = []
    for start_h in range(n_hyp):
        for start_r in range(n_ref):
            if abs(start_r - start_h) > config.max_shift_distance:
                continue
            length = 0
            while (
                length < config.max_shift_span
                and start_h + length < n_hyp
                and start_r + length < n_ref
                and h[start_h + length] == r[start_r + length]
            ):
                length += 1
                end_h = start_h + length
                if not any(hyp_err[start_h:end_h]):
                    continue
                if not any(ref_err[start_r : start_r + length]):
                    continue
                if start_h <= align[start_r] < end_h:
                    continue
                for offset in range(-1, length):
                    pos = start_r + offset
                    gap = 0 if pos == -1 else align[pos] + 1
                    if start_h <= gap <= end_h:
                        continue
                    key = (start_h, end_h, gap)
                    if key in seen:
                        continue
                    seen.add(key)
                    moved = shift_words(h, start_h, end_h, gap)
                    out.append(ShiftCandidate(start_h, end_h, gap, _edit_distance(moved, r)))
    return out


def _rank(cand: ShiftCandidate, current: int):
    return (current - cand.new_distance, cand.end - cand.start, -cand.start, -cand.gap)


def greedy_shift_loop(hyp: Sequence[str], ref: Sequence[str], config: TerConfig = TerConfig()):
    """Apply beneficial shifts until none helps.

    A shift is taken only when ``1 + new_distance < current_distance``, so the
    running total (shifts + distance) strictly decreases every iteration.
    Returns ``(shift_ops, final_ops, final_words)`` where ``final_ops`` is the
    Levenshtein script from the shifted hypothesis to ``ref``.
    """
    words = list(hyp)
    ref = list(ref)
    shifts: list[EditOperation] = []
    path = alignment_path(words, ref)
    current = sum(1 for kind, _, _ in path if kind is not OpKind.MATCH)
    while True:
        cands = shift_candidates(words, ref, path, config)
        if not cands:
            break
        best = max(cands, key=lambda c: _rank(c, current))
        if 1 + best.new_distance >= current:
            break
        shifts.append(
            EditOperation(
                OpKind.SHIFT,
                best.span,
                (0, 0),
                best.dest,
            )
        )
        words = shift_words(words, best.start, best.end, best.gap)
        path = alignment_path(words, ref)
        new = sum(1 for kind, _, _ in path if kind is not OpKind.MATCH)
        if new != best.new_distance:
            raise AssertionError("shift candidate distance disagrees with recomputed alignment")
        current = new
    final_ops = path_to_ops(path, words, ref)
    return shifts, final_ops, words


def _single(hyp: Sequence[str], ref: Sequence[str], config: TerConfig):
    shifts, final_ops, _ = greedy_shift_loop(hyp, ref, config)
    ops = tuple(shifts) + tuple(final_ops)
    script = EditScript(ops, len(hyp), len(ref))
    return script


def _fold(seq: TokenSequence, config: TerConfig) -> tuple[str, ...]:
    if config.case_sensitive:
        return seq.words
    return tuple(w.lower() for w in seq.words)


def ter(hyp: TokenSequence, refs: Sequence[TokenSequence], config: TerConfig = TerConfig()) -> TerResult:
    """Score ``hyp`` against one or more references.

    The numerator is minimized over references (ties go to the first); the
    denominator is the average reference length. Without ``case_sensitive``
    tokens are lowercased first, and the returned script maps the lowercased
    hypothesis onto the lowercased best reference.
    """
    if not refs:
        raise EmptyReferenceSet("TER needs at least one reference")
    norms = {r.normalization for r in refs} | {hyp.normalization}
    if len(norms) > 1:
        raise InvalidOperation("hypothesis and references use different normalization")
    hyp_words = _fold(hyp, config)
    best = None
    total_len = 0
    for idx, ref in enumerate(refs):
        ref_words = _fold(ref, config)
        total_len += len(ref_words)
        script = _single(hyp_words, ref_words, config)
        if best is None or script.cost < best[1].cost:
            best = (idx, script, ref_words)
    avg = Fraction(total_len, len(refs))
    idx, script, ref_words = best
    counts = script.counts()
    numerator = script.cost
    if avg == 0:
        if numerator:
            raise ZeroDenominator("all references are empty; TER is undefined")
        score = Fraction(0)
    else:
        score = Fraction(numerator) / avg
    return TerResult(
        score=score,
        insertions=counts["insert"],
        deletions=counts["delete"],
        substitutions=counts["substitute"],
        shifts=counts["shift"],
        ref_length_avg=avg,
        best_ref_index=idx,
        script=script,
        hyp_words=hyp_words,
        ref_words=ref_words,
        case_sensitive=config.case_sensitive,
    )


def ter_statistics(hyp: TokenSequence, refs: Sequence[TokenSequence], config: TerConfig = TerConfig()):
    """Sufficient statistics ``(edits, avg_ref_length)`` for corpus pooling; never raises on empty refs."""
    if not refs:
        raise EmptyReferenceSet("TER needs at least one reference")
    hyp_words = _fold(hyp, config)
    best = None
    total = 0
    for ref in refs:
        ref_words = _fold(ref, config)
        total += len(ref_words)
        cost = _single(hyp_words, ref_words, config).cost
        best = cost if best is None else min(best, cost)
    return best, Fraction(total, len(refs))


def corpus_ter(stats: Sequence[tuple[int, Fraction]]) -> MetricResult:
    edits = sum(e for e, _ in stats)
    length = sum((l for _, l in stats), Fraction(0))
    if length:
        score = Fraction(edits) / length
    elif edits:
        raise ZeroDenominator("corpus references are all empty; TER is undefined")
    else:
        score = Fraction(0)
    return MetricResult("ter", score, {"edits": edits, "ref_length": length})
