"""Controlled perturbation "staircases" with known ground-truth edit actions.

A staircase starts from a base sentence and applies one logged action per
step. Every step is scored with the requested metrics, and TER's edit script
against the base is compared category by category with the ground truth.
"""

from __future__ import annotations

import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Sequence

from .core import EditOperation, MetricResult, OpKind, TokenSequence
from .distances import Algorithm, DistanceVariant, Level
from .distances import compute as compute_distance
from .exceptions import (
    EditLensError,
    EmptySequenceUnderDeletion,
    InputError,
    SelectorOutOfRange,
)
from .her import (
    CATEGORIES,
    ActionKind,
    EditLog,
    LoggedAction,
    agreement,
    edit_items,
    invert_items,
    validate_log,
)
from .ngram_metrics import BleuConfig, ChrfConfig, bleu_sentence, chrf
from .ter import TerConfig, ter
from .tokenize import DEFAULT_CONFIG, NormalizationConfig, char_units, tokenize

RANDOM = "random"

# Payload vocabulary; draws skip words present in the base or the current sequence.
WORDLIST = (
    "amber", "basalt", "cobalt", "dune", "ember", "fjord", "garnet", "harbor",
    "indigo", "juniper", "kelp", "lagoon", "marble", "nectar", "onyx", "prairie",
    "quartz", "russet", "saffron", "tundra", "umber", "violet", "willow", "xenon",
    "yarrow", "zephyr", "alder", "bramble", "cinder", "delta", "estuary", "fennel",
    "glacier", "heather", "islet", "jasper", "kestrel", "lichen", "meadow", "nimbus",
)

SUPPORTED_METRICS = ("ter", "lev", "dl-osa", "dl", "lcs", "bleu", "chrf")


@dataclass(frozen=True)
class StepTemplate:
    kind: ActionKind
    at: int | str = RANDOM
    length: int = 1
    dest: int | str | None = None
    payload: tuple[str, ...] | None = None
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kind", ActionKind(str(self.kind).upper()))
        if self.length < 1:
            raise InputError("step length must be >= 1")
        for name in ("at", "dest"):
            value = getattr(self, name)
            if isinstance(value, str) and value != RANDOM:
                raise InputError(f"step selector {name}={value!r} must be an integer or 'random'")
        if self.kind is ActionKind.MOVE:
            if self.dest is None:
                raise InputError("move steps need a destination")
        elif self.dest is not None:
            raise InputError(f"{self.kind.value.lower()} steps take no destination")
        if self.payload is not None:
            if self.kind not in (ActionKind.INSERT, ActionKind.REPLACE):
                raise InputError(f"{self.kind.value.lower()} steps take no payload")
            payload = tuple(self.payload)
            if not payload or any(not w or any(c.isspace() for c in w) for w in payload):
                raise InputError("payload words must be non-empty and whitespace-free")
            object.__setattr__(self, "payload", payload)

    @classmethod
    def from_dict(cls, data: dict) -> "StepTemplate":
        unknown = set(data) - {"kind", "at", "length", "dest", "payload", "label"}
        if unknown:
            raise InputError(f"unknown step fields {sorted(unknown)}")
        try:
            return cls(
                kind=data["kind"],
                at=data.get("at", RANDOM),
                length=int(data.get("length", 1)),
                dest=data.get("dest"),
                payload=tuple(data["payload"]) if data.get("payload") is not None else None,
                label=str(data.get("label", "")),
            )
        except (KeyError, ValueError) as exc:
            raise InputError(f"malformed step {data!r}: {exc}") from None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"kind": self.kind.value.lower(), "at": self.at, "length": self.length}
        if self.dest is not None:
            out["dest"] = self.dest
        if self.payload is not None:
            out["payload"] = list(self.payload)
        if self.label:
            out["label"] = self.label
        return out


@dataclass(frozen=True)
class PerturbationSpec:
    steps: tuple[StepTemplate, ...] = ()
    seed: int = 0
    label: str = ""

    @classmethod
    def from_dict(cls, data: dict) -> "PerturbationSpec":
        if not isinstance(data, dict) or not isinstance(data.get("steps", []), list):
            raise InputError("staircase spec must be an object with a 'steps' list")
        steps = tuple(StepTemplate.from_dict(s) for s in data.get("steps", []))
        return cls(steps, int(data.get("seed", 0)), str(data.get("label", "")))

    @classmethod
    def from_json(cls, text: str) -> "PerturbationSpec":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InputError(f"staircase spec is not valid JSON: {exc}") from None

    def with_seed(self, seed: int) -> "PerturbationSpec":
        return PerturbationSpec(self.steps, seed, self.label)

    def to_dict(self) -> dict[str, Any]:
        return {"label": self.label, "seed": self.seed, "steps": [s.to_dict() for s in self.steps]}


def default_spec() -> PerturbationSpec:
    text = resources.files("editlens").joinpath("data/staircase_default.json").read_text("utf-8")
    return PerturbationSpec.from_json(text)


def default_base() -> str:
    return resources.files("editlens").joinpath("data/staircase_base.txt").read_text("utf-8").strip()


class _PayloadGenerator:
    def __init__(self, rng: random.Random, banned: set[str]):
        self.rng = rng
        self.used: set[str] = set(banned)

    def draw(self, current: Sequence[str], count: int) -> tuple[str, ...]:
        words = []
        for _ in range(count):
            pool = [w for w in WORDLIST if w not in self.used and w not in current]
            if not pool:
                raise InputError("payload word list exhausted")
            word = self.rng.choice(pool)
            self.used.add(word)
            words.append(word)
        return tuple(words)


def _resolve_action(step: StepTemplate, words: list[str], rng: random.Random, gen: _PayloadGenerator) -> EditOperation:
    n = len(words)
    kind = step.kind
    if kind in (ActionKind.DELETE, ActionKind.REPLACE, ActionKind.MOVE) and n == 0:
        raise EmptySequenceUnderDeletion(f"cannot {kind.value.lower()} in an empty sequence")
    if kind is ActionKind.INSERT:
        at = rng.randint(0, n) if step.at == RANDOM else step.at
        if not 0 <= at <= n:
            raise SelectorOutOfRange(f"insert position {at} outside [0, {n}]")
        payload = step.payload or gen.draw(words, step.length)
        return EditOperation(OpKind.INSERT, (at, at), (at, at + len(payload)), payload=payload)
    length = step.length
    if length > n:
        raise SelectorOutOfRange(f"span length {length} exceeds sequence length {n}")
    at = rng.randint(0, n - length) if step.at == RANDOM else step.at
    if not 0 <= at <= n - length:
        raise SelectorOutOfRange(f"span [{at},{at + length}) outside sequence of length {n}")
    span = (at, at + length)
    current = tuple(words[at : at + length])
    if kind is ActionKind.DELETE:
        return EditOperation(OpKind.DELETE, span, (at, at), expected=current)
    if kind is ActionKind.REPLACE:
        payload = step.payload or gen.draw(words, length)
        return EditOperation(OpKind.SUBSTITUTE, span, (at, at + len(payload)), payload=payload, expected=current)
    valid = [d for d in range(-1, n) if not (at - 1 <= d < at + length)]
    if step.dest == RANDOM:
        if not valid:
            raise SelectorOutOfRange(f"span {span} cannot move anywhere in a sequence of length {n}")
        dest = rng.choice(valid)
    else:
        dest = step.dest
        if dest not in valid:
            raise SelectorOutOfRange(f"move destination {dest} invalid for span {span} (length {n})")
    return EditOperation(OpKind.SHIFT, span, (0, 0), dest)


def apply_staircase(base: TokenSequence, spec: PerturbationSpec) -> list[tuple[TokenSequence, EditLog]]:
    """Apply the spec step by step.

    Returns one ``(sequence, cumulative_log)`` pair per step, starting with
    ``(base, empty log)``.
    """
    rng = random.Random(spec.seed)
    gen = _PayloadGenerator(rng, set(base.words))
    words = list(base.words)
    actions: list[LoggedAction] = []
    out = [(base, EditLog((), base, base))]
    for step in spec.steps:
        op = _resolve_action(step, words, rng, gen)
        words = op.apply(words)
        actions.append(LoggedAction.from_operation(op))
        seq = TokenSequence.from_words(words, base.normalization)
        out.append((seq, EditLog(tuple(actions), base, seq)))
    return out


# -- scoring ------------------------------------------------------------------------


@dataclass(frozen=True)
class StaircaseConfig:
    metrics: tuple[str, ...] = ("ter", "lev", "bleu", "chrf")
    ter: TerConfig = TerConfig()
    bleu: BleuConfig = field(default_factory=BleuConfig.sentence_default)
    chrf: ChrfConfig = ChrfConfig()
    normalization: NormalizationConfig = DEFAULT_CONFIG

    def __post_init__(self):
        if not self.metrics:
            raise InputError("metric set must not be empty")
        for name in self.metrics:
            algo = name.partition(":")[0]
            if name not in SUPPORTED_METRICS and algo != Algorithm.NGRAM.value:
                raise InputError(f"unsupported staircase metric {name!r}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "metrics": list(self.metrics),
            "ter": self.ter.to_dict(),
            "bleu": self.bleu.to_dict(),
            "chrf": self.chrf.to_dict(),
            "normalization": self.normalization.to_dict(),
        }


@dataclass
class StaircaseReport:
    label: str
    seed: int
    base: str
    references: list[str]
    config: dict[str, Any]
    rows: list[dict[str, Any]]
    summary: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {
            "label": self.label,
            "seed": self.seed,
            "base": self.base,
            "references": self.references,
            "config": self.config,
            "steps": self.rows,
            "summary": self.summary,
        }


def _score_metrics(seq: TokenSequence, refs: Sequence[TokenSequence], config: StaircaseConfig) -> list[MetricResult]:
    out = []
    hyp_text = seq.joined()
    ref_texts = [r.joined() for r in refs]
    for name in config.metrics:
        if name == "ter":
            out.append(ter(seq, refs, config.ter).to_metric_result())
        elif name == "bleu":
            out.append(bleu_sentence(seq, refs, config.bleu))
        elif name == "chrf":
            out.append(chrf(hyp_text, ref_texts, config.chrf))
        else:
            for level in (Level.TOKEN, Level.CHARACTER):
                variant = DistanceVariant.parse(name, level)
                best = None
                for idx, ref in enumerate(refs):
                    if level is Level.TOKEN:
                        res = compute_distance(variant, seq.words, ref.words)
                    else:
                        res = compute_distance(variant, char_units(hyp_text), char_units(ref_texts[idx]))
                    if best is None or res.score < best[0].score:
                        best = (res, idx)
                res, idx = best
                res.components["best_ref_index"] = idx
                out.append(res)
    return out


def _category_counts(ops) -> dict[str, int]:
    names = {OpKind.INSERT: "insert", OpKind.DELETE: "delete", OpKind.SUBSTITUTE: "replace", OpKind.SHIFT: "move"}
    counts = {c: 0 for c in CATEGORIES}
    for op in ops:
        if op.kind in names:
            counts[names[op.kind]] += 1
    return counts


_INVERSE = {"insert": "delete", "delete": "insert", "replace": "replace", "move": "move"}


def _score_row(args) -> dict[str, Any]:
    step, seq, log, base, refs, config = args
    row: dict[str, Any] = {
        "step": step,
        "action": log.entries[-1].to_dict() if log.entries else None,
        "text": seq.joined(),
    }
    gt_counts = _category_counts(a.to_operation() for a in log.entries)
    row["ground_truth"] = {
        "counts": gt_counts,
        "affected_words": sum(a.affected_words for a in log.entries),
    }
    try:
        her = validate_log(log)
        row["her"] = her.to_dict()
        row["metrics"] = [m.to_dict() for m in _score_metrics(seq, refs, config)]
        vs_base = ter(seq, [base], config.ter)
        edit_ops = [op for op in vs_base.script.ops if op.kind is not OpKind.MATCH]
        observed = edit_items(edit_ops, vs_base.hyp_words)
        expected = invert_items(edit_items([a.to_operation() for a in log.entries], base.words))
        agree = agreement(expected, observed)
        ter_counts = _category_counts(edit_ops)
        expected_counts = {_INVERSE[c]: n for c, n in gt_counts.items()}
        row["ter_vs_base"] = {
            "score": float(vs_base.score),
            "edits": vs_base.numerator,
            "counts": ter_counts,
            "expected_counts": {c: expected_counts[c] for c in CATEGORIES},
            "count_match": {c: ter_counts[c] == expected_counts[c] for c in CATEGORIES},
            "category_match": {c: agree[c]["exact"] for c in CATEGORIES},
            "agreement": agree,
        }
        no_shift = ter(seq, [base], TerConfig(0, config.ter.max_shift_distance, config.ter.case_sensitive))
        row["ter_without_shifts"] = {
            "edits": no_shift.numerator,
            "counts": _category_counts(no_shift.script.ops),
        }
        row["move_discrepancy"] = {
            "moved_words": sum(a.affected_words for a in log.entries if a.kind is ActionKind.MOVE),
            "ter_shift_cost": vs_base.shifts,
        }
    except EditLensError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _summarize(rows: list[dict[str, Any]]) -> dict[str, Any]:
    out = {}
    for cat in CATEGORIES:
        matched = observed = expected = 0
        for row in rows:
            if "ter_vs_base" not in row:
                continue
            a = row["ter_vs_base"]["agreement"][cat]
            matched += a["matched_items"]
            observed += a["observed_items"]
            expected += a["expected_items"]
        out[cat] = {
            "matched_items": matched,
            "observed_items": observed,
            "expected_items": expected,
            "precision": matched / observed if observed else None,
            "recall": matched / expected if expected else None,
        }
    return {
        "categories": out,
        "steps": len(rows),
        "error_rows": sum(1 for r in rows if "error" in r),
    }


def run_staircase(
    base: TokenSequence | str,
    refs: Sequence[TokenSequence | str] | None,
    spec: PerturbationSpec,
    config: StaircaseConfig = StaircaseConfig(),
    jobs: int = 1,
) -> StaircaseReport:
    """Generate the staircase and score every step.

    ``refs`` defaults to ``[base]``. Rows are scored in parallel when
    ``jobs > 1``; output order and content do not depend on ``jobs``.
    """
    if isinstance(base, str):
        base = tokenize(base, config.normalization)
    if refs is None:
        refs = [base]
    refs = [tokenize(r, config.normalization) if isinstance(r, str) else r for r in refs]
    if not refs:
        raise InputError("staircase needs at least one reference")
    steps = apply_staircase(base, spec)
    work = [(k, seq, log, base, refs, config) for k, (seq, log) in enumerate(steps)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_score_row, work))
    else:
        rows = [_score_row(w) for w in work]
    return StaircaseReport(
        label=spec.label,
        seed=spec.seed,
        base=base.joined(),
        references=[r.joined() for r in refs],
        config={"spec": spec.to_dict(), **config.to_dict()},
        rows=rows,
        summary=_summarize(rows),
    )
