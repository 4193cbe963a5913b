"""Command-line front end.

Exit codes: 0 success, 1 internal error, 2 input error. Reports are written
only once fully computed, so a failing run never leaves a partial report.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .core import OpKind, format_op, replay_words
from .distances import Algorithm, DistanceVariant, Level, levenshtein
from .distances import compute as compute_distance
from .exceptions import CorpusMismatch, EditLensError, InputError, ZeroDenominator
from .her import contrast_with_ter, parse_log
from .ngram_metrics import (
    BleuConfig,
    ChrfConfig,
    bleu_from_statistics,
    bleu_statistics,
    chrf_from_statistics,
    chrf_statistics,
)
from .rates import RateBandTable, band_for, default_table, weighted_wordcount
from .staircase import PerturbationSpec, StaircaseConfig, default_base, default_spec, run_staircase
from .ter import TerConfig, corpus_ter, ter, ter_statistics
from .tokenize import NormalizationConfig, char_units, normalize_text, tokenize

TOOL = "editlens"
DISTANCE_NAMES = tuple(a.value for a in Algorithm if a is not Algorithm.NGRAM)


# -- corpus input -------------------------------------------------------------------


def read_lines(path: str | Path) -> list[str]:
    """Read a UTF-8, one-segment-per-line file."""
    text = Path(path).read_text(encoding="utf-8")
    if not text:
        return []
    lines = text.split("\n")
    if lines[-1] == "":
        lines.pop()
    return [line.rstrip("\r") for line in lines]


@dataclass(frozen=True)
class CorpusInput:
    hyp_path: str
    ref_paths: tuple[str, ...]
    hyps: tuple[str, ...]
    refs: tuple[tuple[str, ...], ...]  # refs[i] = reference set of segment i

    @classmethod
    def load(cls, hyp_path: str, ref_paths: Sequence[str]) -> "CorpusInput":
        if not ref_paths:
            raise InputError("at least one --ref file is required")
        hyps = read_lines(hyp_path)
        columns = []
        for path in ref_paths:
            lines = read_lines(path)
            if len(lines) != len(hyps):
                raise CorpusMismatch(
                    f"{path}: {len(lines)} lines, but hypothesis file {hyp_path} has {len(hyps)}"
                )
            columns.append(lines)
        refs = tuple(tuple(col[i] for col in columns) for i in range(len(hyps)))
        return cls(str(hyp_path), tuple(str(p) for p in ref_paths), tuple(hyps), refs)

    def __len__(self) -> int:
        return len(self.hyps)


# -- scoring ------------------------------------------------------------------------


@dataclass(frozen=True)
class ScoreConfig:
    metrics: tuple[str, ...]
    level: Level
    normalization: NormalizationConfig
    ter: TerConfig
    bleu_sentence: BleuConfig
    bleu_corpus: BleuConfig
    chrf: ChrfConfig

    def to_dict(self) -> dict[str, Any]:
        return {
            "metrics": list(self.metrics),
            "level": self.level.value,
            "normalization": self.normalization.to_dict(),
            "ter": self.ter.to_dict(),
            "bleu_sentence": self.bleu_sentence.to_dict(),
            "bleu_corpus": self.bleu_corpus.to_dict(),
            "chrf": self.chrf.to_dict(),
        }


def parse_metric_list(values: Sequence[str]) -> tuple[str, ...]:
    out = []
    for value in values:
        for name in value.split(","):
            name = name.strip()
            if not name:
                continue
            algo, _, order = name.partition(":")
            if name in ("ter", "bleu", "chrf") or name in DISTANCE_NAMES:
                pass
            elif algo == "ngram":
                try:
                    DistanceVariant.parse(name)
                except ValueError as exc:
                    raise InputError(f"bad metric {name!r}: {exc}") from None
            else:
                raise InputError(f"unknown metric {name!r}")
            if name not in out:
                out.append(name)
    if not out:
        raise InputError("no metrics requested")
    return tuple(out)


def _units(text: str, level: Level, config: NormalizationConfig):
    if level is Level.TOKEN:
        return tokenize(text, config).words
    return char_units(normalize_text(text, config))


def _score_segment(args) -> dict[str, Any]:
    """Per-segment results plus the sufficient statistics for corpus pooling."""
    index, hyp_raw, ref_raws, config = args
    seg_id = str(index + 1)
    norm = config.normalization
    hyp = tokenize(hyp_raw, norm)
    refs = [tokenize(r, norm) for r in ref_raws]
    results = []
    stats: dict[str, Any] = {}
    for name in config.metrics:
        try:
            if name == "ter":
                try:
                    ter_result = ter(hyp, refs, config.ter)
                except ZeroDenominator:
                    stats["ter"] = ter_statistics(hyp, refs, config.ter)
                    raise
                stats["ter"] = (ter_result.numerator, ter_result.ref_length_avg)
                result = ter_result.to_metric_result(seg_id)
            elif name == "bleu":
                seg_stats = bleu_statistics(hyp.words, [r.words for r in refs], config.bleu_corpus.max_order)
                stats["bleu"] = seg_stats
                result = bleu_from_statistics(seg_stats, config.bleu_sentence)
            elif name == "chrf":
                hyp_text = normalize_text(hyp_raw, norm)
                seg_stats, idx = chrf_statistics(hyp_text, [normalize_text(r, norm) for r in ref_raws], config.chrf)
                stats["chrf"] = seg_stats
                result = chrf_from_statistics(seg_stats, config.chrf)
                result.components["best_ref_index"] = idx
            else:
                variant = DistanceVariant.parse(name, config.level)
                a = _units(hyp_raw, config.level, norm)
                best = None
                for idx, ref_raw in enumerate(ref_raws):
                    res = compute_distance(variant, a, _units(ref_raw, config.level, norm))
                    if best is None or res.score < best[0].score:
                        best = (res, idx)
                result, idx = best
                result.components["best_ref_index"] = idx
                stats[name] = result.score
            entry = result.to_dict()
            entry["metric"] = result.metric_name
        except ZeroDenominator as exc:
            entry = {"metric": name, "score": None, "error": str(exc)}
        entry["segment_id"] = seg_id
        results.append(entry)
    return {"segment_id": seg_id, "results": results, "stats": stats}


def _map(func, items: list, jobs: int) -> list:
    if jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(func, items, chunksize=max(1, len(items) // (4 * jobs))))
    return [func(item) for item in items]


def score_corpus(corpus: CorpusInput, config: ScoreConfig, jobs: int = 1) -> dict[str, Any]:
    work = [(i, corpus.hyps[i], corpus.refs[i], config) for i in range(len(corpus))]
    segments = _map(_score_segment, work, jobs)
    aggregates: dict[str, Any] = {}
    for name in config.metrics:
        collected = [seg["stats"][name] for seg in segments if name in seg["stats"]]
        if not collected:
            aggregates[name] = {"score": None, "segments": 0}
            continue
        if name == "ter":
            result = corpus_ter(collected)
        elif name == "bleu":
            pooled = [sum(col) for col in zip(*collected)]
            result = bleu_from_statistics(pooled, config.bleu_corpus)
        elif name == "chrf":
            pooled = [sum(col) for col in zip(*collected)]
            result = chrf_from_statistics(pooled, config.chrf)
        else:
            mean = sum(collected, Fraction(0)) / len(collected)
            aggregates[name] = {"score": float(mean), "aggregation": "mean", "segments": len(collected)}
            continue
        entry = result.to_dict()
        entry.pop("metric", None)
        entry["aggregation"] = "pooled"
        entry["segments"] = len(collected)
        aggregates[name] = entry
    return {
        "tool": TOOL,
        "version": __version__,
        "command": "score",
        "inputs": {"hyp": corpus.hyp_path, "refs": list(corpus.ref_paths), "segments": len(corpus)},
        "config": config.to_dict(),
        "segments": [{"segment_id": s["segment_id"], "results": s["results"]} for s in segments],
        "corpus": aggregates,
    }


# -- rendering ----------------------------------------------------------------------


def dump_json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _fmt_score(value) -> str:
    return "" if value is None else repr(float(value))


def score_tsv(report: dict[str, Any]) -> str:
    lines = ["segment\tmetric\tscore"]
    for seg in report["segments"]:
        for res in seg["results"]:
            lines.append(f"{seg['segment_id']}\t{res['metric']}\t{_fmt_score(res['score'])}")
    for name in report["config"]["metrics"]:
        lines.append(f"corpus\t{name}\t{_fmt_score(report['corpus'][name]['score'])}")
    return "\n".join(lines) + "\n"


def render_alignment(ops, hyp_units: Sequence[str], ref_units: Sequence[str]) -> str:
    """Two-row rendering of the non-shift part of a script; gaps shown as ``*``."""
    work = list(hyp_units)
    for op in ops:
        if op.kind is OpKind.SHIFT:
            work = op.apply(work)
    top, bottom = [], []
    pos = 0  # read position in the shifted hypothesis
    for op in ops:
        if op.kind is OpKind.SHIFT:
            continue
        n = op.hyp_span[1] - op.hyp_span[0]
        k, l = op.ref_span
        if op.kind is OpKind.INSERT:
            a, b = "", " ".join(ref_units[k:l])
        else:
            a = " ".join(work[pos : pos + n])
            b = "" if op.kind is OpKind.DELETE else " ".join(ref_units[k:l])
            pos += n
        width = max(len(a), len(b), 1)
        top.append((a or "*" * width).ljust(width))
        bottom.append((b or "*" * width).ljust(width))
    return "HYP: " + " ".join(top).rstrip() + "\nREF: " + " ".join(bottom).rstrip() + "\n"


def trace_text(hyp_raw: str, ref_raw: str, metric: str, level: Level, norm: NormalizationConfig, ter_config: TerConfig) -> str:
    if metric == "ter":
        hyp, ref = tokenize(hyp_raw, norm), tokenize(ref_raw, norm)
        result = ter(hyp, [ref], ter_config)
        ops, a, b = result.script.ops, result.hyp_words, result.ref_words
        header = (
            f"# ter edits={result.numerator} ref_length={result.ref_length_avg} "
            f"score={float(result.score)!r}\n"
        )
    elif metric == "lev":
        a, b = _units(hyp_raw, level, norm), _units(ref_raw, level, norm)
        dist, script = levenshtein(a, b)
        ops = script.ops
        header = f"# lev@{level.value} distance={dist}\n"
    else:
        raise InputError(f"no edit script available for metric {metric!r} (use ter or lev)")
    if replay_words(ops, a) != list(b):
        raise AssertionError("trace script does not replay onto the reference")
    body = "".join(format_op(op) + "\n" for op in ops)
    return header + body + "\n" + render_alignment(ops, a, b)


# -- argument parsing -----------------------------------------------------------------


def _global_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--cased", action="store_true", help="keep case (default lowercases)")
    g.add_argument("--no-punct-split", action="store_true", help="keep punctuation attached to words")
    g.add_argument("--no-nfc", action="store_true", help="skip Unicode NFC normalization")
    g.add_argument("--seed", type=int, default=None, help="seed for all randomized choices")
    g.add_argument("--format", choices=("json", "tsv"), default="json")
    g.add_argument("--out", default=None, help="output path (default stdout)")
    g.add_argument("--jobs", type=int, default=1, help="worker processes; never changes output")
    return p


def _ter_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-shift-span", type=int, default=10)
    p.add_argument("--max-shift-distance", type=int, default=50)


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags()
    parser = argparse.ArgumentParser(prog=TOOL, description="Edit distances and MT metrics with edit traces.")
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("score", parents=[common], help="score a line-aligned corpus")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", action="append", required=True, help="reference file (repeatable)")
    p.add_argument("--metric", action="append", default=None,
                   help="lev|dl-osa|dl|lcs|ngram:<n>|ter|bleu|chrf (comma list or repeated)")
    p.add_argument("--level", choices=("char", "token"), default="token")
    p.add_argument("--bleu-order", type=int, default=4)
    p.add_argument("--chrf-order", type=int, default=6)
    p.add_argument("--chrf-beta", type=float, default=2.0)
    p.add_argument("--smoothing", default=None, help="none|floor[:eps]|add-k[:k] (applies to sentence and corpus BLEU)")
    _ter_flags(p)

    p = sub.add_parser("trace", parents=[common], help="print the edit script between two lines")
    p.add_argument("hyp_line")
    p.add_argument("ref_line")
    p.add_argument("--metric", choices=("ter", "lev"), default="ter")
    p.add_argument("--level", choices=("char", "token"), default="token")
    _ter_flags(p)

    p = sub.add_parser("staircase", parents=[common], help="run a perturbation staircase")
    p.add_argument("--base", default=None, help="file holding the base sentence (default: bundled)")
    p.add_argument("--spec", default=None, help="staircase spec JSON (default: bundled)")
    p.add_argument("--ref", action="append", default=None, help="reference file(s); default is the base")
    p.add_argument("--metrics", default="ter,lev,bleu,chrf")
    p.add_argument("--chrf-order", type=int, default=6)
    p.add_argument("--chrf-beta", type=float, default=2.0)
    _ter_flags(p)

    p = sub.add_parser("rates", parents=[common], help="similarity-banded weighted word count")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", action="append", required=True)
    p.add_argument("--table", default=None, help="rate band JSON (default: bundled illustrative table)")
    p.add_argument("--similarity-from", choices=("lev", "ter"), default="lev")
    p.add_argument("--level", choices=("char", "token"), default="token")
    _ter_flags(p)

    p = sub.add_parser("compare", parents=[common], help="contrast a recorded edit log with TER")
    p.add_argument("--log", required=True)
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--her-denominator", choices=("target", "source"), default="target")
    _ter_flags(p)
    return parser


def _normalization(args) -> NormalizationConfig:
    return NormalizationConfig(
        lowercase=not args.cased,
        split_punctuation=not args.no_punct_split,
        unicode_nfc=not args.no_nfc,
    )


def _ter_config(args) -> TerConfig:
    try:
        return TerConfig(args.max_shift_span, args.max_shift_distance, case_sensitive=args.cased)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _global_echo(args) -> dict[str, Any]:
    return {"seed": args.seed, "format": args.format}


def _single_line(path: str, what: str) -> str:
    lines = [line for line in read_lines(path) if line.strip()]
    if len(lines) != 1:
        raise InputError(f"{path}: {what} file must hold exactly one non-empty line, found {len(lines)}")
    return lines[0]


def cmd_score(args) -> str:
    norm = _normalization(args)
    metrics = parse_metric_list(args.metric or ["ter,bleu,chrf"])
    try:
        if args.smoothing is not None:
            method, value = BleuConfig.parse_smoothing(args.smoothing)
            sentence = BleuConfig(args.bleu_order, method, value, effective_order=True)
            corpus_cfg = BleuConfig(args.bleu_order, method, value)
        else:
            sentence = BleuConfig.sentence_default(args.bleu_order)
            corpus_cfg = BleuConfig(args.bleu_order)
        chrf_cfg = ChrfConfig(args.chrf_order, args.chrf_beta)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    config = ScoreConfig(metrics, Level(args.level), norm, _ter_config(args), sentence, corpus_cfg, chrf_cfg)
    corpus = CorpusInput.load(args.hyp, args.ref)
    report = score_corpus(corpus, config, args.jobs)
    report["config"]["global"] = _global_echo(args)
    return score_tsv(report) if args.format == "tsv" else dump_json(report)


def cmd_trace(args) -> str:
    norm = _normalization(args)
    return trace_text(args.hyp_line, args.ref_line, args.metric, Level(args.level), norm, _ter_config(args))


def cmd_staircase(args) -> str:
    norm = _normalization(args)
    base = _single_line(args.base, "base") if args.base else default_base()
    spec = PerturbationSpec.from_json(Path(args.spec).read_text("utf-8")) if args.spec else default_spec()
    if args.seed is not None:
        spec = spec.with_seed(args.seed)
    refs = None
    if args.ref:
        refs = [_single_line(p, "reference") for p in args.ref]
    try:
        config = StaircaseConfig(
            metrics=parse_metric_list([args.metrics]),
            ter=_ter_config(args),
            chrf=ChrfConfig(args.chrf_order, args.chrf_beta),
            normalization=norm,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None
    report = run_staircase(base, refs, spec, config, jobs=args.jobs)
    out = {"tool": TOOL, "version": __version__, "command": "staircase", **report.to_dict()}
    out["config"]["global"] = _global_echo(args)
    if args.format == "tsv":
        lines = ["step\tmetric\tscore"]
        for row in report.rows:
            for res in row.get("metrics", []):
                lines.append(f"{row['step']}\t{res['metric']}\t{_fmt_score(res['score'])}")
        return "\n".join(lines) + "\n"
    return dump_json(out)


def _similarity(hyp_raw: str, ref_raws: Sequence[str], source: str, level: Level, norm, ter_config) -> Fraction:
    if source == "ter":
        hyp = tokenize(hyp_raw, norm)
        try:
            score = ter(hyp, [tokenize(r, norm) for r in ref_raws], ter_config).score
        except ZeroDenominator:
            return Fraction(0)
        return 1 - min(score, Fraction(1))
    variant = DistanceVariant(Algorithm.LEVENSHTEIN, level)
    a = _units(hyp_raw, level, norm)
    best = min(compute_distance(variant, a, _units(r, level, norm)).score for r in ref_raws)
    return 1 - best


def cmd_rates(args) -> str:
    norm = _normalization(args)
    table = RateBandTable.from_json(Path(args.table).read_text("utf-8")) if args.table else default_table()
    corpus = CorpusInput.load(args.hyp, args.ref)
    level = Level(args.level)
    ter_config = _ter_config(args)
    rows = []
    pairs = []
    for i, (hyp_raw, ref_raws) in enumerate(zip(corpus.hyps, corpus.refs)):
        count = len(tokenize(hyp_raw, norm))
        sim = _similarity(hyp_raw, ref_raws, args.similarity_from, level, norm, ter_config)
        band, mult = band_for(sim, table)
        pairs.append((count, sim))
        rows.append({
            "segment_id": str(i + 1),
            "token_count": count,
            "similarity": float(sim),
            "band": band.label,
            "multiplier": str(mult),
        })
    total = weighted_wordcount(pairs, table)
    report = {
        "tool": TOOL,
        "version": __version__,
        "command": "rates",
        "inputs": {"hyp": corpus.hyp_path, "refs": list(corpus.ref_paths), "segments": len(corpus)},
        "config": {
            "similarity_from": args.similarity_from,
            "level": level.value,
            "normalization": norm.to_dict(),
            "ter": ter_config.to_dict(),
            "table": table.to_dict(),
            "global": _global_echo(args),
        },
        "segments": rows,
        "weighted_wordcount": str(total),
        "raw_wordcount": sum(c for c, _ in pairs),
        "cost": str(total * table.base_rate),
    }
    if args.format == "tsv":
        lines = ["segment\ttoken_count\tsimilarity\tband\tmultiplier"]
        for r in rows:
            lines.append(f"{r['segment_id']}\t{r['token_count']}\t{r['similarity']!r}\t{r['band']}\t{r['multiplier']}")
        lines.append(f"total\t{report['raw_wordcount']}\t\t\t{report['weighted_wordcount']}")
        return "\n".join(lines) + "\n"
    return dump_json(report)


def cmd_compare(args) -> str:
    norm = _normalization(args)
    source = tokenize(_single_line(args.source, "source"), norm)
    target = tokenize(_single_line(args.target, "target"), norm)
    log = parse_log(Path(args.log).read_text("utf-8"), source, target)
    ter_config = _ter_config(args)
    result = ter(source, [target], ter_config)
    report = contrast_with_ter(log, result, args.her_denominator)
    out = {
        "tool": TOOL,
        "version": __version__,
        "command": "compare",
        "inputs": {"log": args.log, "source": args.source, "target": args.target},
        "config": {
            "her_denominator": args.her_denominator,
            "normalization": norm.to_dict(),
            "ter": ter_config.to_dict(),
            "global": _global_echo(args),
        },
        "report": report.to_dict(),
        "ter_script": result.script.to_text().splitlines(),
    }
    if args.format == "tsv":
        lines = ["category\trecorded\tter\tprecision\trecall"]
        for cat, info in report.categories.items():
            lines.append(
                f"{cat}\t{report.recorded_counts[cat]}\t{report.ter_counts[cat]}\t"
                f"{_fmt_score(info['precision'])}\t{_fmt_score(info['recall'])}"
            )
        return "\n".join(lines) + "\n"
    return dump_json(out)


COMMANDS = {
    "score": cmd_score,
    "trace": cmd_trace,
    "staircase": cmd_staircase,
    "rates": cmd_rates,
    "compare": cmd_compare,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.jobs < 1:
            raise InputError("--jobs must be >= 1")
        output = COMMANDS[args.command](args)
    except (InputError, OSError, UnicodeDecodeError) as exc:
        print(f"{TOOL}: error: {exc}", file=sys.stderr)
        return 2
    except EditLensError as exc:
        print(f"{TOOL}: internal error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - any other failure is an internal error
        print(f"{TOOL}: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if args.out:
        Path(args.out).write_text(output, encoding="utf-8")
    else:
        sys.stdout.write(output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
