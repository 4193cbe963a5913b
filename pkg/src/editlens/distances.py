"""Classic edit distances over arbitrary unit sequences (characters or tokens)."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Sequence

from .core import EditOperation, EditScript, MetricResult, OpKind


class Algorithm(str, enum.Enum):
    LEVENSHTEIN = "lev"
    DAMERAU_OSA = "dl-osa"
    DAMERAU_UNRESTRICTED = "dl"
    LCS = "lcs"
    NGRAM = "ngram"


class Level(str, enum.Enum):
    CHARACTER = "char"
    TOKEN = "token"


@dataclass(frozen=True)
class DistanceVariant:
    algorithm: Algorithm
    level: Level = Level.TOKEN
    ngram_order: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "algorithm", Algorithm(self.algorithm))
        object.__setattr__(self, "level", Level(self.level))
        if self.algorithm is Algorithm.NGRAM:
            if self.ngram_order is None:
                object.__setattr__(self, "ngram_order", 2)
            if self.ngram_order < 1:
                raise ValueError("ngram_order must be positive")
        elif self.ngram_order is not None:
            raise ValueError("ngram_order only applies to the n-gram profile distance")

    @classmethod
    def parse(cls, name: str, level: str | Level = Level.TOKEN) -> "DistanceVariant":
        """Parse CLI names such as ``lev``, ``dl-osa`` or ``ngram:3``."""
        algo, _, order = name.partition(":")
        if algo == Algorithm.NGRAM.value:
            return cls(Algorithm.NGRAM, level, int(order) if order else 2)
        if order:
            raise ValueError(f"metric {algo!r} takes no order")
        return cls(Algorithm(algo), level)

    @property
    def name(self) -> str:
        if self.algorithm is Algorithm.NGRAM:
            return f"ngram:{self.ngram_order}"
        return self.algorithm.value


def _levenshtein_matrix(a: Sequence, b: Sequence) -> list[list[int]]:
    n, m = len(a), len(b)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for j in range(m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        row, prev = d[i], d[i - 1]
        row[0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            row[j] = min(
                prev[j - 1] + (ai != b[j - 1]),
                prev[j] + 1,
                row[j - 1] + 1,
            )
    return d


def levenshtein_distance(a: Sequence, b: Sequence) -> int:
    """Distance only, two-row DP."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ai in enumerate(a, 1):
        cur = [i]
        for j, bj in enumerate(b, 1):
            cur.append(min(prev[j - 1] + (ai != bj), prev[j] + 1, cur[j - 1] + 1))
        prev = cur
    return prev[-1]


def alignment_path(a: Sequence, b: Sequence) -> list[tuple[OpKind, int, int]]:
    """Optimal alignment of ``a`` onto ``b`` as (kind, i, j) triples in order.

    ``i``/``j`` index into ``a``/``b``; Insert carries ``i`` = the gap position.
    Ties in the backtrace resolve Match > Substitute > Delete > Insert.
    """
    d = _levenshtein_matrix(a, b)
    i, j = len(a), len(b)
    path = []
    while i > 0 or j > 0:
        cur = d[i][j]
        if i > 0 and j > 0 and a[i - 1] == b[j - 1] and d[i - 1][j - 1] == cur:
            path.append((OpKind.MATCH, i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i > 0 and j > 0 and a[i - 1] != b[j - 1] and d[i - 1][j - 1] + 1 == cur:
            path.append((OpKind.SUBSTITUTE, i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i > 0 and d[i - 1][j] + 1 == cur:
            path.append((OpKind.DELETE, i - 1, j))
            i -= 1
        else:
            path.append((OpKind.INSERT, i, j - 1))
            j -= 1
    path.reverse()
    return path


def path_to_ops(path, a: Sequence, b: Sequence) -> list[EditOperation]:
    """Turn an alignment path into application-order ops.

    Walking left to right, the working prefix before position ``j`` already
    equals ``b[:j]``, so every op acts at the current reference position.
    """
    ops = []
    pos = 0
    for kind, i, j in path:
        ua = str(a[i]) if kind is not OpKind.INSERT else None
        if kind is OpKind.MATCH:
            ops.append(EditOperation(kind, (pos, pos + 1), (j, j + 1), expected=(ua,)))
            pos += 1
        elif kind is OpKind.SUBSTITUTE:
            ops.append(
                EditOperation(kind, (pos, pos + 1), (j, j + 1), payload=(str(b[j]),), expected=(ua,))
            )
            pos += 1
        elif kind is OpKind.DELETE:
            ops.append(EditOperation(kind, (pos, pos + 1), (j, j), expected=(ua,)))
        else:
            ops.append(EditOperation(kind, (pos, pos), (j, j + 1), payload=(str(b[j]),)))
            pos += 1
    return ops


def levenshtein(a: Sequence, b: Sequence) -> tuple[int, EditScript]:
    """Levenshtein distance plus an edit script that realizes it."""
    path = alignment_path(a, b)
    ops = path_to_ops(path, a, b)
    script = EditScript(tuple(ops), len(a), len(b))
    return script.cost, script


def damerau(a: Sequence, b: Sequence, variant: str = "osa") -> int:
    """Damerau-Levenshtein distance.

    ``variant="osa"`` is optimal string alignment (no substring edited twice);
    ``variant="unrestricted"`` is the true metric (Lowrance-Wagner).
    """
    if variant == "osa":
        return _osa(a, b)
    if variant == "unrestricted":
        return _damerau_unrestricted(a, b)
    raise ValueError(f"unknown Damerau variant {variant!r}")


def _osa(a, b):
    n, m = len(a), len(b)
    d = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        d[i][0] = i
    for j in range(m + 1):
        d[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost = a[i - 1] != b[j - 1]
            best = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost)
            if i > 1 and j > 1 and a[i - 1] == b[j - 2] and a[i - 2] == b[j - 1]:
                best = min(best, d[i - 2][j - 2] + 1)
            d[i][j] = best
    return d[n][m]


def _damerau_unrestricted(a, b):
    n, m = len(a), len(b)
    inf = n + m
    last_row: dict[Hashable, int] = {}
    d = [[0] * (m + 2) for _ in range(n + 2)]
    d[0][0] = inf
    for i in range(n + 1):
        d[i + 1][0] = inf
        d[i + 1][1] = i
    for j in range(m + 1):
        d[0][j + 1] = inf
        d[1][j + 1] = j
    for i in range(1, n + 1):
        last_match_col = 0
        for j in range(1, m + 1):
            k = last_row.get(b[j - 1], 0)
            l = last_match_col
            if a[i - 1] == b[j - 1]:
                cost = 0
                last_match_col = j
            else:
                cost = 1
            d[i + 1][j + 1] = min(
                d[i][j] + cost,
                d[i + 1][j] + 1,
                d[i][j + 1] + 1,
                d[k][l] + (i - k - 1) + 1 + (j - l - 1),
            )
        last_row[a[i - 1]] = i
    return d[n + 1][m + 1]


def lcs_length(a: Sequence, b: Sequence) -> int:
    prev = [0] * (len(b) + 1)
    for ai in a:
        cur = [0]
        for j, bj in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if ai == bj else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def lcs_distance(a: Sequence, b: Sequence) -> tuple[int, int]:
    """Insert/delete-only distance; returns (distance, lcs_length)."""
    length = lcs_length(a, b)
    return len(a) + len(b) - 2 * length, length


class _Boundary:
    """Padding symbol that never equals a real unit."""

    def __repr__(self):
        return "<BOUNDARY>"


BOUNDARY = _Boundary()


def ngram_profile(seq: Sequence, order: int) -> Counter:
    if order < 1:
        raise ValueError("n-gram order must be >= 1")
    units = list(seq)
    if len(units) < order:
        units += [BOUNDARY] * (order - len(units))
    return Counter(tuple(units[i : i + order]) for i in range(len(units) - order + 1))


def ngram_distance(a: Sequence, b: Sequence, order: int = 2) -> Fraction:
    """Dice-style distance between n-gram multiset profiles, in [0, 1]."""
    pa, pb = ngram_profile(a, order), ngram_profile(b, order)
    shared = sum((pa & pb).values())
    total = sum(pa.values()) + sum(pb.values())
    return 1 - Fraction(2 * shared, total)


def normalized(distance: int, a: Sequence, b: Sequence) -> Fraction:
    longest = max(len(a), len(b))
    if longest == 0:
        return Fraction(0)
    return Fraction(distance, longest)


def similarity(distance: int, a: Sequence, b: Sequence) -> Fraction:
    return 1 - normalized(distance, a, b)


def compute(variant: DistanceVariant, a: Sequence, b: Sequence) -> MetricResult:
    """Score one unit-sequence pair; the score is always a normalized distance in [0, 1].

    LCS distance can reach ``|a| + |b|``, so it is normalized by that sum.
    """
    algo = variant.algorithm
    comps: dict = {"hyp_length": len(a), "ref_length": len(b)}
    if algo is Algorithm.LEVENSHTEIN:
        dist, script = levenshtein(a, b)
        counts = script.counts()
        comps.update(
            insertions=counts["insert"],
            deletions=counts["delete"],
            substitutions=counts["substitute"],
            distance=dist,
            max_length=max(len(a), len(b)),
        )
        score = normalized(dist, a, b)
    elif algo in (Algorithm.DAMERAU_OSA, Algorithm.DAMERAU_UNRESTRICTED):
        dist = damerau(a, b, "osa" if algo is Algorithm.DAMERAU_OSA else "unrestricted")
        comps.update(distance=dist, max_length=max(len(a), len(b)))
        score = normalized(dist, a, b)
    elif algo is Algorithm.LCS:
        dist, length = lcs_distance(a, b)
        comps.update(distance=dist, lcs_length=length, total_length=len(a) + len(b))
        score = Fraction(dist, len(a) + len(b)) if (a or b) else Fraction(0)
    else:
        score = ngram_distance(a, b, variant.ngram_order)
        comps.update(order=variant.ngram_order)
    return MetricResult(f"{variant.name}@{variant.level.value}", score, comps)
