"""Similarity-banded weighted word counts, as used for translator rate grids.

All arithmetic is exact: bounds and multipliers are :class:`~decimal.Decimal`
and similarities are compared as fractions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation as DecimalError
from fractions import Fraction
from importlib import resources
from typing import Iterable

from .exceptions import InvalidTable


@dataclass(frozen=True)
class RateBand:
    lower_bound: Decimal
    multiplier: Decimal
    label: str = ""


@dataclass(frozen=True)
class RateBandTable:
    bands: tuple[RateBand, ...]
    base_rate: Decimal = Decimal("1")

    def __post_init__(self):
        if not self.bands:
            raise InvalidTable("rate table has no bands")
        prev = None
        for band in self.bands:
            if not Decimal(0) <= band.lower_bound <= Decimal(1):
                raise InvalidTable(f"band bound {band.lower_bound} outside [0, 1]")
            if not Decimal(0) <= band.multiplier <= Decimal(1):
                raise InvalidTable(f"band multiplier {band.multiplier} outside [0, 1]")
            if prev is not None and band.lower_bound >= prev:
                raise InvalidTable("band bounds must be strictly decreasing")
            prev = band.lower_bound
        if self.bands[-1].lower_bound != 0:
            raise InvalidTable("the last band must start at 0 so the table covers [0, 1]")

    @classmethod
    def from_dict(cls, data: dict) -> "RateBandTable":
        try:
            bands = tuple(
                RateBand(
                    Decimal(str(b["min_similarity"])),
                    Decimal(str(b["multiplier"])),
                    str(b.get("label", "")),
                )
                for b in data["bands"]
            )
            base = Decimal(str(data.get("base_rate", "1")))
        except (KeyError, TypeError, DecimalError) as exc:
            raise InvalidTable(f"malformed rate table: {exc!r}") from None
        return cls(bands, base)

    @classmethod
    def from_json(cls, text: str) -> "RateBandTable":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidTable(f"rate table is not valid JSON: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {
            "base_rate": str(self.base_rate),
            "bands": [
                {"label": b.label, "min_similarity": str(b.lower_bound), "multiplier": str(b.multiplier)}
                for b in self.bands
            ],
        }


def default_table() -> RateBandTable:
    """The bundled illustrative table (a conventional CAT-style grid, not a standard)."""
    text = resources.files("editlens").joinpath("data/default_bands.json").read_text("utf-8")
    return RateBandTable.from_json(text)


def band_for(similarity, table: RateBandTable) -> tuple[RateBand, Decimal]:
    sim = Fraction(similarity)
    if not 0 <= sim <= 1:
        raise ValueError(f"similarity {similarity} outside [0, 1]")
    for band in table.bands:
        if sim >= Fraction(band.lower_bound):
            return band, band.multiplier
    raise AssertionError("validated table must cover [0, 1]")


def weighted_wordcount(segments: Iterable[tuple[int, object]], table: RateBandTable) -> Decimal:
    """Sum of ``token_count * multiplier`` over ``(token_count, similarity)`` pairs."""
    total = Decimal(0)
    for count, sim in segments:
        if count < 0:
            raise ValueError("token counts must be non-negative")
        total += Decimal(count) * band_for(sim, table)[1]
    return total
