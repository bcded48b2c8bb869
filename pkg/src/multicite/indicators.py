"""Per-researcher auxiliary indicators.

CPP (citations per paper), the h-index, CPMP (citations per "meaningful"
paper) and a papers-per-year check for names that probably merge several
people.
"""

from __future__ import annotations

import csv
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import TextIO

from .errors import CiteError
from .ingest import DEFAULT_WINDOW_YEARS, PaperProfile, ResearcherRecord
from .rounding import to_decimal

DEFAULT_AGG_THRESHOLD = 100.0
INDICATOR_HEADER = ("name", "esi_field", "cpp", "h_index", "cpmp", "papers_per_year",
                    "aggregation_flagged")
AGGREGATION_FLAG = "possible_name_aggregation"


@dataclass(frozen=True)
class IndicatorSet:
    cpp: Decimal | None
    h_index: int | None
    cpmp: float | None
    aggregation_flagged: bool
    papers_per_year: float


def cpp(citations: int, papers: int) -> Decimal:
    """Citations per paper, two decimals, halves rounded away from zero."""
    if papers <= 0:
        raise CiteError("zero_papers", "citations per paper needs at least one paper")
    return to_decimal(Fraction(citations, papers), 2)


def h_index(profile: PaperProfile | Iterable[int]) -> int:
    counts = profile.paper_citations if isinstance(profile, PaperProfile) else profile
    h = 0
    for i, c in enumerate(sorted(counts, reverse=True), 1):
        if c < i:
            break
        h = i
    return h


def cpmp(profile: PaperProfile | Iterable[int], mode: str = "h-index",
         threshold: float | None = None) -> float | None:
    """Mean citations over the "meaningful" papers, or None if there are none.

    ``mode="fixed"`` keeps papers with at least ``threshold`` citations;
    ``mode="h-index"`` keeps the h most-cited papers.
    """
    counts = sorted(profile.paper_citations if isinstance(profile, PaperProfile) else profile,
                    reverse=True)
    if mode == "fixed":
        if threshold is None or threshold < 0:
            raise CiteError("bad_threshold", f"fixed mode needs a threshold >= 0, got {threshold}")
        chosen = [c for c in counts if c >= threshold]
    elif mode in ("h-index", "h"):
        chosen = counts[:h_index(counts)]
    else:
        raise CiteError("unknown_cpmp_mode", f"unknown CPMP mode {mode!r}")
    if not chosen:
        return None
    return float(Fraction(sum(chosen), len(chosen)))


def flag_aggregation(papers: int, window_years: float = DEFAULT_WINDOW_YEARS,
                     threshold: float = DEFAULT_AGG_THRESHOLD) -> tuple[bool, float]:
    """``(flagged, papers_per_year)``; flagged when the rate reaches ``threshold``."""
    if not window_years > 0:
        raise CiteError("bad_window", f"window must be positive, got {window_years}")
    rate = papers / window_years
    return rate >= threshold, rate


def compute_indicators(record: ResearcherRecord, profile: PaperProfile | None = None,
                       cpmp_mode: str = "h-index", cpmp_threshold: float | None = None,
                       window_years: float = DEFAULT_WINDOW_YEARS,
                       agg_threshold: float = DEFAULT_AGG_THRESHOLD) -> IndicatorSet:
    flagged, rate = flag_aggregation(record.papers, window_years, agg_threshold)
    return IndicatorSet(
        cpp=cpp(record.citations, record.papers) if record.papers else None,
        h_index=h_index(profile) if profile is not None else None,
        cpmp=cpmp(profile, cpmp_mode, cpmp_threshold) if profile is not None else None,
        aggregation_flagged=flagged,
        papers_per_year=rate,
    )


def indicator_rows(records: Sequence[ResearcherRecord], profiles: Mapping[str, PaperProfile] | None = None,
                   **kwargs) -> list[dict[str, str]]:
    """One report row per record, profiles joined on the normalized name."""
    profiles = profiles or {}
    rows = []
    for rec in sorted(records, key=lambda r: (r.esi_field, r.rank_in_field, r.name)):
        ind = compute_indicators(rec, profiles.get(rec.name), **kwargs)
        rows.append({
            "name": rec.name,
            "esi_field": rec.esi_field,
            "cpp": "" if ind.cpp is None else f"{ind.cpp:.2f}",
            "h_index": "" if ind.h_index is None else str(ind.h_index),
            "cpmp": "" if ind.cpmp is None else f"{ind.cpmp:.2f}",
            "papers_per_year": f"{ind.papers_per_year:.2f}",
            "aggregation_flagged": "true" if ind.aggregation_flagged else "false",
        })
    return rows


def write_indicator_report(rows: Iterable[Mapping[str, str]], stream: TextIO) -> None:
    w = csv.DictWriter(stream, INDICATOR_HEADER, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
