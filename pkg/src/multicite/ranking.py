"""Field normalization and the merged multidisciplinary ranking.

Each researcher's citation count is divided by the divisor of their ESI
field; the exact quotient is kept alongside the rounded integer score.  The
per-field lists are truncated, pooled and sorted by

    (normalized desc, exact desc, name asc, field asc)

which makes the ranking independent of input order.
"""

from __future__ import annotations

import csv
import json
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import TextIO

from .errors import CiteError
from .indicators import AGGREGATION_FLAG, DEFAULT_AGG_THRESHOLD, cpp, flag_aggregation
from .ingest import APPENDIX_HEADER, DEFAULT_WINDOW_YEARS, FieldSnapshot, ResearcherRecord
from .rounding import round_int

DEFAULT_EPSILON = 0.005
DEFAULT_TOP_PER_FIELD = 100


@dataclass(frozen=True)
class MergedEntry:
    global_rank: int
    record: ResearcherRecord
    normalized_citations: int
    normalized_exact: Fraction
    cluster_id: int = 1
    flags: frozenset[str] = frozenset()


@dataclass(frozen=True)
class MergedList:
    entries: tuple[MergedEntry, ...]
    divisor_preset: str = ""
    top_per_field: int = DEFAULT_TOP_PER_FIELD
    epsilon: float = DEFAULT_EPSILON

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    @property
    def n_clusters(self) -> int:
        return self.entries[-1].cluster_id if self.entries else 0


def normalize_score(record: ResearcherRecord, divisors: Mapping[str, Fraction]) -> tuple[Fraction, int]:
    """``(citations / divisor, rounded)``; halves round away from zero."""
    try:
        d = Fraction(divisors[record.esi_field])
    except KeyError:
        raise CiteError("missing_divisor", f"no divisor for field {record.esi_field!r}") from None
    exact = Fraction(record.citations) / d
    return exact, round_int(exact)


def _as_lists(lists) -> list[Sequence[ResearcherRecord]]:
    if isinstance(lists, Mapping):
        return list(lists.values())
    out = []
    for item in lists:
        out.append(item.entries if isinstance(item, FieldSnapshot) else item)
    return out


def merge_rank(lists: Mapping[str, Sequence[ResearcherRecord]] | Iterable[Sequence[ResearcherRecord]],
               divisors: Mapping[str, Fraction], top_per_field: int = DEFAULT_TOP_PER_FIELD,
               epsilon: float = DEFAULT_EPSILON, preset: str = "",
               window_years: float = DEFAULT_WINDOW_YEARS,
               agg_threshold: float | None = DEFAULT_AGG_THRESHOLD) -> MergedList:
    """Pool the top ``top_per_field`` of every per-field list into one ranking.

    Clusters are assigned with :func:`cluster_groups`; entries whose paper
    rate reaches ``agg_threshold`` (pass None to skip) get the
    name-aggregation flag.
    """
    if top_per_field < 1:
        raise CiteError("bad_top_per_field", f"top_per_field must be >= 1, got {top_per_field}")
    seen: set[tuple[str, str]] = set()
    scored = []
    for lst in _as_lists(lists):
        for rec in sorted(lst, key=lambda r: r.rank_in_field)[:top_per_field]:
            if rec.key in seen:
                raise CiteError("duplicate_name", f"{rec.name!r} listed twice in {rec.esi_field}")
            seen.add(rec.key)
            exact, rounded = normalize_score(rec, divisors)
            scored.append((rec, exact, rounded))
    scored.sort(key=lambda t: (-t[2], -t[1], t[0].name, t[0].esi_field))
    entries = []
    for i, (rec, exact, rounded) in enumerate(scored, 1):
        flags = frozenset()
        if agg_threshold is not None and flag_aggregation(rec.papers, window_years, agg_threshold)[0]:
            flags = frozenset({AGGREGATION_FLAG})
        entries.append(MergedEntry(i, rec, rounded, exact, 1, flags))
    merged = MergedList(tuple(entries), preset, top_per_field, epsilon)
    return cluster_groups(merged, epsilon)


def cluster_groups(merged: MergedList, epsilon: float = DEFAULT_EPSILON) -> MergedList:
    """Split the ranking into runs of approximately equal impact.

    A new cluster starts when the relative drop in exact score from the
    previous entry, ``(prev - cur) / max(prev, 1)``, exceeds ``epsilon``.
    """
    if epsilon < 0:
        raise CiteError("bad_epsilon", f"epsilon must be >= 0, got {epsilon}")
    eps = Fraction(str(epsilon)) if isinstance(epsilon, float) else Fraction(epsilon)
    out = []
    cid = 0
    prev = None
    for e in merged.entries:
        if prev is None or (prev - e.normalized_exact) / max(prev, 1) > eps:
            cid += 1
        out.append(replace(e, cluster_id=cid))
        prev = e.normalized_exact
    return replace(merged, entries=tuple(out), epsilon=epsilon)


def leader_coverage(merged: MergedList | Iterable[MergedEntry], n: int) -> frozenset[str]:
    """ESI fields whose in-field leader sits within the global top ``n``."""
    return frozenset(e.record.esi_field for e in merged
                     if e.record.rank_in_field == 1 and e.global_rank <= n)


def coverage_summary(merged: MergedList, ns: Sequence[int] = (10, 50, 100)) -> str:
    counts = " / ".join(str(len(leader_coverage(merged, n))) for n in ns)
    tops = " / ".join(str(n) for n in ns)
    return f"{counts} field leaders in top {tops}\nclusters: {merged.n_clusters}\n"


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def merged_rows(merged: MergedList) -> list[dict[str, str]]:
    rows = []
    for e in merged:
        r = e.record
        rows.append({
            "rank": str(e.global_rank), "name": r.name, "normalized": str(e.normalized_citations),
            "field": r.esi_field, "field_rank": str(r.rank_in_field), "papers": str(r.papers),
            "citations": str(r.citations),
            "cpp": f"{cpp(r.citations, r.papers):.2f}" if r.papers else "0.00",
        })
    return rows


def write_merged_csv(merged: MergedList, stream: TextIO) -> None:
    w = csv.DictWriter(stream, APPENDIX_HEADER, lineterminator="\n")
    w.writeheader()
    w.writerows(merged_rows(merged))


def merged_to_json(merged: MergedList) -> dict:
    entries = []
    for row, e in zip(merged_rows(merged), merged):
        entry = {k: (int(v) if k in ("rank", "normalized", "field_rank", "papers", "citations") else v)
                 for k, v in row.items()}
        entry["normalized_exact"] = {"num": e.normalized_exact.numerator,
                                     "den": e.normalized_exact.denominator}
        entry["cluster_id"] = e.cluster_id
        entry["flags"] = sorted(e.flags)
        entries.append(entry)
    return {"divisor_preset": merged.divisor_preset, "top_per_field": merged.top_per_field,
            "epsilon": merged.epsilon, "entries": entries}


def write_merged_json(merged: MergedList, stream: TextIO) -> None:
    json.dump(merged_to_json(merged), stream, indent=2, sort_keys=True)
    stream.write("\n")
