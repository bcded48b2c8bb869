"""Cross-field citation ratios and the per-field divisor table.

Two ratio tables are produced, both relative to mathematics:

* T ratios compare whole-field citation totals year by year;
* H ratios compare the mean citation level of each field's top-k
  researchers, after summing the rank-wise vectors of all fine fields that
  fold into one broad field.

The divisor table turns either (or a published preset) into one exact
rational per ESI field.  Ratios are computed with :class:`~fractions.Fraction`
and only converted to ``float`` on the way out, so rescaling the inputs
leaves them bit-identical.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from datetime import date
from fractions import Fraction
from typing import TextIO

from .errors import CiteError, InputError
from .fields import (APPENDIX_ESI_OVERRIDES, APPENDIX_GROUP_DIVISORS, BASE_FIELD,
                     PUBLISHED_T, PUBLISHED_DIVISORS, canonical_esi)
from .ingest import FieldMapping, FieldSnapshot, FieldTotalsSeries, _rows

PRESETS = ("table2", "two_thirds", "appendix", "data")

DIVISOR_HEADER = ("esi_field", "divisor_num", "divisor_den")
RATIO_REPORT_HEADER = ("nsf_field", "t_ratio", "h_level", "h_ratio")


@dataclass(frozen=True)
class AggregatedVector:
    nsf_field: str
    snapshot_date: date
    values: tuple[int, ...]


@dataclass
class RatioTable:
    base_field: str = BASE_FIELD
    t_ratios: dict[str, float] = field(default_factory=dict)
    h_levels: dict[str, float] = field(default_factory=dict)
    h_ratios: dict[str, float] = field(default_factory=dict)
    divisors: dict[str, Fraction] = field(default_factory=dict)


def compute_t_ratios(series: Iterable[FieldTotalsSeries], base: str = BASE_FIELD) -> dict[str, float]:
    """Mean over shared years of ``total(field, y) / total(base, y)``."""
    by_field = {s.nsf_field: s.points for s in series}
    if base not in by_field:
        raise CiteError("missing_base", f"no totals for base field {base!r}")
    base_pts = by_field[base]
    out: dict[str, float] = {}
    for name in sorted(by_field):
        if name == base:
            out[name] = 1.0
            continue
        years = sorted(set(by_field[name]) & set(base_pts))
        if not years:
            raise CiteError("no_shared_years", f"{name} shares no year with {base}")
        ratios = []
        for y in years:
            if base_pts[y] == 0:
                raise CiteError("zero_base", f"{base} total is zero in {y}")
            ratios.append(Fraction(by_field[name][y], base_pts[y]))
        out[name] = float(sum(ratios) / len(ratios))
    return out


def aggregate_top_vectors(snapshots: Iterable[FieldSnapshot], mapping: FieldMapping,
                          k: int | None = None) -> list[AggregatedVector]:
    """Sum the rank-wise citation vectors of ESI fields sharing an NSF field.

    Every snapshot must have exactly ``k`` entries (inferred from the first
    snapshot when not given) and the same window length.  Output is sorted by
    (nsf_field, date); a broad field with no snapshot at some date is simply
    absent for that date.
    """
    snaps = sorted(snapshots, key=lambda s: (s.snapshot_date, s.esi_field))
    if not snaps:
        return []
    if k is None:
        k = snaps[0].k
    windows = {s.window_years for s in snaps}
    if len(windows) > 1:
        raise CiteError("mixed_window", f"snapshots mix window lengths {sorted(windows)}")
    sums: dict[tuple[str, date], list[int]] = {}
    seen: set[tuple[str, date]] = set()
    for s in snaps:
        if s.k != k:
            raise CiteError("mixed_k", f"{s.esi_field} at {s.snapshot_date} has {s.k} entries, expected {k}")
        if (s.esi_field, s.snapshot_date) in seen:
            raise CiteError("duplicate_snapshot", f"{s.esi_field} appears twice at {s.snapshot_date}")
        seen.add((s.esi_field, s.snapshot_date))
        if s.esi_field not in mapping:
            raise CiteError("unmapped_field", f"{s.esi_field} is not in the field mapping")
        key = (mapping[s.esi_field], s.snapshot_date)
        acc = sums.setdefault(key, [0] * k)
        for i, c in enumerate(s.citation_vector()):
            acc[i] += c
    return [AggregatedVector(n, d, tuple(v)) for (n, d), v in sorted(sums.items())]


def h_levels_exact(aggregated: Iterable[AggregatedVector]) -> dict[str, Fraction]:
    """Pooled mean over every element of every vector of each broad field."""
    total: dict[str, int] = defaultdict(int)
    count: dict[str, int] = defaultdict(int)
    for v in aggregated:
        total[v.nsf_field] += sum(v.values)
        count[v.nsf_field] += len(v.values)
    return {f: Fraction(total[f], count[f]) for f in sorted(total) if count[f]}


def compute_h_ratios(aggregated: Iterable[AggregatedVector],
                     base: str = BASE_FIELD) -> tuple[dict[str, float], dict[str, float]]:
    """Return ``(h_levels, h_ratios)``; the base field's ratio is exactly 1."""
    levels = h_levels_exact(aggregated)
    if base not in levels:
        raise CiteError("missing_base", f"no aggregated vectors for base field {base!r}")
    if levels[base] == 0:
        raise CiteError("zero_base", f"{base} top-researcher level is zero")
    ratios = {f: 1.0 if f == base else float(lv / levels[base]) for f, lv in levels.items()}
    return {f: float(lv) for f, lv in levels.items()}, ratios


def _as_fraction(x, max_denominator: int) -> Fraction:
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    return Fraction(x).limit_denominator(max_denominator)


def build_divisor_table(preset: str, mapping: FieldMapping, h_ratios: Mapping[str, float] | None = None,
                        t_ratios: Mapping[str, float] | None = None,
                        max_denominator: int = 3) -> dict[str, Fraction]:
    """Exact divisor for every ESI field of ``mapping``.

    ``table2`` takes the printed per-field integers, ``two_thirds`` uses
    ``2*T/3`` with T of the mapped broad field (published T values unless
    ``t_ratios`` is given), ``appendix`` the divisors that reproduce the
    published merged list, and ``data`` the supplied ``h_ratios`` snapped to
    the nearest fraction with denominator at most ``max_denominator``.
    """
    if preset not in PRESETS:
        raise CiteError("unknown_preset", f"unknown divisor preset {preset!r}; choose from {', '.join(PRESETS)}")
    if preset == "data" and h_ratios is None:
        raise CiteError("missing_h_ratios", "the 'data' preset needs computed H ratios")
    t_src = PUBLISHED_T if t_ratios is None else t_ratios
    out: dict[str, Fraction] = {}
    for esi, nsf in sorted(mapping.pairs.items()):
        if preset == "table2":
            if esi not in PUBLISHED_DIVISORS:
                raise CiteError("missing_divisor", f"no printed divisor for {esi}")
            d = Fraction(PUBLISHED_DIVISORS[esi])
        elif preset == "two_thirds":
            if nsf not in t_src:
                raise CiteError("missing_divisor", f"no T ratio for {nsf}")
            d = 2 * _as_fraction(t_src[nsf], 1000) / 3
        elif preset == "appendix":
            if esi in APPENDIX_ESI_OVERRIDES:
                d = APPENDIX_ESI_OVERRIDES[esi]
            elif nsf in APPENDIX_GROUP_DIVISORS:
                d = APPENDIX_GROUP_DIVISORS[nsf]
            else:
                raise CiteError("missing_divisor", f"no appendix divisor for {nsf}")
        else:
            if nsf not in h_ratios:
                raise CiteError("missing_divisor", f"no computed H ratio for {nsf}")
            d = _as_fraction(h_ratios[nsf], max_denominator)
        if d <= 0:
            raise CiteError("non_positive_divisor", f"divisor for {esi} is {d}")
        out[esi] = d
    return out


def compute_ratio_table(mapping: FieldMapping, totals: Sequence[FieldTotalsSeries] = (),
                        snapshots: Sequence[FieldSnapshot] = (), preset: str = "appendix",
                        base: str = BASE_FIELD, max_denominator: int = 3) -> RatioTable:
    """Run whichever ratio computations the inputs allow and build divisors."""
    table = RatioTable(base_field=base)
    if totals:
        table.t_ratios = compute_t_ratios(totals, base)
    if snapshots:
        table.h_levels, table.h_ratios = compute_h_ratios(aggregate_top_vectors(snapshots, mapping), base)
    table.divisors = build_divisor_table(preset, mapping, h_ratios=table.h_ratios or None,
                                         max_denominator=max_denominator)
    return table


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def read_divisors(source, mapping: FieldMapping | None = None) -> dict[str, Fraction]:
    """Read an ``esi_field,divisor_num,divisor_den`` table."""
    out: dict[str, Fraction] = {}
    for line, row, src in _rows(source, DIVISOR_HEADER):
        esi = canonical_esi(row["esi_field"])
        if esi is None:
            raise InputError("unknown_field", f"unknown ESI field {row['esi_field']!r}",
                             line=line, column="esi_field", source=src)
        try:
            num, den = int(row["divisor_num"]), int(row["divisor_den"])
        except ValueError:
            raise InputError("bad_integer", "divisor parts must be integers", line=line, source=src) from None
        if num <= 0 or den <= 0:
            raise InputError("non_positive_divisor", "divisor must be positive", line=line, source=src)
        if esi in out and out[esi] != Fraction(num, den):
            raise InputError("conflicting_divisor", f"second divisor for {esi}", line=line, source=src)
        out[esi] = Fraction(num, den)
    if mapping is not None:
        missing = [e for e in mapping.pairs if e not in out]
        if missing:
            raise CiteError("missing_divisor", f"no divisor for: {', '.join(sorted(missing))}")
    return dict(sorted(out.items()))


def write_divisors(divisors: Mapping[str, Fraction], stream: TextIO) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(DIVISOR_HEADER)
    for esi, d in sorted(divisors.items()):
        w.writerow([esi, d.numerator, d.denominator])


def ratio_report_rows(table: RatioTable) -> list[dict[str, str]]:
    fields = sorted(set(table.t_ratios) | set(table.h_ratios))

    def fmt(m, f):
        return f"{m[f]:.4f}" if f in m else ""

    return [{"nsf_field": f, "t_ratio": fmt(table.t_ratios, f), "h_level": fmt(table.h_levels, f),
             "h_ratio": fmt(table.h_ratios, f)} for f in fields]


def write_ratio_report(table: RatioTable, stream: TextIO) -> None:
    w = csv.DictWriter(stream, RATIO_REPORT_HEADER, lineterminator="\n")
    w.writeheader()
    w.writerows(ratio_report_rows(table))
