"""Parsing and canonicalization of the flat-file inputs.

Every parser takes a text stream (or a path) holding UTF-8 CSV with an exact
header, validates it row by row and returns immutable domain objects in a
canonical order, so permuting input rows never changes the result.  Each
parser has a matching ``write_*`` that emits the canonical form; parsing the
emitted text gives back an equal value.

Errors are raised as :class:`~multicite.errors.InputError` carrying a code
and the 1-based line number (the header is line 1).
"""

from __future__ import annotations

import csv
import io
import os
import re
from collections import defaultdict
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from datetime import date
from decimal import Decimal, InvalidOperation
from importlib import resources
from typing import TextIO

from .errors import InputError
from .fields import ESI_FIELDS, NSF_FIELDS, canonical_esi, canonical_nsf

DEFAULT_WINDOW_YEARS = 10.167  # ten years plus two months

SNAPSHOT_HEADER = ("date", "esi_field", "rank", "name", "papers", "citations")
TOTALS_HEADER = ("year", "nsf_field", "total_citations")
MAPPING_HEADER = ("esi_field", "nsf_field")
PROFILES_HEADER = ("name", "paper_id", "citations")
APPENDIX_HEADER = ("rank", "name", "normalized", "field", "field_rank",
                   "papers", "citations", "cpp")
PAIRS_HEADER = ("field", "T", "H")

Source = TextIO | str | os.PathLike


def normalize_name(name: str) -> str:
    """Uppercase and collapse whitespace; commas and initials stay as given."""
    return re.sub(r"\s+", " ", name.strip()).upper()


@dataclass(frozen=True, order=True)
class ResearcherRecord:
    name: str
    esi_field: str
    rank_in_field: int
    papers: int
    citations: int

    def __post_init__(self):
        if self.rank_in_field < 1:
            raise ValueError("rank_in_field must be >= 1")
        if self.papers < 0 or self.citations < 0:
            raise ValueError("papers and citations must be non-negative")

    @property
    def key(self) -> tuple[str, str]:
        return (self.name, self.esi_field)


@dataclass(frozen=True)
class FieldSnapshot:
    """Top-k list of one ESI field at one date; ``entries`` ordered by rank."""

    esi_field: str
    snapshot_date: date
    entries: tuple[ResearcherRecord, ...]
    window_years: float = DEFAULT_WINDOW_YEARS

    @property
    def k(self) -> int:
        return len(self.entries)

    def citation_vector(self) -> tuple[int, ...]:
        return tuple(r.citations for r in self.entries)


@dataclass(frozen=True)
class FieldTotalsSeries:
    nsf_field: str
    points: Mapping[int, int]


@dataclass(frozen=True)
class FieldMapping:
    pairs: Mapping[str, str]

    def __getitem__(self, esi_field: str) -> str:
        return self.pairs[esi_field]

    def __contains__(self, esi_field: object) -> bool:
        return esi_field in self.pairs

    def esi_fields_of(self, nsf_field: str) -> list[str]:
        return sorted(e for e, n in self.pairs.items() if n == nsf_field)

    @property
    def nsf_fields(self) -> list[str]:
        return sorted(set(self.pairs.values()))


@dataclass(frozen=True)
class PaperProfile:
    name: str
    # Sorted descending so equal multisets compare equal.
    paper_citations: tuple[int, ...] = field(default=())


@dataclass(frozen=True)
class AppendixRow:
    global_rank: int
    record: ResearcherRecord
    normalized: int
    cpp: Decimal


# ---------------------------------------------------------------------------
# low-level reading
# ---------------------------------------------------------------------------


def _open_text(source: Source) -> tuple[TextIO, str | None, bool]:
    if hasattr(source, "read"):
        return source, getattr(source, "name", None), False
    path = os.fspath(source)
    return open(path, encoding="utf-8", newline=""), path, True


def _rows(source: Source, header: Sequence[str]) -> Iterator[tuple[int, dict[str, str], str | None]]:
    """Yield ``(line_no, row, source_name)`` after checking the exact header."""
    stream, name, owned = _open_text(source)
    try:
        reader = csv.reader(stream)
        first = next(reader, None)
        if first is None:
            return
        if tuple(first) != tuple(header):
            raise InputError("bad_header",
                             f"expected header {','.join(header)!r}, got {','.join(first)!r}",
                             line=reader.line_num, source=name)
        for raw in reader:
            line = reader.line_num
            if not raw or all(not c.strip() for c in raw):
                continue
            if len(raw) != len(header):
                raise InputError("bad_row", f"expected {len(header)} columns, got {len(raw)}",
                                 line=line, source=name)
            yield line, dict(zip(header, (c.strip() for c in raw))), name
    finally:
        if owned:
            stream.close()


def _uint(row: dict[str, str], col: str, line: int, src: str | None) -> int:
    text = row[col]
    if not text.isdigit() or not text.isascii():
        code = "negative_value" if re.fullmatch(r"-\d+", text) else "bad_integer"
        raise InputError(code, f"expected a non-negative integer, got {text!r}",
                         line=line, column=col, source=src)
    return int(text)


def _date(row: dict[str, str], col: str, line: int, src: str | None) -> date:
    text = row[col]
    try:
        if not re.fullmatch(r"\d{4}-\d{2}-\d{2}", text):
            raise ValueError
        return date.fromisoformat(text)
    except ValueError:
        raise InputError("bad_date", f"expected YYYY-MM-DD, got {text!r}",
                         line=line, column=col, source=src) from None


def _esi(row, col, line, src, universe=ESI_FIELDS) -> str:
    name = canonical_esi(row[col])
    if name is None or name not in universe:
        raise InputError("unknown_field", f"unknown ESI field {row[col]!r}",
                         line=line, column=col, source=src)
    return name


def _nsf(row, col, line, src, universe=NSF_FIELDS) -> str:
    name = canonical_nsf(row[col])
    if name is None or name not in universe:
        raise InputError("unknown_field", f"unknown NSF field {row[col]!r}",
                         line=line, column=col, source=src)
    return name


def _name(row, col, line, src) -> str:
    name = normalize_name(row[col])
    if not name:
        raise InputError("blank_name", "name is empty", line=line, column=col, source=src)
    return name


def _writer(stream: TextIO, header: Sequence[str]):
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    return w


def _check_ranked(rows: list[tuple[int, ResearcherRecord]], what: str, src: str | None) -> None:
    """Ranks unique and contiguous from 1, citations non-increasing with rank."""
    rows.sort(key=lambda t: (t[1].rank_in_field, t[0]))
    seen_names: dict[str, int] = {}
    for i, (line, rec) in enumerate(rows):
        if i and rec.rank_in_field == rows[i - 1][1].rank_in_field:
            raise InputError("duplicate_rank",
                             f"{what}: rank {rec.rank_in_field} already given on line {rows[i - 1][0]}",
                             line=line, column="rank", source=src)
        if rec.rank_in_field != i + 1:
            raise InputError("rank_gap", f"{what}: expected rank {i + 1}, got {rec.rank_in_field}",
                             line=line, column="rank", source=src)
        if i and rec.citations > rows[i - 1][1].citations:
            raise InputError("citations_not_monotone",
                             f"{what}: rank {rec.rank_in_field} has {rec.citations} citations, "
                             f"more than rank {rec.rank_in_field - 1} ({rows[i - 1][1].citations})",
                             line=line, column="citations", source=src)
        if rec.name in seen_names:
            raise InputError("duplicate_name",
                             f"{what}: {rec.name!r} already listed on line {seen_names[rec.name]}",
                             line=line, column="name", source=src)
        seen_names[rec.name] = line


# ---------------------------------------------------------------------------
# snapshots
# ---------------------------------------------------------------------------


def parse_snapshots(source: Source, window_years: float = DEFAULT_WINDOW_YEARS,
                    esi_universe: Iterable[str] = ESI_FIELDS) -> list[FieldSnapshot]:
    """Group ``date,esi_field,rank,name,papers,citations`` rows into snapshots.

    One snapshot per (field, date), sorted by date then field.  Short lists
    are accepted here; whether they are usable is decided at aggregation.
    """
    if window_years <= 0:
        raise ValueError("window_years must be positive")
    universe = frozenset(esi_universe)
    groups: dict[tuple[str, date], list[tuple[int, ResearcherRecord]]] = defaultdict(list)
    src = None
    for line, row, src in _rows(source, SNAPSHOT_HEADER):
        d = _date(row, "date", line, src)
        f = _esi(row, "esi_field", line, src, universe)
        rank = _uint(row, "rank", line, src)
        if rank < 1:
            raise InputError("bad_integer", "rank must be >= 1", line=line, column="rank", source=src)
        rec = ResearcherRecord(_name(row, "name", line, src), f, rank,
                               _uint(row, "papers", line, src), _uint(row, "citations", line, src))
        groups[(f, d)].append((line, rec))

    out = []
    for (f, d), rows in sorted(groups.items(), key=lambda kv: (kv[0][1], kv[0][0])):
        _check_ranked(rows, f"{f} at {d.isoformat()}", src)
        out.append(FieldSnapshot(f, d, tuple(r for _, r in rows), window_years))
    return out


def write_snapshots(snapshots: Iterable[FieldSnapshot], stream: TextIO) -> None:
    w = _writer(stream, SNAPSHOT_HEADER)
    for s in sorted(snapshots, key=lambda s: (s.snapshot_date, s.esi_field)):
        for r in s.entries:
            w.writerow([s.snapshot_date.isoformat(), s.esi_field, r.rank_in_field,
                        r.name, r.papers, r.citations])


def latest_lists(snapshots: Iterable[FieldSnapshot]) -> dict[str, tuple[ResearcherRecord, ...]]:
    """Most recent list per ESI field."""
    latest: dict[str, FieldSnapshot] = {}
    for s in snapshots:
        cur = latest.get(s.esi_field)
        if cur is None or s.snapshot_date > cur.snapshot_date:
            latest[s.esi_field] = s
    return {f: s.entries for f, s in sorted(latest.items())}


# ---------------------------------------------------------------------------
# field totals
# ---------------------------------------------------------------------------


def parse_field_totals(source: Source, nsf_universe: Iterable[str] = NSF_FIELDS) -> list[FieldTotalsSeries]:
    universe = frozenset(nsf_universe)
    points: dict[str, dict[int, int]] = defaultdict(dict)
    where: dict[tuple[str, int], int] = {}
    for line, row, src in _rows(source, TOTALS_HEADER):
        text = row["year"]
        if not re.fullmatch(r"\d{4}", text):
            raise InputError("bad_year", f"expected a four-digit year, got {text!r}",
                             line=line, column="year", source=src)
        year = int(text)
        f = _nsf(row, "nsf_field", line, src, universe)
        total = _uint(row, "total_citations", line, src)
        if (f, year) in where:
            raise InputError("duplicate_year",
                             f"{f} {year} already given on line {where[(f, year)]}",
                             line=line, column="year", source=src)
        where[(f, year)] = line
        points[f][year] = total
    return [FieldTotalsSeries(f, dict(sorted(p.items()))) for f, p in sorted(points.items())]


def write_field_totals(series: Iterable[FieldTotalsSeries], stream: TextIO) -> None:
    w = _writer(stream, TOTALS_HEADER)
    for s in sorted(series, key=lambda s: s.nsf_field):
        for year, total in sorted(s.points.items()):
            w.writerow([year, s.nsf_field, total])


# ---------------------------------------------------------------------------
# mapping
# ---------------------------------------------------------------------------


def parse_mapping(source: Source, esi_universe: Iterable[str] = ESI_FIELDS,
                  nsf_universe: Iterable[str] = NSF_FIELDS) -> FieldMapping:
    """Read ``esi_field,nsf_field`` rows into a total mapping over ``esi_universe``.

    Identical duplicate rows are accepted; conflicting ones are not.
    """
    esi_u = tuple(esi_universe)
    nsf_u = frozenset(nsf_universe)
    pairs: dict[str, str] = {}
    where: dict[str, int] = {}
    line, src = 1, None
    for line, row, src in _rows(source, MAPPING_HEADER):
        e = _esi(row, "esi_field", line, src, esi_u)
        n = _nsf(row, "nsf_field", line, src, nsf_u)
        if e in pairs and pairs[e] != n:
            raise InputError("conflicting_mapping",
                             f"{e} mapped to {pairs[e]!r} on line {where[e]} and to {n!r} here",
                             line=line, column="esi_field", source=src)
        pairs.setdefault(e, n)
        where.setdefault(e, line)
    missing = [e for e in esi_u if e not in pairs]
    if missing:
        raise InputError("incomplete_mapping", f"no mapping for: {', '.join(missing)}",
                         line=line, source=src)
    return FieldMapping(dict(sorted(pairs.items())))


def write_mapping(mapping: FieldMapping, stream: TextIO) -> None:
    w = _writer(stream, MAPPING_HEADER)
    for e, n in sorted(mapping.pairs.items()):
        w.writerow([e, n])


def data_path(name: str):
    """Path-like handle to a bundled data file."""
    return resources.files("multicite") / "data" / name


def default_mapping() -> FieldMapping:
    with data_path("mapping.csv").open(encoding="utf-8", newline="") as fh:
        return parse_mapping(fh)


# ---------------------------------------------------------------------------
# paper profiles
# ---------------------------------------------------------------------------


def parse_paper_profiles(source: Source) -> list[PaperProfile]:
    counts: dict[str, list[int]] = defaultdict(list)
    where: dict[tuple[str, str], int] = {}
    for line, row, src in _rows(source, PROFILES_HEADER):
        name = _name(row, "name", line, src)
        pid = row["paper_id"]
        if (name, pid) in where:
            raise InputError("duplicate_paper",
                             f"paper {pid!r} of {name!r} already given on line {where[(name, pid)]}",
                             line=line, column="paper_id", source=src)
        where[(name, pid)] = line
        counts[name].append(_uint(row, "citations", line, src))
    return [PaperProfile(n, tuple(sorted(c, reverse=True))) for n, c in sorted(counts.items())]


def write_paper_profiles(profiles: Iterable[PaperProfile], stream: TextIO) -> None:
    w = _writer(stream, PROFILES_HEADER)
    for p in sorted(profiles, key=lambda p: p.name):
        for i, c in enumerate(p.paper_citations, 1):
            w.writerow([p.name, f"p{i}", c])


# ---------------------------------------------------------------------------
# merged-list fixture (same shape as the merged output)
# ---------------------------------------------------------------------------


def _cpp(row, line, src) -> Decimal:
    text = row["cpp"]
    if not re.fullmatch(r"\d+\.\d{2}", text):
        raise InputError("bad_decimal", f"expected a decimal with two fraction digits, got {text!r}",
                         line=line, column="cpp", source=src)
    try:
        return Decimal(text)
    except InvalidOperation:  # pragma: no cover - regex already guards
        raise InputError("bad_decimal", text, line=line, column="cpp", source=src) from None


def parse_appendix_fixture(source: Source, esi_universe: Iterable[str] = ESI_FIELDS) -> list[AppendixRow]:
    """Read a merged list in ``rank,name,normalized,field,field_rank,papers,citations,cpp`` form.

    Global ranks must be contiguous from 1; the number of rows is not fixed.
    """
    universe = frozenset(esi_universe)
    rows: list[tuple[int, AppendixRow]] = []
    keys: dict[tuple[str, str], int] = {}
    src = None
    for line, row, src in _rows(source, APPENDIX_HEADER):
        rank = _uint(row, "rank", line, src)
        papers = _uint(row, "papers", line, src)
        cpp = _cpp(row, line, src)
        if papers == 0 and cpp != 0:
            raise InputError("cpp_mismatch", f"papers is 0 but cpp is {cpp}",
                             line=line, column="cpp", source=src)
        field_rank = _uint(row, "field_rank", line, src)
        if field_rank < 1 or rank < 1:
            raise InputError("bad_integer", "ranks must be >= 1", line=line, source=src)
        rec = ResearcherRecord(_name(row, "name", line, src), _esi(row, "field", line, src, universe),
                               field_rank, papers, _uint(row, "citations", line, src))
        if rec.key in keys:
            raise InputError("duplicate_name",
                             f"{rec.name!r} in {rec.esi_field} already listed on line {keys[rec.key]}",
                             line=line, column="name", source=src)
        keys[rec.key] = line
        rows.append((line, AppendixRow(rank, rec, _uint(row, "normalized", line, src), cpp)))

    rows.sort(key=lambda t: (t[1].global_rank, t[0]))
    for i, (line, r) in enumerate(rows):
        if r.global_rank != i + 1:
            code = "duplicate_rank" if i and r.global_rank == rows[i - 1][1].global_rank else "rank_gap"
            raise InputError(code, f"expected global rank {i + 1}, got {r.global_rank}",
                             line=line, column="rank", source=src)
    return [r for _, r in rows]


def write_appendix_fixture(rows: Iterable[AppendixRow], stream: TextIO) -> None:
    w = _writer(stream, APPENDIX_HEADER)
    for r in sorted(rows, key=lambda r: r.global_rank):
        rec = r.record
        w.writerow([r.global_rank, rec.name, r.normalized, rec.esi_field, rec.rank_in_field,
                    rec.papers, rec.citations, f"{r.cpp:.2f}"])


def load_appendix() -> list[AppendixRow]:
    """The bundled 200-row published merged list."""
    with data_path("appendix.csv").open(encoding="utf-8", newline="") as fh:
        return parse_appendix_fixture(fh)


def regroup_by_field(rows: Iterable[AppendixRow]) -> dict[str, tuple[ResearcherRecord, ...]]:
    """Split a merged list back into per-field lists ordered by in-field rank."""
    groups: dict[str, list[ResearcherRecord]] = defaultdict(list)
    for r in rows:
        groups[r.record.esi_field].append(r.record)
    return {f: tuple(sorted(v, key=lambda rec: rec.rank_in_field)) for f, v in sorted(groups.items())}


# ---------------------------------------------------------------------------
# (T, H) pairs
# ---------------------------------------------------------------------------


def parse_ratio_pairs(source: Source) -> list[tuple[str, float, float]]:
    """Read ``field,T,H`` rows as ``(label, T, H)`` in file order."""
    out = []
    for line, row, src in _rows(source, PAIRS_HEADER):
        vals = []
        for col in ("T", "H"):
            try:
                v = float(row[col])
            except ValueError:
                raise InputError("bad_number", f"expected a number, got {row[col]!r}",
                                 line=line, column=col, source=src) from None
            if not v > 0:
                raise InputError("non_positive", f"{col} must be positive", line=line,
                                 column=col, source=src)
            vals.append(v)
        out.append((row["field"], vals[0], vals[1]))
    return out


def dumps(writer, value) -> str:
    """Run a ``write_*`` function into a string."""
    buf = io.StringIO()
    writer(value, buf)
    return buf.getvalue()
