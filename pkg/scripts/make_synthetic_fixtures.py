"""Regenerate the bundled synthetic snapshot and field-total fixtures.

The snapshots are built backwards from the published broad-field H column:
each broad field gets a target mean top-ten level of ``H * BASE_LEVEL``,
that level is split across the ESI fields mapped to it, and each ESI field
gets 24 monthly top-ten lists with a decaying rank profile, month-to-month
drift and noise.  The totals follow the published T column with a few
percent of year-to-year wobble.

Run from the repository root:

    python scripts/make_synthetic_fixtures.py
"""

from __future__ import annotations

import csv
from datetime import date
from fractions import Fraction
from pathlib import Path

import numpy as np

from multicite.fields import DEFAULT_MAPPING, PUBLISHED_T, PUBLISHED_H

OUT = Path(__file__).resolve().parents[1] / "src" / "multicite" / "data"
SEED = 20050701
BASE_LEVEL = 1100
K = 10
YEARS = (1992, 1994, 1996, 1997, 1999, 2001)
MATH_TOTALS = (21000, 22400, 23100, 24000, 25300, 26800)


def months(n=24, start=(2003, 7)):
    y, m = start
    for _ in range(n):
        yield date(y, m, 1)
        m += 1
        if m > 12:
            y, m = y + 1, 1


def field_lists(rng, level, dates):
    """Top-K citation vectors for one ESI field, one per date."""
    decay = rng.uniform(0.82, 0.93)
    profile = decay ** np.arange(K)
    profile /= profile.mean()
    out = []
    for t, _ in enumerate(dates):
        drift = 1 + 0.004 * (t - len(dates) / 2)
        v = level * drift * profile * rng.normal(1.0, 0.015, K)
        v = np.maximum(np.round(np.sort(v)[::-1]), 1).astype(int)
        out.append([int(x) for x in v])
    return out


def build_snapshots(rng):
    dates = list(months())
    rows = []
    for nsf, h in sorted(PUBLISHED_H.items()):
        esi_fields = sorted(e for e, n in DEFAULT_MAPPING.items() if n == nsf)
        target = h * BASE_LEVEL * rng.uniform(0.985, 1.015)
        weights = rng.dirichlet(np.full(len(esi_fields), 4.0))
        for esi, w in zip(esi_fields, weights):
            tag = "".join(c for c in esi.upper() if c.isalpha())[:6]
            papers = rng.integers(20, 400, K)
            for d, vec in zip(dates, field_lists(rng, target * w, dates)):
                for rank, cites in enumerate(vec, 1):
                    name = f"{tag}{rank:02d}, X"
                    rows.append((d.isoformat(), esi, rank, name, int(papers[rank - 1]), cites))
    rows.sort()
    return rows


def build_totals(rng):
    rows = []
    for nsf, t in sorted(PUBLISHED_T.items()):
        wobble = rng.uniform(0.96, 1.04, len(YEARS))
        wobble /= wobble.mean()
        for year, base, factor in zip(YEARS, MATH_TOTALS, wobble):
            if nsf == "Mathematics":
                factor = 1.0
            rows.append((year, nsf, int(round(base * t * factor))))
    return rows


def check(snap_rows, total_rows):
    """Plain recomputation: pooled H level per broad field, T mean per field."""
    sums = {}
    for d, esi, rank, _, _, c in snap_rows:
        key = (DEFAULT_MAPPING[esi], d, rank)
        sums[key] = sums.get(key, 0) + c
    level = {}
    for (nsf, _, _), v in sums.items():
        level.setdefault(nsf, []).append(v)
    level = {k: Fraction(sum(v), len(v)) for k, v in level.items()}
    for nsf, h in PUBLISHED_H.items():
        ratio = level[nsf] / level["Mathematics"]
        assert abs(ratio - h) < Fraction(2, 5), (nsf, float(ratio))
    math = {y: c for y, f, c in total_rows if f == "Mathematics"}
    for nsf, t in PUBLISHED_T.items():
        r = [Fraction(c, math[y]) for y, f, c in total_rows if f == nsf]
        assert abs(sum(r) / len(r) - t) < Fraction(2, 5), nsf


def main():
    rng = np.random.default_rng(SEED)
    snaps = build_snapshots(rng)
    totals = build_totals(rng)
    check(snaps, totals)
    with open(OUT / "snapshots_synthetic.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date", "esi_field", "rank", "name", "papers", "citations"])
        w.writerows(snaps)
    with open(OUT / "totals_synthetic.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["year", "nsf_field", "total_citations"])
        w.writerows(totals)
    print(f"{len(snaps)} snapshot rows, {len(totals)} total rows -> {OUT}")


if __name__ == "__main__":
    main()
