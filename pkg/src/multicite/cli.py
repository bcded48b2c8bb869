"""Command-line driver: ``multicite {ratios,hratios,fit,rank,indicators,report}``.

Every command reads flat files, computes everything in memory and only then
writes its outputs (temporary name, then rename), so a failed run leaves
nothing behind.  Exit codes: 0 success, 1 validation or domain error,
2 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import tempfile
from collections.abc import Callable
from pathlib import Path

from . import indicators, ingest, lawfit, ranking, ratios
from .errors import CiteError
from .fields import BASE_FIELD

FORMATS = ("csv", "json", "markdown")


class MissingInputs(CiteError):
    def __init__(self, command: str, names: list[str]):
        super().__init__("missing_inputs", f"{command}: missing required input(s): {', '.join(names)}")


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------


def _csv_text(writer: Callable, value, *args) -> str:
    buf = io.StringIO()
    writer(value, buf, *args)
    return buf.getvalue()


def _markdown(text: str) -> str:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return ""
    width = max(len(r) for r in rows)
    rows = [r + [""] * (width - len(r)) for r in rows]
    lines = ["| " + " | ".join(rows[0]) + " |", "|" + "---|" * width]
    lines += ["| " + " | ".join(r) + " |" for r in rows[1:]]
    return "\n".join(lines) + "\n"


def _json_rows(text: str) -> list[dict]:
    return [dict(r) for r in csv.DictReader(io.StringIO(text))]


def _render(stem: str, csv_text: str, fmt: str, json_obj=None) -> dict[str, str]:
    if fmt == "csv":
        return {stem + ".csv": csv_text}
    if fmt == "markdown":
        return {stem + ".md": _markdown(csv_text)}
    obj = json_obj if json_obj is not None else _json_rows(csv_text)
    return {stem + ".json": json.dumps(obj, indent=2, sort_keys=True) + "\n"}


def _divisors_json(divisors):
    return {e: {"num": d.numerator, "den": d.denominator} for e, d in sorted(divisors.items())}


# ---------------------------------------------------------------------------
# inputs
# ---------------------------------------------------------------------------


def _open(path: str):
    try:
        return open(path, encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _load(path: str, parser, *args, **kwargs):
    with _open(path) as fh:
        return parser(fh, *args, **kwargs)


class Inputs:
    """Lazily parsed inputs named on the command line."""

    def __init__(self, args):
        self.args = args
        self._cache = {}

    def _get(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def has(self, name: str) -> bool:
        return getattr(self.args, name, None) is not None

    @property
    def mapping(self):
        if self.has("mapping"):
            return self._get("mapping", lambda: _load(self.args.mapping, ingest.parse_mapping))
        return self._get("mapping", ingest.default_mapping)

    @property
    def snapshots(self):
        return self._get("snapshots", lambda: _load(self.args.snapshots, ingest.parse_snapshots,
                                                     window_years=self.args.window_years))

    @property
    def totals(self):
        return self._get("totals", lambda: _load(self.args.totals, ingest.parse_field_totals))

    @property
    def profiles(self):
        return self._get("profiles", lambda: {p.name: p for p in _load(self.args.profiles,
                                                                       ingest.parse_paper_profiles)})

    @property
    def fixture(self):
        return self._get("fixture", lambda: _load(self.args.fixture, ingest.parse_appendix_fixture))

    @property
    def pairs(self):
        return self._get("pairs", lambda: _load(self.args.pairs, ingest.parse_ratio_pairs))

    def field_lists(self):
        if self.has("fixture"):
            return ingest.regroup_by_field(self.fixture)
        if self.has("snapshots"):
            return ingest.latest_lists(self.snapshots)
        return None

    def records(self):
        lists = self.field_lists()
        return None if lists is None else [r for lst in lists.values() for r in lst]


# ---------------------------------------------------------------------------
# commands; each returns {filename: text}
# ---------------------------------------------------------------------------


def _ratio_table(inp: Inputs, preset: str) -> ratios.RatioTable:
    return ratios.compute_ratio_table(
        inp.mapping,
        totals=inp.totals if inp.has("totals") else (),
        snapshots=inp.snapshots if inp.has("snapshots") else (),
        preset=preset, base=BASE_FIELD)


def cmd_ratios(inp: Inputs) -> dict[str, str]:
    a = inp.args
    if not (inp.has("totals") or inp.has("snapshots")):
        raise MissingInputs("ratios", ["--totals and/or --snapshots"])
    preset = a.preset or ("data" if inp.has("snapshots") else "table2")
    table = _ratio_table(inp, preset)
    out = _render("ratios", _csv_text(ratios.write_ratio_report, table), a.format)
    out.update(_render("divisors", _csv_text(ratios.write_divisors, table.divisors), a.format,
                       _divisors_json(table.divisors)))
    return out


def cmd_hratios(inp: Inputs) -> dict[str, str]:
    if not inp.has("snapshots"):
        raise MissingInputs("hratios", ["--snapshots"])
    table = ratios.RatioTable()
    agg = ratios.aggregate_top_vectors(inp.snapshots, inp.mapping)
    table.h_levels, table.h_ratios = ratios.compute_h_ratios(agg, BASE_FIELD)
    return _render("hratios", _csv_text(ratios.write_ratio_report, table), inp.args.format)


def _fit_pairs(inp: Inputs):
    if inp.has("pairs"):
        return inp.pairs
    if inp.has("totals") and inp.has("snapshots"):
        t = ratios.compute_t_ratios(inp.totals, BASE_FIELD)
        agg = ratios.aggregate_top_vectors(inp.snapshots, inp.mapping)
        _, h = ratios.compute_h_ratios(agg, BASE_FIELD)
        return [(f, t[f], h[f]) for f in sorted(set(t) & set(h))]
    return None


def cmd_fit(inp: Inputs) -> dict[str, str]:
    pairs = _fit_pairs(inp)
    if pairs is None:
        raise MissingInputs("fit", ["--pairs, or --totals with --snapshots"])
    fit = lawfit.fit_alpha([(t, h) for _, t, h in pairs], labels=[f for f, _, _ in pairs])
    text = _csv_text(lawfit.write_fit_report, fit)
    body = text.rsplit("alpha,", 1)[0]
    out = _render("fit", text, inp.args.format,
                  {"rows": _json_rows(body), "alpha": round(fit.alpha, 2), "alpha_exact": fit.alpha})
    out.update(_render("fit_plot", _csv_text(lawfit.write_plot_data, fit), inp.args.format))
    return out


def _divisors(inp: Inputs, preset: str):
    if inp.has("divisors"):
        return _load(inp.args.divisors, ratios.read_divisors, inp.mapping), "file"
    if preset == "data":
        if not inp.has("snapshots"):
            raise MissingInputs("rank", ["--snapshots (needed by the 'data' preset)"])
        return _ratio_table(inp, preset).divisors, preset
    return ratios.build_divisor_table(preset, inp.mapping), preset


def _merged(inp: Inputs) -> ranking.MergedList:
    a = inp.args
    lists = inp.field_lists()
    if lists is None:
        raise MissingInputs("rank", ["--snapshots or --fixture"])
    divisors, label = _divisors(inp, a.preset or "appendix")
    return ranking.merge_rank(lists, divisors, top_per_field=a.top_per_field, epsilon=a.epsilon,
                              preset=label, window_years=a.window_years,
                              agg_threshold=a.agg_threshold)


def cmd_rank(inp: Inputs) -> dict[str, str]:
    merged = _merged(inp)
    out = _render("merged", _csv_text(ranking.write_merged_csv, merged), inp.args.format,
                  ranking.merged_to_json(merged))
    out["rank_summary.txt"] = ranking.coverage_summary(merged)
    return out


def cmd_indicators(inp: Inputs) -> dict[str, str]:
    a = inp.args
    records = inp.records()
    if records is None:
        raise MissingInputs("indicators", ["--snapshots or --fixture"])
    rows = indicators.indicator_rows(
        records, inp.profiles if inp.has("profiles") else None, cpmp_mode=a.cpmp_mode,
        cpmp_threshold=a.cpmp_threshold, window_years=a.window_years, agg_threshold=a.agg_threshold)
    return _render("indicators", _csv_text(indicators.write_indicator_report, rows), a.format)


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def cmd_report(inp: Inputs) -> dict[str, str]:
    a = inp.args
    given = [n for n in ("snapshots", "totals", "mapping", "divisors", "profiles", "fixture", "pairs")
             if inp.has(n)]
    if not any(n in given for n in ("snapshots", "totals", "fixture", "pairs")):
        raise MissingInputs("report", ["--snapshots", "--totals", "--fixture", "--pairs"])
    out: dict[str, str] = {}
    ran = []
    if inp.has("totals") or inp.has("snapshots"):
        out.update(cmd_ratios(inp))
        ran.append("ratios")
    if inp.has("snapshots"):
        out.update(cmd_hratios(inp))
        ran.append("hratios")
    if _fit_pairs(inp) is not None:
        out.update(cmd_fit(inp))
        ran.append("fit")
    if inp.field_lists() is not None:
        out.update(cmd_rank(inp))
        out.update(cmd_indicators(inp))
        ran += ["rank", "indicators"]

    inputs = {}
    for n in given:
        path = getattr(a, n)
        with _open(path) as fh:
            inputs[n] = {"path": path, "sha256": _sha256(fh.read().encode("utf-8"))}
    manifest = {
        "commands": ran,
        "inputs": inputs,
        "parameters": {
            "preset": a.preset, "top_per_field": a.top_per_field, "epsilon": a.epsilon,
            "cpmp_mode": a.cpmp_mode, "cpmp_threshold": a.cpmp_threshold,
            "agg_threshold": a.agg_threshold, "window_years": a.window_years, "format": a.format,
        },
        "outputs": {name: _sha256(text.encode("utf-8")) for name, text in sorted(out.items())},
    }
    out["manifest.json"] = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    return out


COMMANDS = {
    "ratios": cmd_ratios,
    "hratios": cmd_hratios,
    "fit": cmd_fit,
    "rank": cmd_rank,
    "indicators": cmd_indicators,
    "report": cmd_report,
}


# ---------------------------------------------------------------------------
# writing and entry point
# ---------------------------------------------------------------------------


def write_outputs(outputs: dict[str, str], out_dir: str) -> list[Path]:
    """Write each file to a temporary name first, then rename into place."""
    target = Path(out_dir)
    target.mkdir(parents=True, exist_ok=True)
    staged = []
    try:
        for name, text in sorted(outputs.items()):
            fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=target)
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
            staged.append((tmp, target / name))
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, final in staged:
        os.replace(tmp, final)
    return [final for _, final in staged]


HELP = {
    "ratios": "T (and H, given snapshots) per broad field, plus the ESI divisor table",
    "hratios": "H ratios from top-ten snapshots",
    "fit": "fit H = T^alpha and report residuals",
    "rank": "merge per-field lists into one normalized ranking",
    "indicators": "CPP, h-index, CPMP and name-aggregation flags",
    "report": "run every command the inputs allow and write a manifest",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="multicite", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--snapshots", help="per-field top lists (date,esi_field,rank,name,papers,citations)")
    common.add_argument("--totals", help="field totals (year,nsf_field,total_citations)")
    common.add_argument("--mapping", help="ESI to NSF mapping (default: bundled table)")
    common.add_argument("--divisors", help="divisor table (esi_field,divisor_num,divisor_den)")
    common.add_argument("--profiles", help="per-paper citations (name,paper_id,citations)")
    common.add_argument("--fixture", help="merged list in rank,name,normalized,... form")
    common.add_argument("--pairs", help="T/H pairs (field,T,H)")
    common.add_argument("--preset", help="divisor preset: table2, two_thirds, appendix or data")
    common.add_argument("--top-per-field", type=int, default=ranking.DEFAULT_TOP_PER_FIELD,
                        help="entries kept from each field list (default %(default)s)")
    common.add_argument("--epsilon", type=float, default=ranking.DEFAULT_EPSILON,
                        help="relative gap that starts a new cluster (default %(default)s)")
    common.add_argument("--cpmp-mode", default="h-index", help="h-index or fixed")
    common.add_argument("--cpmp-threshold", type=float, default=None, help="citation cutoff for fixed mode")
    common.add_argument("--agg-threshold", type=float, default=indicators.DEFAULT_AGG_THRESHOLD,
                        help="papers per year that trigger the aggregation flag (default %(default)s)")
    common.add_argument("--window-years", type=float, default=ingest.DEFAULT_WINDOW_YEARS,
                        help="citation window length in years (default %(default)s)")
    common.add_argument("--format", default="csv", help="csv, json or markdown")
    common.add_argument("--out", default=".", help="output directory")
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=HELP[name])
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.format not in FORMATS:
            raise CiteError("bad_format", f"unknown format {args.format!r}; choose from {', '.join(FORMATS)}")
        if args.top_per_field < 1 or args.epsilon < 0 or args.window_years <= 0:
            raise CiteError("bad_parameter", "--top-per-field must be >= 1, --epsilon >= 0, --window-years > 0")
        outputs = COMMANDS[args.command](Inputs(args))
        if args.command == "rank":
            sys.stdout.write(outputs["rank_summary.txt"])
        write_outputs(outputs, args.out)
    except CiteError as exc:
        print(f"multicite {args.command}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"multicite {args.command}: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
