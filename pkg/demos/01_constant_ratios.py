"""
Field ratios T and H from raw data
==================================

Two numbers describe how much more citation traffic a broad field carries
than mathematics:

* T, the mean yearly ratio of the field's total citations to mathematics';
* H, the ratio of the field's top-ten researcher level to mathematics'.

This walk-through recomputes both from the bundled synthetic fixtures.
"""

# The fixtures ship with the package. `data_path` finds them.
from multicite.fields import PUBLISHED_H, PUBLISHED_T
from multicite.ingest import data_path, default_mapping, parse_field_totals, parse_snapshots
from multicite.ratios import aggregate_top_vectors, build_divisor_table, compute_h_ratios, compute_t_ratios
from multicite.rounding import round_float

totals = parse_field_totals(data_path("totals_synthetic.csv"))
snapshots = parse_snapshots(data_path("snapshots_synthetic.csv"))
mapping = default_mapping()
print(f"{len(totals)} field series, {len(snapshots)} top-ten snapshots")

# T: average the year-by-year ratio to mathematics over the shared years.
t = compute_t_ratios(totals)

# H: each snapshot's top-ten vector is summed elementwise with the other
# ESI fields that map to the same broad field, then pooled over all dates.
aggregated = aggregate_top_vectors(snapshots, mapping)
levels, h = compute_h_ratios(aggregated)

print(f"\n{'field':28s} {'T':>7s} {'pub':>4s} {'H':>7s} {'pub':>4s}")
for field in sorted(h, key=h.get):
    print(f"{field:28s} {t[field]:7.2f} {PUBLISHED_T[field]:4d} {h[field]:7.3f} {PUBLISHED_H[field]:4d}")

# Rounded half away from zero the computed H matches the published column.
assert {f: round_float(v) for f, v in h.items()} == PUBLISHED_H

# The H ratios become divisors for the 22 ESI fields. The `data` preset
# keeps them as small exact fractions.
divisors = build_divisor_table("data", mapping, h_ratios=h)
for esi in ("Mathematics", "Physics", "Immunology"):
    print(f"divisor[{esi}] = {divisors[esi]}")
