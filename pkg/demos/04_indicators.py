"""
Per-researcher indicators
=========================

Citations per paper, the h-index, citations per meaningful paper (CPMP) and a
flag for lists whose paper rate suggests several people share one name.
"""

from multicite.indicators import cpmp, cpp, flag_aggregation, h_index
from multicite.ingest import PaperProfile, load_appendix

profile = PaperProfile("EXAMPLE, A", (10, 8, 5, 4, 3))
print("h-index:", h_index(profile))
print("CPMP over the h-core:", cpmp(profile, "h-index"))
print("CPMP with threshold 5:", round(cpmp(profile, "fixed", 5), 2))

# %%
# CPP for the first rows of the bundled list.
rows = load_appendix()
for r in rows[:5]:
    print(f"{r.record.name:18s} cpp {cpp(r.record.citations, r.record.papers)}  (listed {r.cpp})")

# %%
# More than 100 papers a year over the 10.167-year window is flagged.
for r in rows:
    flagged, rate = flag_aggregation(r.record.papers)
    if flagged:
        print(f"flag: {r.record.name} ({r.record.esi_field}) {rate:.1f} papers/yr")
