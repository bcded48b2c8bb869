"""Field vocabularies, spelling aliases and the published reference tables.

ESI fields are the 22 fine-grained fields of Essential Science Indicators;
NSF fields are the 9 broad fields of the NSF indicator reports.  Input files
spell field names in several ways (``MATERIALS SCIENCE``, ``Material
science``, ``Materials Science``); :func:`canonical_esi` and
:func:`canonical_nsf` fold them onto one spelling.
"""

from __future__ import annotations

import re
from fractions import Fraction

BASE_FIELD = "Mathematics"

ESI_FIELDS: tuple[str, ...] = (
    "Agriculture",
    "Biology and biochemistry",
    "Chemistry",
    "Clinical medicine",
    "Computer science",
    "Economics and business",
    "Engineering",
    "Environment and ecology",
    "Geosciences",
    "Immunology",
    "Materials science",
    "Mathematics",
    "Microbiology",
    "Molecular biology and genetics",
    "Multidisciplinary",
    "Neuroscience and behavior",
    "Pharmacology and toxicology",
    "Physics",
    "Plant and animal science",
    "Psychiatry and psychology",
    "Social sciences",
    "Space science",
)

NSF_FIELDS: tuple[str, ...] = (
    "Biology",
    "Biomedical research",
    "Chemistry",
    "Clinical medicine",
    "Earth and space sciences",
    "Engineering and technology",
    "Mathematics",
    "Physics",
    "Social/behavioral sciences",
)

_ESI_ALIASES = {
    "material science": "Materials science",
    "geo sciences": "Geosciences",
    "space sciences": "Space science",
    "plant and animal sciences": "Plant and animal science",
    "environment/ecology": "Environment and ecology",
    "neuroscience and behavior science": "Neuroscience and behavior",
    "neuroscience and behaviour": "Neuroscience and behavior",
    "social sciences, general": "Social sciences",
}

_NSF_ALIASES = {
    "earth/space sciences": "Earth and space sciences",
    "engineering/technology": "Engineering and technology",
    "social and behavioral sciences": "Social/behavioral sciences",
    "biomedicine": "Biomedical research",
}


def _fold(name: str) -> str:
    s = re.sub(r"\s+", " ", name.strip().lower())
    return s.replace(" & ", " and ")


_ESI_LOOKUP = {_fold(f): f for f in ESI_FIELDS}
_ESI_LOOKUP.update({_fold(k): v for k, v in _ESI_ALIASES.items()})
_NSF_LOOKUP = {_fold(f): f for f in NSF_FIELDS}
_NSF_LOOKUP.update({_fold(k): v for k, v in _NSF_ALIASES.items()})


def canonical_esi(name: str) -> str | None:
    """Canonical ESI spelling of ``name``, or None when it is not an ESI field."""
    return _ESI_LOOKUP.get(_fold(name))


def canonical_nsf(name: str) -> str | None:
    return _NSF_LOOKUP.get(_fold(name))


# Average ratio of a broad field's total citations to mathematics'.
PUBLISHED_T: dict[str, int] = {
    "Clinical medicine": 78,
    "Biomedical research": 78,
    "Biology": 8,
    "Chemistry": 15,
    "Physics": 19,
    "Earth and space sciences": 9,
    "Engineering and technology": 5,
    "Mathematics": 1,
    "Social/behavioral sciences": 13,
}

# Broad-field H ratios (top-ten researcher level relative to mathematics).
PUBLISHED_H: dict[str, int] = {
    "Clinical medicine": 37,
    "Biomedical research": 37,
    "Biology": 5,
    "Chemistry": 10,
    "Physics": 12,
    "Earth and space sciences": 6,
    "Engineering and technology": 3,
    "Mathematics": 1,
    "Social/behavioral sciences": 9,
}

# (T, H) as printed: the two T = 78 fields share one row.
PUBLISHED_PAIRS: tuple[tuple[int, int], ...] = (
    (1, 1), (5, 3), (8, 5), (9, 6), (13, 9), (15, 10), (19, 12), (78, 37),
)

DEFAULT_MAPPING: dict[str, str] = {
    "Agriculture": "Biology",
    "Biology and biochemistry": "Biomedical research",
    "Chemistry": "Chemistry",
    "Clinical medicine": "Clinical medicine",
    "Computer science": "Engineering and technology",
    "Economics and business": "Social/behavioral sciences",
    "Engineering": "Engineering and technology",
    "Environment and ecology": "Earth and space sciences",
    "Geosciences": "Earth and space sciences",
    "Immunology": "Clinical medicine",
    "Materials science": "Engineering and technology",
    "Mathematics": "Mathematics",
    "Microbiology": "Biomedical research",
    "Molecular biology and genetics": "Biomedical research",
    "Multidisciplinary": "Engineering and technology",
    "Neuroscience and behavior": "Clinical medicine",
    "Pharmacology and toxicology": "Clinical medicine",
    "Physics": "Physics",
    "Plant and animal science": "Biology",
    "Psychiatry and psychology": "Clinical medicine",
    "Social sciences": "Social/behavioral sciences",
    "Space science": "Earth and space sciences",
}

# Per-ESI divisors as printed in the mapping table (its fourth column).
PUBLISHED_DIVISORS: dict[str, int] = {
    esi: PUBLISHED_H[nsf] for esi, nsf in DEFAULT_MAPPING.items()
}

# Divisors that reproduce the published 200-row merged list, recovered by
# scanning small-denominator rationals against every printed row.
APPENDIX_GROUP_DIVISORS: dict[str, Fraction] = {
    "Mathematics": Fraction(1),
    "Engineering and technology": Fraction(10, 3),
    "Biology": Fraction(16, 3),
    "Earth and space sciences": Fraction(6),
    "Social/behavioral sciences": Fraction(26, 3),
    "Chemistry": Fraction(10),
    "Physics": Fraction(38, 3),
    "Clinical medicine": Fraction(39),
    "Biomedical research": Fraction(39),
}
APPENDIX_ESI_OVERRIDES: dict[str, Fraction] = {
    "Environment and ecology": Fraction(16, 3),
}
