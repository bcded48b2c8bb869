"""Relating field-total ratios T to top-researcher ratios H.

The model is ``H = T ** alpha`` fitted by least squares in log-log space
through the origin (``T = 1`` must give ``H = 1``), so the estimate has the
closed form ``sum(ln T * ln H) / sum(ln T ** 2)``.  The cruder linear rule
``H = 2T/3`` is available for comparison.
"""

from __future__ import annotations

import csv
import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TextIO

import numpy as np

from .errors import CiteError

FIT_REPORT_HEADER = ("field", "T", "H", "H_pred", "residual")
TWO_THIRDS_EXCLUDED_T = frozenset({78})


@dataclass(frozen=True)
class FitResult:
    alpha: float
    pairs_used: tuple[tuple[float, float], ...]
    residuals: tuple[float, ...]
    max_abs_residual: float
    excluded_fields: frozenset[str] = frozenset()
    labels: tuple[str, ...] = field(default=())


@dataclass(frozen=True)
class ResidualRow:
    field: str
    T: float
    H: float
    predicted: float
    residual: float
    informative: bool
    excluded: bool


def _check_positive(pairs):
    arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise CiteError("non_positive", "T and H must be positive and finite")
    return arr


def fit_alpha(pairs: Sequence[tuple[float, float]], labels: Sequence[str] | None = None,
              excluded_fields: frozenset[str] = frozenset()) -> FitResult:
    """Fit ``H = T ** alpha`` through the origin in log-log space."""
    arr = _check_positive(pairs)
    lt, lh = np.log(arr[:, 0]), np.log(arr[:, 1])
    denom = float(np.sum(lt * lt))
    if denom == 0.0:
        raise CiteError("no_informative_pairs", "every pair has T = 1; alpha is undetermined")
    for t, h in arr:
        if t == 1 and h != 1:
            warnings.warn(f"pair (1, {h:g}) contradicts H(1) = 1 and does not affect the fit",
                          stacklevel=2)
    alpha = float(np.sum(lt * lh)) / denom
    resid = arr[:, 1] - arr[:, 0] ** alpha
    return FitResult(
        alpha=alpha,
        pairs_used=tuple((float(t), float(h)) for t, h in arr),
        residuals=tuple(float(r) for r in resid),
        max_abs_residual=float(np.max(np.abs(resid))),
        excluded_fields=frozenset(excluded_fields),
        labels=tuple(labels) if labels is not None else (),
    )


def predict_power(T: float, alpha: float) -> float:
    if not T > 0:
        raise CiteError("non_positive", f"T must be positive, got {T}")
    return float(T) ** alpha


def predict_two_thirds(T) -> Fraction:
    """``2T/3`` as an exact rational (floats are read through their decimal repr)."""
    q = Fraction(T) if isinstance(T, (int, Fraction)) else Fraction(repr(T))
    return 2 * q / 3


def residual_report(fit: FitResult, rule: str = "power",
                    exclude_t: frozenset[float] = TWO_THIRDS_EXCLUDED_T) -> list[ResidualRow]:
    """Observed vs predicted H for every pair.

    Rows with ``T = 1`` are marked non-informative.  Under ``two_thirds`` the
    pairs whose T is in ``exclude_t`` (the clinical and biomedical fields by
    default) or whose label is in ``fit.excluded_fields`` are flagged.
    """
    if rule not in ("power", "two_thirds"):
        raise CiteError("unknown_rule", f"unknown rule {rule!r}")
    labels = fit.labels or tuple("" for _ in fit.pairs_used)
    rows = []
    for label, (t, h) in zip(labels, fit.pairs_used):
        if rule == "power":
            pred = predict_power(t, fit.alpha)
            excluded = label in fit.excluded_fields
        else:
            pred = float(predict_two_thirds(t))
            excluded = t in exclude_t or label in fit.excluded_fields
        rows.append(ResidualRow(label, t, h, pred, h - pred, t != 1, excluded))
    return rows


def max_abs_residual(rows: Sequence[ResidualRow], include_excluded: bool = False) -> float:
    vals = [abs(r.residual) for r in rows if r.informative and (include_excluded or not r.excluded)]
    return max(vals, default=0.0)


def _num(x: float) -> str:
    return f"{x:.4f}".rstrip("0").rstrip(".") if x != int(x) else str(int(x))


def write_fit_report(fit: FitResult, stream: TextIO, rule: str = "power") -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(FIT_REPORT_HEADER)
    for r in residual_report(fit, rule):
        w.writerow([r.field, _num(r.T), _num(r.H), f"{r.predicted:.4f}", f"{r.residual:.4f}"])
    w.writerow(["alpha", f"{fit.alpha:.2f}"])


def plot_data(fit: FitResult, n_curve: int = 50) -> tuple[np.ndarray, np.ndarray]:
    """Observed ``(T, H, H_pred)`` triples and a fitted curve ``(T, T**alpha)``.

    The curve spans the observed T range on a log grid.
    """
    arr = np.asarray(fit.pairs_used, dtype=float)
    points = np.column_stack([arr[:, 0], arr[:, 1], arr[:, 0] ** fit.alpha])
    grid = np.geomspace(arr[:, 0].min(), arr[:, 0].max(), n_curve)
    return points, np.column_stack([grid, grid ** fit.alpha])


def write_plot_data(fit: FitResult, stream: TextIO, n_curve: int = 50) -> None:
    points, curve = plot_data(fit, n_curve)
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(("series", "T", "H", "H_pred"))
    for t, h, p in points:
        w.writerow(("observed", f"{t:.4f}", f"{h:.4f}", f"{p:.4f}"))
    for t, p in curve:
        w.writerow(("curve", f"{t:.4f}", "", f"{p:.4f}"))
