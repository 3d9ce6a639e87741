"""Correlation and agreement statistics for the meta-evaluation harness.

Kendall's tau is the tie-corrected tau-b; Spearman is Pearson on mid-ranks;
Krippendorff's alpha uses pairable-value accounting with a nominal
(mismatch indicator) or interval (squared difference) distance.
"""

from __future__ import annotations

import math
from collections import Counter
from typing import Mapping, Sequence

import numpy as np

from .errors import InputError

Values = Sequence[float]


def _paired_arrays(x: Values, y: Values) -> tuple[np.ndarray, np.ndarray]:
    xa = np.asarray(x, dtype=np.float64)
    ya = np.asarray(y, dtype=np.float64)
    if xa.ndim != 1 or ya.ndim != 1 or len(xa) != len(ya):
        raise InputError(f"paired sample lengths differ: {xa.shape} vs {ya.shape}")
    if len(xa) < 2:
        raise InputError(f"need at least 2 paired observations, got {len(xa)}")
    if not (np.all(np.isfinite(xa)) and np.all(np.isfinite(ya))):
        raise InputError("paired sample contains non-finite values")
    return xa, ya


def _tied_pairs(values: np.ndarray) -> float:
    _, counts = np.unique(values, return_counts=True)
    return float(np.sum(counts * (counts - 1)) / 2)


def kendall_tau_b(x: Values, y: Values) -> float:
    """Tie-corrected rank correlation (C - D) / sqrt((n0 - tx)(n0 - ty))."""
    xa, ya = _paired_arrays(x, y)
    n = len(xa)
    if np.all(xa == xa[0]) or np.all(ya == ya[0]):
        raise InputError("kendall_tau_b is undefined when all x or all y are tied")
    dx = np.sign(xa[:, None] - xa[None, :])
    dy = np.sign(ya[:, None] - ya[None, :])
    iu = np.triu_indices(n, k=1)
    concordant_minus_discordant = float(np.sum(dx[iu] * dy[iu]))
    n0 = n * (n - 1) / 2
    denom = math.sqrt((n0 - _tied_pairs(xa)) * (n0 - _tied_pairs(ya)))
    return min(1.0, max(-1.0, concordant_minus_discordant / denom))


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1  # average rank, 1-based
        i = j + 1
    return ranks


def _pearson(xa: np.ndarray, ya: np.ndarray) -> float:
    xc = xa - xa.mean()
    yc = ya - ya.mean()
    sxx = float(np.dot(xc, xc))
    syy = float(np.dot(yc, yc))
    if sxx == 0.0 or syy == 0.0:
        raise InputError("correlation is undefined for a zero-variance variable")
    return min(1.0, max(-1.0, float(np.dot(xc, yc)) / math.sqrt(sxx * syy)))


def rank_corr(x: Values, y: Values, mode: str) -> float:
    """Pearson correlation, or Spearman (Pearson on mid-ranks)."""
    xa, ya = _paired_arrays(x, y)
    if mode == "pearson":
        return _pearson(xa, ya)
    if mode == "spearman":
        return _pearson(_midranks(xa), _midranks(ya))
    raise InputError(f"unknown correlation mode {mode!r}")


def _distance(level: str):
    if level == "nominal":
        return lambda a, b: 0.0 if a == b else 1.0
    if level == "interval":
        return lambda a, b: (a - b) ** 2
    raise InputError(f"unknown measurement level {level!r}")


def krippendorff_alpha(
    rows: Sequence[Mapping[object, float] | Sequence[float | None]],
    level: str = "nominal",
) -> float:
    """Chance-corrected inter-annotator agreement, 1 - D_o/D_e.

    ``rows`` holds one entry per annotator: either a mapping item -> value or
    a sequence where position is the item and None marks a missing value.
    Items with fewer than two values are excluded from the computation.
    """
    if len(rows) < 2:
        raise InputError("krippendorff_alpha needs at least 2 annotators")
    distance = _distance(level)

    units: dict[object, list[float]] = {}
    for row in rows:
        items = row.items() if isinstance(row, Mapping) else enumerate(row)
        for item, value in items:
            if value is None:
                continue
            units.setdefault(item, []).append(float(value))
    units = {item: values for item, values in units.items() if len(values) >= 2}
    if not units:
        raise InputError("fewer than 2 pairable values: no item was rated by 2+ annotators")

    n_pairable = sum(len(values) for values in units.values())
    observed = (
        math.fsum(
            math.fsum(distance(a, b) for a in values for b in values) / (len(values) - 1)
            for values in units.values()
        )
        / n_pairable
    )

    value_counts = Counter()
    for values in units.values():
        value_counts.update(values)
    expected = math.fsum(
        count_a * count_b * distance(a, b)
        for a, count_a in value_counts.items()
        for b, count_b in value_counts.items()
    ) / (n_pairable * (n_pairable - 1))
    if expected == 0.0:
        raise InputError("expected disagreement is zero; alpha is undefined")
    return 1.0 - observed / expected


def correlation_matrix(score_table: Mapping[str, Values]) -> tuple[list[str], np.ndarray]:
    """Pairwise Kendall tau-b over equally ordered score columns.

    Returns the column names and a symmetric matrix with an exact unit
    diagonal.
    """
    names = list(score_table)
    lengths = {len(score_table[name]) for name in names}
    if len(lengths) > 1:
        raise InputError(f"ragged score columns: lengths {sorted(lengths)}")
    if not names or lengths == {0} or next(iter(lengths)) < 2:
        raise InputError("correlation matrix needs columns of length >= 2")
    matrix = np.eye(len(names), dtype=np.float64)
    for i in range(len(names)):
        for j in range(i + 1, len(names)):
            tau = kendall_tau_b(score_table[names[i]], score_table[names[j]])
            matrix[i, j] = matrix[j, i] = tau
    return names, matrix
