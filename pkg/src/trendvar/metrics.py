"""Ranking metrics and correlation diagnostics, computed from first
principles.

AUROC uses the rank-sum formulation with midranks for ties, so a constant
scorer lands exactly at 0.5.  AUPRC is the area under the stepwise
precision-recall curve with one step per distinct threshold (ties move as a
block).  Multi-class scores are macro one-vs-rest averages; classes absent
from the evaluated set cannot be scored and are skipped but reported.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .wavelets import decompose


def _validate_binary(scores, labels):
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.ndim != 1 or labels.shape != scores.shape:
        raise DataError(
            f"binary metric: scores {scores.shape} and labels "
            f"{labels.shape} must be equal-length vectors"
        )
    if not np.all((labels == 0) | (labels == 1)):
        raise DataError("binary metric: labels must be 0 or 1")
    if not np.all(np.isfinite(scores)):
        raise DataError("binary metric: non-finite score")
    return scores, labels.astype(np.int64)


def auroc_binary(scores, labels):
    """Probability a random positive outranks a random negative (ties half).

    Equivalent to the Mann-Whitney U statistic normalised by n_pos * n_neg.
    """
    scores, labels = _validate_binary(scores, labels)
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError(
            f"auroc: need both classes, got {n_pos} positives and "
            f"{n_neg} negatives"
        )
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(scores.size)
    sorted_scores = scores[order]
    i = 0
    while i < scores.size:
        j = i
        while j + 1 < scores.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        # midrank of the tied block occupying ranks i+1 .. j+1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    rank_sum = ranks[labels == 1].sum()
    return float((rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def auprc_binary(scores, labels):
    """Area under the precision-recall step curve.

    Thresholds sweep the distinct score values in descending order; each
    step adds (recall gain) * (precision at that threshold).
    """
    scores, labels = _validate_binary(scores, labels)
    n_pos = int(labels.sum())
    if n_pos == 0:
        raise DataError("auprc: no positive examples")
    order = np.argsort(-scores, kind="mergesort")
    sorted_scores = scores[order]
    sorted_labels = labels[order]
    area = 0.0
    true_pos = 0
    seen = 0
    prev_recall = 0.0
    i = 0
    n = scores.size
    while i < n:
        j = i
        while j + 1 < n and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        true_pos += int(sorted_labels[i:j + 1].sum())
        seen += j - i + 1
        recall = true_pos / n_pos
        precision = true_pos / seen
        area += (recall - prev_recall) * precision
        prev_recall = recall
        i = j + 1
    return float(area)


@dataclass
class MacroResult:
    """Macro average plus the per-class breakdown.

    ``skipped`` lists classes that were absent (or universal) in the
    evaluated labels and therefore unscorable.
    """

    value: float
    per_class: dict
    skipped: list


_BINARY_METRICS = {"auroc": auroc_binary, "auprc": auprc_binary}


def macro_one_vs_rest(probs, labels, metric):
    """Macro-averaged one-vs-rest metric over an (N, d) probability matrix."""
    try:
        scorer = _BINARY_METRICS[metric]
    except KeyError:
        raise DataError(
            f"unknown metric {metric!r}: choose from "
            f"{sorted(_BINARY_METRICS)}"
        ) from None
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if probs.ndim != 2 or labels.shape != (probs.shape[0],):
        raise DataError(
            f"macro metric: probs {probs.shape} and labels {labels.shape} "
            f"do not line up"
        )
    per_class = {}
    skipped = []
    for cls in range(probs.shape[1]):
        binary = (labels == cls).astype(np.int64)
        n_pos = int(binary.sum())
        if n_pos == 0 or n_pos == binary.size:
            skipped.append(cls)
            continue
        per_class[cls] = scorer(probs[:, cls], binary)
    if not per_class:
        raise DataError(
            "macro metric: every class is degenerate in this evaluation set"
        )
    value = float(np.mean(list(per_class.values())))
    return MacroResult(value, per_class, skipped)


def pearson(a, b):
    """Pearson correlation; constant input is an explicit error, not NaN."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or a.shape != b.shape:
        raise DataError(
            f"pearson: inputs {a.shape} and {b.shape} must be equal-length "
            f"vectors"
        )
    if a.size < 2:
        raise DataError(f"pearson: need at least 2 points, got {a.size}")
    if np.all(a == a[0]) or np.all(b == b[0]):
        raise DataError("pearson: correlation undefined for constant input")
    ca = a - a.mean()
    cb = b - b.mean()
    return float(np.dot(ca, cb) / np.sqrt(np.dot(ca, ca) * np.dot(cb, cb)))


@dataclass
class FeatureCorrelation:
    feature: str
    mean_abs_correlation: float
    mean_correlation: float
    n_defined: int
    n_undefined: int


def trend_variation_report(visit_tables, feature_names, order):
    """Rank features by how strongly trend and variation co-move.

    For every patient and feature, correlate the trend line with the
    variation line; report the mean |r| per feature, descending.  Patients
    whose lines are constant (or too short) count as undefined rather than
    poisoning the mean.
    """
    sums = {name: 0.0 for name in feature_names}
    abs_sums = {name: 0.0 for name in feature_names}
    defined = {name: 0 for name in feature_names}
    undefined = {name: 0 for name in feature_names}
    for matrix in visit_tables.values():
        if matrix.shape[1] != len(feature_names):
            raise DataError(
                f"trend_variation_report: matrix has {matrix.shape[1]} "
                f"columns for {len(feature_names)} features"
            )
        for j, name in enumerate(feature_names):
            pair = decompose(matrix[:, j], order)
            if pair.trend.size < 2:
                undefined[name] += 1
                continue
            try:
                r = pearson(pair.trend, pair.variation)
            except DataError:
                undefined[name] += 1
                continue
            sums[name] += r
            abs_sums[name] += abs(r)
            defined[name] += 1
    rows = []
    for name in feature_names:
        n = defined[name]
        rows.append(FeatureCorrelation(
            feature=name,
            mean_abs_correlation=abs_sums[name] / n if n else 0.0,
            mean_correlation=sums[name] / n if n else 0.0,
            n_defined=n,
            n_undefined=undefined[name],
        ))
    rows.sort(key=lambda row: (-row.mean_abs_correlation, row.feature))
    return rows
