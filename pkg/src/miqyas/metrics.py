"""Ordinal agreement and evaluation metrics.

Accuracy at each granularity, adjacent accuracy, average absolute
distance (with its range-relative form), quadratic weighted kappa, and
confusion-matrix tooling, plus macro/micro aggregation over batches.
Series are plain integer label sequences in 1..K; collapsing from the
19-level scheme happens in the report builders via a GranularityMap.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np

from .levels import GranularityMap

REPORT_COLUMNS = ("distance", "acc19", "adjacent_acc19", "qwk", "acc7", "acc5", "acc3")


def _as_arrays(ref, hyp, k=None):
    a = np.asarray([x.index if hasattr(x, "index") else int(x) for x in ref], dtype=np.int64)
    b = np.asarray([x.index if hasattr(x, "index") else int(x) for x in hyp], dtype=np.int64)
    if a.size == 0 or b.size == 0:
        raise ValueError("label series must be nonempty")
    if a.size != b.size:
        raise ValueError(f"label series length mismatch: {a.size} vs {b.size}")
    if k is not None:
        for name, arr in (("reference", a), ("hypothesis", b)):
            if arr.min() < 1 or arr.max() > k:
                raise ValueError(f"{name} labels outside 1..{k}")
    return a, b


def accuracy(ref, hyp) -> float:
    """Fraction of positions with equal labels."""
    a, b = _as_arrays(ref, hyp)
    return float(np.mean(a == b))


def accuracy_at(ref, hyp, g: int, gmap: "GranularityMap") -> float:
    """Accuracy after collapsing 19-level series to granularity ``g``."""
    return accuracy(collapse_series(ref, g, gmap), collapse_series(hyp, g, gmap))


def adjacent_accuracy(ref, hyp) -> float:
    """Fraction of positions off by at most one level."""
    a, b = _as_arrays(ref, hyp)
    return float(np.mean(np.abs(a - b) <= 1))


def avg_distance(ref, hyp, k: int):
    """Mean absolute label difference and its value relative to the range K."""
    a, b = _as_arrays(ref, hyp, k)
    distance = float(np.mean(np.abs(a - b)))
    return distance, distance / k


def confusion(ref, hyp, k: int) -> np.ndarray:
    """K x K count matrix: reference on rows, hypothesis on columns."""
    a, b = _as_arrays(ref, hyp, k)
    matrix = np.zeros((k, k), dtype=np.int64)
    np.add.at(matrix, (a - 1, b - 1), 1)
    return matrix


def f_normalize(matrix) -> np.ndarray:
    """Per-cell F-score view of a confusion matrix: 2*m_ij / (row_i + col_j)."""
    m = np.asarray(matrix, dtype=np.float64)
    denom = m.sum(axis=1, keepdims=True) + m.sum(axis=0, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(denom > 0, 2.0 * m / denom, 0.0)
    return out


def qwk_from_confusion(matrix):
    """(QWK, degenerate flag) from a confusion matrix.

    Weights are (i-j)^2/(K-1)^2 and expected counts the outer product of
    the marginals scaled to N. When the expected weighted disagreement is
    zero the result is pinned to 1.0 (both series constant and equal) or
    0.0, with the degenerate flag set.
    """
    m = np.asarray(matrix, dtype=np.float64)
    k = m.shape[0]
    n = m.sum()
    if n == 0:
        raise ValueError("empty confusion matrix")
    idx = np.arange(k, dtype=np.float64)
    weights = (idx[:, None] - idx[None, :]) ** 2
    if k > 1:
        weights /= (k - 1) ** 2
    expected = np.outer(m.sum(axis=1), m.sum(axis=0)) / n
    observed_dis = float((weights * m).sum())
    expected_dis = float((weights * expected).sum())
    if expected_dis == 0.0:
        return (1.0 if observed_dis == 0.0 else 0.0), True
    return 1.0 - observed_dis / expected_dis, False


def qwk(ref, hyp, k: int) -> float:
    """Quadratic weighted kappa over labels in 1..K."""
    value, _ = qwk_from_confusion(confusion(ref, hyp, k))
    return value


@dataclass
class MetricReport:
    """The standard metric bundle: distance, accuracies, QWK.

    Distance, adjacent accuracy and QWK are computed on the 19-level labels;
    the collapsed accuracies use the loaded granularity map.
    """

    n: int
    distance: float
    distance_relative: float
    acc19: float
    adjacent_acc19: float
    qwk: float
    acc7: float
    acc5: float
    acc3: float
    warnings: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def row(self) -> dict:
        return {
            "Distance": self.distance,
            "Acc19": self.acc19,
            "+/-1 Acc19": self.adjacent_acc19,
            "QWK": self.qwk,
            "Acc7": self.acc7,
            "Acc5": self.acc5,
            "Acc3": self.acc3,
        }


def collapse_series(series, g: int, gmap: GranularityMap):
    return [gmap.collapse(x, g) for x in series]


def metric_report(ref, hyp, gmap: GranularityMap) -> MetricReport:
    """Full report over 19-level series, with collapsed accuracies."""
    a, b = _as_arrays(ref, hyp, 19)
    distance, relative = avg_distance(a, b, 19)
    value, degenerate = qwk_from_confusion(confusion(a, b, 19))
    warnings = ["degenerate QWK: zero expected disagreement"] if degenerate else []
    accs = {}
    for g in (7, 5, 3):
        accs[g] = accuracy(collapse_series(a, g, gmap), collapse_series(b, g, gmap))
    return MetricReport(
        n=int(a.size),
        distance=distance,
        distance_relative=relative,
        acc19=accuracy(a, b),
        adjacent_acc19=adjacent_accuracy(a, b),
        qwk=value,
        acc7=accs[7],
        acc5=accs[5],
        acc3=accs[3],
        warnings=warnings,
    )


def granularity_table(ref, hyp, gmap: GranularityMap) -> dict:
    """Distance/relative/acc/adjacent-acc per granularity (the 19/7/5/3 table)."""
    table = {}
    for g in (19, 7, 5, 3):
        a = collapse_series(ref, g, gmap)
        b = collapse_series(hyp, g, gmap)
        distance, relative = avg_distance(a, b, g)
        table[g] = {
            "distance": distance,
            "relative": relative,
            "acc": accuracy(a, b),
            "adjacent_acc": adjacent_accuracy(a, b),
        }
    return table


def macro_average(reports) -> MetricReport:
    """Unweighted fieldwise mean of reports; n is the total pair count."""
    reports = list(reports)
    if not reports:
        raise ValueError("no reports to aggregate")
    warnings = [w for r in reports for w in r.warnings]
    values = {
        name: float(np.mean([getattr(r, name) for r in reports]))
        for name in ("distance", "distance_relative", "acc19", "adjacent_acc19",
                     "qwk", "acc7", "acc5", "acc3")
    }
    return MetricReport(n=sum(r.n for r in reports), warnings=warnings, **values)


def aggregate(pairs, mode: str, gmap: GranularityMap) -> MetricReport:
    """Aggregate (ref, hyp) series batches: macro averages per-batch reports,
    micro recomputes every metric over the pooled label pairs."""
    pairs = list(pairs)
    if not pairs:
        raise ValueError("no batches to aggregate")
    if mode == "macro":
        return macro_average(metric_report(r, h, gmap) for r, h in pairs)
    if mode == "micro":
        pooled_ref = [x for r, _ in pairs for x in r]
        pooled_hyp = [x for _, h in pairs for x in h]
        return metric_report(pooled_ref, pooled_hyp, gmap)
    raise ValueError(f"unknown aggregation mode: {mode!r}")


def render_report_table(rows: dict, title: str = "") -> str:
    """Fixed-width table with the standard metric columns, one row per entry."""
    headers = ["", "Distance", "Acc19", "+/-1 Acc19", "QWK", "Acc7", "Acc5", "Acc3"]
    lines = [title] if title else []
    body = []
    for name, report in rows.items():
        r = report.row()
        body.append([
            str(name), f"{r['Distance']:.2f}",
            f"{r['Acc19'] * 100:.1f}%", f"{r['+/-1 Acc19'] * 100:.1f}%",
            f"{r['QWK'] * 100:.1f}%", f"{r['Acc7'] * 100:.1f}%",
            f"{r['Acc5'] * 100:.1f}%", f"{r['Acc3'] * 100:.1f}%",
        ])
    widths = [max(len(h), *(len(row[i]) for row in body)) for i, h in enumerate(headers)]
    lines.append("  ".join(h.ljust(w) for h, w in zip(headers, widths)))
    for row in body:
        lines.append("  ".join(cell.rjust(w) if i else cell.ljust(w)
                               for i, (cell, w) in enumerate(zip(row, widths))))
    return "\n".join(lines)
