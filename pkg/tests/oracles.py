"""Independent brute-force oracles for the metric layer.

Everything here is direct summation in pure Python, written against the
metric definitions alone; the shipped implementation must agree with
these to 1e-9. Do not import miqyas.metrics from this module.
"""

from __future__ import annotations

import math


def oracle_accuracy(ref, hyp):
    assert len(ref) == len(hyp) and ref
    hits = 0
    for a, b in zip(ref, hyp):
        if a == b:
            hits += 1
    return hits / len(ref)


def oracle_adjacent_accuracy(ref, hyp):
    assert len(ref) == len(hyp) and ref
    hits = 0
    for a, b in zip(ref, hyp):
        if abs(a - b) <= 1:
            hits += 1
    return hits / len(ref)


def oracle_avg_distance(ref, hyp, k):
    assert len(ref) == len(hyp) and ref
    total = 0
    for a, b in zip(ref, hyp):
        total += abs(a - b)
    distance = total / len(ref)
    return distance, distance / k


def oracle_confusion(ref, hyp, k):
    matrix = [[0] * k for _ in range(k)]
    for a, b in zip(ref, hyp):
        matrix[a - 1][b - 1] += 1
    return matrix


def oracle_f_normalize(matrix):
    k = len(matrix)
    rows = [sum(matrix[i]) for i in range(k)]
    cols = [sum(matrix[i][j] for i in range(k)) for j in range(k)]
    out = [[0.0] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            denom = rows[i] + cols[j]
            out[i][j] = 2.0 * matrix[i][j] / denom if denom > 0 else 0.0
    return out


def oracle_qwk(ref, hyp, k):
    """QWK by direct summation; degenerate expected disagreement pins to 1/0."""
    n = len(ref)
    assert n == len(hyp) and n > 0
    observed = oracle_confusion(ref, hyp, k)
    row_marg = [sum(observed[i]) for i in range(k)]
    col_marg = [sum(observed[i][j] for i in range(k)) for j in range(k)]

    def weight(i, j):
        return ((i - j) ** 2) / ((k - 1) ** 2) if k > 1 else 0.0

    num = 0.0
    den = 0.0
    for i in range(k):
        for j in range(k):
            w = weight(i, j)
            num += w * observed[i][j]
            den += w * row_marg[i] * col_marg[j] / n
    if den == 0.0:
        return 1.0 if num == 0.0 else 0.0
    return 1.0 - num / den


def oracle_pearson(xs, ys):
    n = len(xs)
    assert n == len(ys) and n >= 2
    mx = sum(xs) / n
    my = sum(ys) / n
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    sxx = sum((x - mx) ** 2 for x in xs)
    syy = sum((y - my) ** 2 for y in ys)
    if sxx == 0 or syy == 0:
        return None
    return sxy / math.sqrt(sxx * syy)


def oracle_collapse(level, bounds):
    """Bucket index by linear scan over ascending inclusive upper bounds."""
    for bucket, upper in enumerate(bounds, start=1):
        if level <= upper:
            return bucket
    raise AssertionError(f"level {level} above top bound {bounds[-1]}")
