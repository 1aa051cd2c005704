"""Multi-annotator agreement analysis.

Pairwise agreement over shared blind sets, unification bookkeeping
(unified label UL vs the annotators' rounded average AL), max-min
disagreement browsing, and phase-level macro/micro roll-ups.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

from .levels import GranularityMap, ReadabilityLevel, parse_level
from .metrics import (
    MetricReport,
    aggregate,
    granularity_table,
    macro_average,
    metric_report,
)


class IaaDataError(ValueError):
    pass


@dataclass
class IaaSentence:
    sentence_id: str
    labels: dict  # annotator id -> level index
    text: str = ""
    ul: int | None = None

    @property
    def max_min(self) -> int:
        values = list(self.labels.values())
        return max(values) - min(values)


@dataclass
class IaaSet:
    set_id: str
    phase: str
    sentences: list = field(default_factory=list)

    def annotators(self) -> list:
        seen = sorted({a for s in self.sentences for a in s.labels})
        return seen

    def validate(self):
        for s in self.sentences:
            if len(s.labels) < 2:
                raise IaaDataError(
                    f"set {self.set_id}: sentence {s.sentence_id} has fewer than two labels"
                )
            for annotator, value in s.labels.items():
                if not 1 <= value <= 19:
                    raise IaaDataError(
                        f"set {self.set_id}: sentence {s.sentence_id} has invalid "
                        f"level {value} from {annotator}"
                    )
        return self


def load_iaa_sets(path) -> list:
    """Read line-delimited IAA records, grouped into sets.

    Record shape: {set_id, phase?, sentence_id, text?, labels: {annotator: level}, ul?}
    """
    sets = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IaaDataError(f"{path}:{lineno}: bad JSON: {exc}") from exc
            set_id = str(record.get("set_id", "set-1"))
            group = sets.setdefault(
                set_id, IaaSet(set_id=set_id, phase=str(record.get("phase", "")))
            )
            labels = {
                str(a): parse_level(v).index for a, v in record["labels"].items()
            }
            ul = record.get("ul")
            group.sentences.append(
                IaaSentence(
                    sentence_id=str(record["sentence_id"]),
                    labels=labels,
                    text=record.get("text", ""),
                    ul=parse_level(ul).index if ul is not None else None,
                )
            )
    return [s.validate() for s in sets.values()]


def pair_series(iaa_set: IaaSet, first: str, second: str, strict: bool = False):
    """Aligned label series for one annotator pair over co-annotated sentences."""
    ref, hyp = [], []
    for s in iaa_set.sentences:
        if first in s.labels and second in s.labels:
            ref.append(s.labels[first])
            hyp.append(s.labels[second])
        elif strict and (first in s.labels or second in s.labels):
            raise IaaDataError(
                f"set {iaa_set.set_id}: sentence {s.sentence_id} missing a label "
                f"for pair ({first}, {second})"
            )
    return ref, hyp


def pairwise_report(iaa_set: IaaSet, gmap: GranularityMap, strict: bool = False):
    """Per-pair reports plus their unweighted per-set average."""
    pairs = {}
    for first, second in combinations(iaa_set.annotators(), 2):
        ref, hyp = pair_series(iaa_set, first, second, strict=strict)
        if ref:
            pairs[(first, second)] = metric_report(ref, hyp, gmap)
    if not pairs:
        raise IaaDataError(f"set {iaa_set.set_id}: no co-annotated sentence pairs")
    return pairs, macro_average(pairs.values())


def phase_rollup(sets, gmap: GranularityMap, strict: bool = False):
    """Macro (over sets) and micro (over pooled pairs) phase aggregates."""
    set_reports = {}
    pooled = []
    for iaa_set in sets:
        _, set_avg = pairwise_report(iaa_set, gmap, strict=strict)
        set_reports[iaa_set.set_id] = set_avg
        for first, second in combinations(iaa_set.annotators(), 2):
            ref, hyp = pair_series(iaa_set, first, second, strict=strict)
            if ref:
                pooled.append((ref, hyp))
    macro = macro_average(set_reports.values())
    micro = aggregate(pooled, "micro", gmap)
    return set_reports, macro, micro


def average_label(labels) -> ReadabilityLevel:
    """Arithmetic mean rounded half-away-from-zero to the nearest level."""
    values = [v.index if hasattr(v, "index") else int(v) for v in labels]
    if not values:
        raise IaaDataError("no labels to average")
    mean = sum(values) / len(values)
    return ReadabilityLevel(_round_half_away(mean))


def _round_half_away(x: float) -> int:
    # isolated so the rounding convention can be swapped in one place
    return int(x + 0.5) if x >= 0 else -int(-x + 0.5)


@dataclass
class UnificationRecord:
    sentence_id: str
    labels: dict
    ul: int
    al: int
    max_min: int
    within_range: bool
    matches_annotator: bool

    def to_dict(self) -> dict:
        return {
            "sentence_id": self.sentence_id,
            "labels": dict(self.labels),
            "ul": self.ul,
            "al": self.al,
            "max_min": self.max_min,
            "within_range": self.within_range,
            "matches_annotator": self.matches_annotator,
        }


def unification_record(sentence: IaaSentence) -> UnificationRecord:
    if sentence.ul is None:
        raise IaaDataError(f"sentence {sentence.sentence_id} has no unified label")
    values = list(sentence.labels.values())
    return UnificationRecord(
        sentence_id=sentence.sentence_id,
        labels=dict(sentence.labels),
        ul=sentence.ul,
        al=average_label(values).index,
        max_min=max(values) - min(values),
        within_range=min(values) <= sentence.ul <= max(values),
        matches_annotator=sentence.ul in values,
    )


@dataclass
class UnificationStats:
    records: list
    skipped: int
    within_range_rate: float
    matches_annotator_rate: float
    al_ul_report: MetricReport
    al_ul_table: dict  # granularity -> distance/relative/acc/adjacent_acc


def unification_stats(sets, gmap: GranularityMap) -> UnificationStats:
    """Rates over sentences with a UL, plus the AL-vs-UL metric table."""
    records = []
    skipped = 0
    for iaa_set in sets:
        for sentence in iaa_set.sentences:
            if sentence.ul is None:
                skipped += 1
                continue
            records.append(unification_record(sentence))
    if not records:
        raise IaaDataError("no unified labels present")
    n = len(records)
    al = [r.al for r in records]
    ul = [r.ul for r in records]
    return UnificationStats(
        records=records,
        skipped=skipped,
        within_range_rate=sum(r.within_range for r in records) / n,
        matches_annotator_rate=sum(r.matches_annotator for r in records) / n,
        al_ul_report=metric_report(al, ul, gmap),
        al_ul_table=granularity_table(al, ul, gmap),
    )


def annotator_vs_ul(sets, gmap: GranularityMap):
    """Per-annotator reports against the unified labels, plus their macro mean."""
    series = {}
    for iaa_set in sets:
        for sentence in iaa_set.sentences:
            if sentence.ul is None:
                continue
            for annotator, value in sentence.labels.items():
                ref, hyp = series.setdefault(annotator, ([], []))
                ref.append(value)
                hyp.append(sentence.ul)
    if not series:
        raise IaaDataError("no unified labels present")
    reports = {a: metric_report(r, h, gmap) for a, (r, h) in sorted(series.items())}
    return reports, macro_average(reports.values())


def disagreement_browser(sets, min_mm: int = 0, limit: int | None = None) -> list:
    """Sentences ranked by max-min label spread, largest first."""
    rows = []
    for iaa_set in sets:
        for sentence in iaa_set.sentences:
            mm = sentence.max_min
            if mm >= min_mm:
                rows.append(
                    {
                        "set_id": iaa_set.set_id,
                        "sentence_id": sentence.sentence_id,
                        "text": sentence.text,
                        "labels": dict(sentence.labels),
                        "ul": sentence.ul,
                        "max_min": mm,
                    }
                )
    rows.sort(key=lambda r: (-r["max_min"], r["set_id"], r["sentence_id"]))
    return rows[:limit] if limit is not None else rows


def render_granularity_table(table: dict, title: str = "") -> str:
    lines = [title] if title else []
    lines.append("            19 Level   7 Level   5 Level   3 Level")
    rows = (
        ("Distance", "distance", "{:.2f}"),
        ("Relative", "relative", "{:.1%}"),
        ("Acc", "acc", "{:.1%}"),
        ("+/-1 Acc", "adjacent_acc", "{:.1%}"),
    )
    for label, key, fmt in rows:
        cells = [fmt.format(table[g][key]) for g in (19, 7, 5, 3)]
        lines.append(f"{label:<10}" + "".join(f"{c:>10}" for c in cells))
    return "\n".join(lines)
