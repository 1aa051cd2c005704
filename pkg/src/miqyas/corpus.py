"""Corpus data model, ingestion, document-level splitting, and statistics.

Canonical storage is line-delimited JSON: one file of document records and
one of sentence records. Third-party distributions come in through
adapters. Ingestion never drops anything silently: every anomaly lands in
the validation report, and only strict mode turns them fatal.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .levels import GranularityMap, LevelParseError, parse_level
from .metrics import MetricReport, metric_report
from .text import count_words

DOMAINS = ("Arts & Humanities", "Social Sciences", "STEM")
READERSHIPS = ("Foundational", "Advanced", "Specialized")
SPLITS = ("train", "dev", "test")
FLAG_KINDS = ("spelling_error", "colloquial", "sensitive", "other")


class IngestError(ValueError):
    pass


@dataclass
class DocumentRecord:
    doc_id: str
    source: str = ""
    domain: str = "Arts & Humanities"
    readership: str = "Advanced"
    split: str = "unassigned"
    preassigned: bool = False

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "source": self.source,
            "domain": self.domain,
            "readership": self.readership,
            "split": self.split,
            "preassigned": self.preassigned,
        }


@dataclass
class SentenceRecord:
    sentence_id: str
    doc_id: str
    text: str
    word_count: int = 0
    level: int | None = None
    annotator_labels: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)
    split: str = "unassigned"
    iaa_distributed: bool = False
    excluded: bool = False
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "sentence_id": self.sentence_id,
            "doc_id": self.doc_id,
            "text": self.text,
            "word_count": self.word_count,
            "level": self.level,
            "annotator_labels": dict(self.annotator_labels),
            "flags": list(self.flags),
            "split": self.split,
            "iaa_distributed": self.iaa_distributed,
            "excluded": self.excluded,
            "note": self.note,
        }


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    documents: int = 0
    sentences: int = 0

    def add_error(self, where, message):
        self.errors.append(f"{where}: {message}")

    def add_warning(self, where, message):
        self.warnings.append(f"{where}: {message}")

    def summary(self) -> str:
        return (
            f"{self.documents} documents, {self.sentences} sentences; "
            f"{len(self.errors)} errors, {len(self.warnings)} warnings"
        )


class Corpus:
    """In-memory corpus handle. Mutation is limited to split assignment."""

    def __init__(self):
        self.documents: dict = {}
        self.sentences: dict = {}

    def add_document(self, doc: DocumentRecord):
        self.documents[doc.doc_id] = doc

    def add_sentence(self, sentence: SentenceRecord):
        self.sentences[sentence.sentence_id] = sentence

    def doc_word_count(self, doc_id: str) -> int:
        return sum(
            s.word_count for s in self.sentences.values() if s.doc_id == doc_id
        )

    def split_sentences(self, split: str) -> list:
        return [s for s in self.sentences.values() if s.split == split]

    def gold_sentences(self, split=None) -> list:
        return [
            s
            for s in self.sentences.values()
            if s.level is not None and not s.excluded
            and (split is None or s.split == split)
        ]


def _canonical_documents(lines, report):
    for lineno, line in lines:
        try:
            raw = json.loads(line)
            yield DocumentRecord(
                doc_id=str(raw["doc_id"]),
                source=raw.get("source", ""),
                domain=raw.get("domain", "Arts & Humanities"),
                readership=raw.get("readership", "Advanced"),
                split=raw.get("split", "unassigned"),
                preassigned=bool(raw.get("preassigned", False)),
            ), lineno
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            report.add_error(f"documents line {lineno}", f"unparseable record: {exc}")


def _canonical_sentences(lines, report):
    for lineno, line in lines:
        try:
            raw = json.loads(line)
            yield raw, lineno
        except json.JSONDecodeError as exc:
            report.add_error(f"sentences line {lineno}", f"unparseable record: {exc}")


def _tsv_sentences(lines, report, columns):
    """Adapter for tab-separated distributions.

    Column names are configurable because the exact released layout is
    external data; defaults follow the documented release description.
    """
    header = None
    for lineno, line in lines:
        parts = line.rstrip("\n").split("\t")
        if header is None:
            header = parts
            continue
        if len(parts) != len(header):
            report.add_error(f"sentences line {lineno}", "column count mismatch")
            continue
        row = dict(zip(header, parts))
        try:
            raw = {
                "sentence_id": row[columns["sentence_id"]],
                "doc_id": row.get(columns["doc_id"], ""),
                "text": row[columns["text"]],
                "level": row[columns["level"]],
            }
            if columns.get("split") and columns["split"] in row:
                raw["split"] = row[columns["split"]].lower()
        except KeyError as exc:
            report.add_error(f"sentences line {lineno}", f"missing column {exc}")
            continue
        yield raw, lineno


DEFAULT_TSV_COLUMNS = {
    "sentence_id": "ID",
    "doc_id": "Document",
    "text": "Sentence",
    "level": "Readability_Level_19",
    "split": "Split",
}


def ingest(sentence_lines, document_lines=None, adapter: str = "canonical",
           strict: bool = False, tsv_columns=None):
    """Load a corpus from record streams; returns (corpus, validation report).

    ``sentence_lines`` / ``document_lines`` are iterables of text lines.
    Duplicates, invalid levels, and word-count mismatches are reported,
    never silently dropped; strict mode raises if anything was reported.
    """
    report = ValidationReport()
    corpus = Corpus()

    if document_lines is not None:
        numbered = ((i, ln) for i, ln in enumerate(document_lines, 1) if ln.strip())
        for doc, lineno in _canonical_documents(numbered, report):
            if doc.doc_id in corpus.documents:
                report.add_warning(f"documents line {lineno}", f"duplicate doc_id {doc.doc_id}")
            if doc.domain not in DOMAINS:
                report.add_warning(f"documents line {lineno}", f"unknown domain {doc.domain!r}")
            if doc.readership not in READERSHIPS:
                report.add_warning(
                    f"documents line {lineno}", f"unknown readership {doc.readership!r}"
                )
            corpus.add_document(doc)

    numbered = ((i, ln) for i, ln in enumerate(sentence_lines, 1) if ln.strip())
    if adapter == "canonical":
        rows = _canonical_sentences(numbered, report)
    elif adapter == "tsv":
        rows = _tsv_sentences(numbered, report, tsv_columns or DEFAULT_TSV_COLUMNS)
    else:
        raise IngestError(f"unknown adapter: {adapter!r}")

    for raw, lineno in rows:
        where = f"sentences line {lineno}"
        try:
            sentence_id = str(raw["sentence_id"])
            text = raw["text"]
        except KeyError as exc:
            report.add_error(where, f"missing field {exc}")
            continue
        if sentence_id in corpus.sentences:
            report.add_warning(where, f"duplicate sentence_id {sentence_id}")

        level = None
        if raw.get("level") not in (None, ""):
            try:
                level = parse_level(raw["level"]).index
            except LevelParseError as exc:
                report.add_error(where, str(exc))

        derived = count_words(text)
        if "word_count" in raw and raw["word_count"] not in (None, ""):
            stored = int(raw["word_count"])
            if stored != derived:
                report.add_warning(
                    where, f"stored word count {stored} != derived {derived}"
                )

        doc_id = str(raw.get("doc_id") or "")
        if doc_id and corpus.documents and doc_id not in corpus.documents:
            report.add_warning(where, f"unknown doc_id {doc_id}")
        if doc_id and doc_id not in corpus.documents:
            corpus.add_document(DocumentRecord(doc_id=doc_id))

        flags = list(raw.get("flags", ()))
        excluded = bool(raw.get("excluded", False)) or (bool(flags) and level is None)
        labels = {}
        for annotator, value in (raw.get("annotator_labels") or {}).items():
            try:
                labels[str(annotator)] = parse_level(value).index
            except LevelParseError as exc:
                report.add_error(where, f"annotator {annotator}: {exc}")

        corpus.add_sentence(
            SentenceRecord(
                sentence_id=sentence_id,
                doc_id=doc_id,
                text=text,
                word_count=derived,
                level=level,
                annotator_labels=labels,
                flags=flags,
                split=raw.get("split", "unassigned"),
                iaa_distributed=bool(raw.get("iaa_distributed", False)),
                excluded=excluded,
                note=raw.get("note", ""),
            )
        )

    report.documents = len(corpus.documents)
    report.sentences = len(corpus.sentences)
    if strict and (report.errors or report.warnings):
        raise IngestError(
            "strict ingest failed:\n" + "\n".join(report.errors + report.warnings)
        )
    return corpus, report


def load_corpus(directory, strict: bool = False):
    """Read a canonical corpus directory (documents.jsonl + sentences.jsonl)."""
    directory = Path(directory)
    doc_path = directory / "documents.jsonl"
    sent_path = directory / "sentences.jsonl"
    document_lines = doc_path.read_text(encoding="utf-8").splitlines() if doc_path.exists() else None
    sentence_lines = sent_path.read_text(encoding="utf-8").splitlines()
    return ingest(sentence_lines, document_lines, strict=strict)


def save_corpus(corpus: Corpus, directory):
    """Write the canonical files; output is sorted for stable diffs."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / "documents.jsonl", "w", encoding="utf-8") as handle:
        for doc_id in sorted(corpus.documents):
            handle.write(json.dumps(corpus.documents[doc_id].to_dict(),
                                    ensure_ascii=False, sort_keys=True) + "\n")
    with open(directory / "sentences.jsonl", "w", encoding="utf-8") as handle:
        for sentence_id in sorted(corpus.sentences):
            handle.write(json.dumps(corpus.sentences[sentence_id].to_dict(),
                                    ensure_ascii=False, sort_keys=True) + "\n")


def split_documents(corpus: Corpus, proportions=(0.8, 0.1, 0.1),
                    preassignments=None, seed: int = 0) -> dict:
    """Assign every document to train/dev/test at the document level.

    Preassigned documents are untouched. The rest are shuffled under the
    seed (after an id sort, so input order is irrelevant) and greedily
    placed in whichever split has the largest remaining word-count deficit
    against its target proportion.
    """
    if abs(sum(proportions) - 1.0) > 1e-9:
        raise IngestError(f"proportions must sum to 1, got {proportions}")
    preassignments = dict(preassignments or {})
    for doc_id in preassignments:
        if doc_id not in corpus.documents:
            raise IngestError(f"preassignment references unknown document {doc_id}")

    assignment = {}
    for doc_id, doc in corpus.documents.items():
        if doc_id in preassignments:
            assignment[doc_id] = preassignments[doc_id]
        elif doc.preassigned and doc.split in SPLITS:
            assignment[doc_id] = doc.split

    weights = {doc_id: max(1, corpus.doc_word_count(doc_id)) for doc_id in corpus.documents}
    total = sum(weights.values())
    filled = {split: 0.0 for split in SPLITS}
    for doc_id, split in assignment.items():
        filled[split] += weights[doc_id]

    remaining = sorted(d for d in corpus.documents if d not in assignment)
    rng = random.Random(seed)
    rng.shuffle(remaining)
    targets = dict(zip(SPLITS, proportions))
    for doc_id in remaining:
        deficits = {s: targets[s] * total - filled[s] for s in SPLITS}
        best = max(SPLITS, key=lambda s: deficits[s])  # ties go to train first
        assignment[doc_id] = best
        filled[best] += weights[doc_id]

    return assignment


def apply_split(corpus: Corpus, assignment: dict):
    """Write the assignment onto documents and their non-IAA sentences."""
    for doc_id, split in assignment.items():
        corpus.documents[doc_id].split = split
    for sentence in corpus.sentences.values():
        if sentence.iaa_distributed:
            continue
        if sentence.doc_id in assignment:
            sentence.split = assignment[sentence.doc_id]


@dataclass
class CorpusStats:
    level_counts: dict  # level -> {"all": n, "train": n, "dev": n, "test": n}
    breakdown: dict  # (domain, readership) -> {"documents","sentences","words"}
    mean_words_per_level: dict
    pearson_r: float | None
    totals: dict

    def render_levels(self) -> str:
        lines = ["Level        All   Train     Dev    Test"]
        for level in sorted(self.level_counts):
            c = self.level_counts[level]
            lines.append(
                f"{level:>2}      {c['all']:>8}{c.get('train', 0):>8}"
                f"{c.get('dev', 0):>8}{c.get('test', 0):>8}"
            )
        t = self.totals
        lines.append(
            f"Total   {t['sentences']:>8}{t.get('train', 0):>8}"
            f"{t.get('dev', 0):>8}{t.get('test', 0):>8}"
        )
        return "\n".join(lines)


def stats(corpus: Corpus) -> CorpusStats:
    """Distribution and correlation report over the gold sentences."""
    gold = corpus.gold_sentences()
    if not gold:
        raise IngestError("corpus has no gold-leveled sentences")

    level_counts = {}
    for sentence in gold:
        entry = level_counts.setdefault(sentence.level, {"all": 0})
        entry["all"] += 1
        if sentence.split in SPLITS:
            entry[sentence.split] = entry.get(sentence.split, 0) + 1

    breakdown = {}
    seen_docs = set()
    for sentence in gold:
        doc = corpus.documents.get(sentence.doc_id)
        key = (doc.domain, doc.readership) if doc else ("?", "?")
        entry = breakdown.setdefault(key, {"documents": 0, "sentences": 0, "words": 0})
        entry["sentences"] += 1
        entry["words"] += sentence.word_count
        if sentence.doc_id not in seen_docs:
            seen_docs.add(sentence.doc_id)
            entry["documents"] += 1

    by_level = {}
    for sentence in gold:
        by_level.setdefault(sentence.level, []).append(sentence.word_count)
    mean_words = {level: float(np.mean(counts)) for level, counts in by_level.items()}

    levels = [s.level for s in gold]
    words = [s.word_count for s in gold]
    pearson = None
    if len(gold) >= 2 and len(set(levels)) > 1 and len(set(words)) > 1:
        pearson = float(np.corrcoef(levels, words)[0, 1])

    totals = {
        "documents": len({s.doc_id for s in gold}),
        "sentences": len(gold),
        "words": sum(words),
    }
    for split in SPLITS:
        totals[split] = sum(1 for s in gold if s.split == split)
    return CorpusStats(
        level_counts=level_counts,
        breakdown=breakdown,
        mean_words_per_level=mean_words,
        pearson_r=pearson,
        totals=totals,
    )


def read_predictions(lines) -> dict:
    """Parse a prediction file: tab-separated sentence id and level per line."""
    predictions = {}
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise IngestError(f"predictions line {lineno}: expected 'id<TAB>level'")
        predictions[parts[0]] = parse_level(parts[1]).index
    return predictions


def score_predictions(corpus: Corpus, split: str, predictions: dict,
                      gmap: GranularityMap, lenient: bool = False):
    """Score a prediction set against the gold labels of one split.

    Returns (MetricReport, issues). Missing or extra ids are always listed;
    without lenient mode they are fatal.
    """
    gold = {s.sentence_id: s.level for s in corpus.gold_sentences(split)}
    if not gold:
        raise IngestError(f"split {split!r} has no gold sentences")
    missing = sorted(set(gold) - set(predictions))
    extra = sorted(set(predictions) - set(gold))
    issues = {"missing": missing, "extra": extra}
    if (missing or extra) and not lenient:
        raise IngestError(
            f"prediction ids do not cover split {split!r}: "
            f"{len(missing)} missing, {len(extra)} extra"
        )
    ids = sorted(set(gold) & set(predictions))
    if not ids:
        raise IngestError("no overlapping sentence ids to score")
    ref = [gold[i] for i in ids]
    hyp = [predictions[i] for i in ids]
    return metric_report(ref, hyp, gmap), issues
