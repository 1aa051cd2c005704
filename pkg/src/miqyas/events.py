"""Event-sourced annotation workflow state.

Every workflow action (batch creation, annotation submission, unification)
is an event appended to a log; the store's state is a pure fold over that
log, so replaying it reproduces the state and the official export
bit-exactly. Concurrency control is optimistic per (sentence, annotator)
via version counters; an open unification round takes an advisory lock on
its sentences.
"""

from __future__ import annotations

import json
import random
import threading
from datetime import datetime, timezone
from pathlib import Path

from .corpus import Corpus
from .guidelines import GuidelineProfile, LevelJudgment, validate_choice
from .iaa import average_label, unification_record, IaaSentence
from .levels import GranularityMap, ReadabilityLevel
from .text import detect_features

DEFAULT_BATCH_SIZE = 100


class WorkflowError(ValueError):
    """Invalid workflow operation (bad batch, pool exhausted, bad round)."""


class UnknownRoundError(WorkflowError):
    """Round id does not exist (stale client view)."""


class AuthorizationError(WorkflowError):
    """Sentence not open for this annotator."""


class ConflictError(WorkflowError):
    """Optimistic concurrency conflict; carries the latest stored event."""

    def __init__(self, message: str, latest=None):
        super().__init__(message)
        self.latest = latest


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat()


class EventLog:
    """Append-only JSONL event log, optionally file-backed."""

    def __init__(self, path=None):
        self.path = Path(path) if path else None
        self.events: list = []
        if self.path and self.path.exists():
            for line in self.path.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    self.events.append(json.loads(line))

    def append(self, event: dict) -> dict:
        event = dict(event, seq=len(self.events) + 1)
        self.events.append(event)
        if self.path:
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(json.dumps(event, ensure_ascii=False, sort_keys=True) + "\n")
        return event

    def __iter__(self):
        return iter(self.events)

    def __len__(self):
        return len(self.events)


class AnnotationStore:
    """Workflow engine over a corpus, a guideline profile, and a level map."""

    def __init__(self, corpus: Corpus, profile: GuidelineProfile,
                 gmap: GranularityMap, log: EventLog | None = None, clock=_utcnow):
        self.corpus = corpus
        self.profile = profile
        self.gmap = gmap
        self.log = log if log is not None else EventLog()
        self.clock = clock
        self.lock = threading.RLock()

        self.batches: dict = {}
        self.reservations: dict = {}  # sentence_id -> batch_id while the batch is open
        self.annotations: dict = {}  # sentence_id -> {annotator: [event, ...]}
        self.rounds: dict = {}
        self.round_locks: dict = {}  # sentence_id -> round_id while the round is open
        self.unified: dict = {}  # sentence_id -> ul event

        for event in self.log:
            self._apply(event)

    # -- state fold ---------------------------------------------------------

    def _apply(self, event: dict):
        kind = event["type"]
        if kind == "batch_created":
            self.batches[event["batch_id"]] = {
                "batch_id": event["batch_id"],
                "annotator": event["annotator"],
                "sentence_ids": list(event["sentence_ids"]),
                "status": "open",
                "created": event["ts"],
                "submitted": None,
            }
            for sentence_id in event["sentence_ids"]:
                self.reservations[sentence_id] = event["batch_id"]
        elif kind == "batch_submitted":
            batch = self.batches[event["batch_id"]]
            batch["status"] = "submitted"
            batch["submitted"] = event["ts"]
            for sentence_id in batch["sentence_ids"]:
                if self.reservations.get(sentence_id) == batch["batch_id"]:
                    del self.reservations[sentence_id]
        elif kind == "annotation":
            per_sentence = self.annotations.setdefault(event["sentence_id"], {})
            per_sentence.setdefault(event["annotator"], []).append(event)
        elif kind == "unification_opened":
            self.rounds[event["round_id"]] = {
                "round_id": event["round_id"],
                "sentence_ids": list(event["sentence_ids"]),
                "annotators": list(event["annotators"]),
                "status": "open",
                "ul": {},
            }
            for sentence_id in event["sentence_ids"]:
                self.round_locks[sentence_id] = event["round_id"]
        elif kind == "ul_recorded":
            round_state = self.rounds[event["round_id"]]
            round_state["ul"][event["sentence_id"]] = event
            self.unified[event["sentence_id"]] = event
        else:
            raise WorkflowError(f"unknown event type in log: {kind!r}")

    def _emit(self, event: dict) -> dict:
        stored = self.log.append(dict(event, ts=self.clock()))
        self._apply(stored)
        return stored

    # -- queries ------------------------------------------------------------

    def current_version(self, sentence_id: str, annotator: str) -> int:
        return len(self.annotations.get(sentence_id, {}).get(annotator, []))

    def latest_annotation(self, sentence_id: str, annotator: str):
        events = self.annotations.get(sentence_id, {}).get(annotator, [])
        return events[-1] if events else None

    def current_labels(self, sentence_id: str) -> dict:
        """Latest non-flag-only level per annotator."""
        labels = {}
        for annotator, events in self.annotations.get(sentence_id, {}).items():
            level = events[-1].get("level")
            if level is not None:
                labels[annotator] = level
        return labels

    def annotator_batches(self, annotator: str) -> list:
        return [b for b in self.batches.values() if b["annotator"] == annotator]

    def pool(self, annotator: str, include_annotated: bool = False) -> list:
        """Sentence ids still open for assignment to this annotator."""
        ids = []
        for sentence in self.corpus.sentences.values():
            sid = sentence.sentence_id
            if sentence.excluded or sentence.level is not None:
                continue
            if sid in self.reservations or sid in self.round_locks or sid in self.unified:
                continue
            per_sentence = self.annotations.get(sid, {})
            if annotator in per_sentence:
                continue
            if per_sentence and not include_annotated:
                continue
            ids.append(sid)
        return sorted(ids)

    # -- operations ---------------------------------------------------------

    def create_batch(self, annotator: str, size: int = DEFAULT_BATCH_SIZE,
                     seed: int | None = None, allow_partial: bool = False,
                     include_annotated: bool = False) -> dict:
        with self.lock:
            pool = self.pool(annotator, include_annotated=include_annotated)
            if not pool or (len(pool) < size and not allow_partial):
                raise WorkflowError(
                    f"pool has {len(pool)} sentences, need {size} "
                    f"(pass allow_partial to take a short batch)"
                )
            take = min(size, len(pool))
            rng = random.Random(seed)
            chosen = sorted(rng.sample(pool, take))
            batch_id = f"batch-{len(self.batches) + 1:05d}"
            event = self._emit({
                "type": "batch_created",
                "batch_id": batch_id,
                "annotator": annotator,
                "sentence_ids": chosen,
                "seed": seed,
                "size": take,
            })
            return self.batches[event["batch_id"]]

    def submit_batch(self, batch_id: str) -> dict:
        with self.lock:
            batch = self.batches.get(batch_id)
            if batch is None:
                raise WorkflowError(f"unknown batch {batch_id}")
            if batch["status"] != "open":
                raise WorkflowError(f"batch {batch_id} is not open")
            self._emit({"type": "batch_submitted", "batch_id": batch_id})
            return self.batches[batch_id]

    def submit_annotation(self, sentence_id: str, annotator: str, version: int,
                          level=None, asserted_features=(), flags=(),
                          note: str = "") -> tuple:
        """Store one annotation event; returns (event, judgment feedback).

        ``version`` must be exactly one past the annotator's latest stored
        version for the sentence, else a ConflictError carrying the latest
        event is raised. A flag-only event (level None, flags set) marks the
        sentence excluded-pending-review.
        """
        with self.lock:
            sentence = self.corpus.sentences.get(sentence_id)
            if sentence is None:
                raise WorkflowError(f"unknown sentence {sentence_id}")
            batch_id = self.reservations.get(sentence_id)
            batch = self.batches.get(batch_id) if batch_id else None
            if batch is None or batch["annotator"] != annotator:
                raise AuthorizationError(
                    f"sentence {sentence_id} is not in an open batch of {annotator}"
                )
            if sentence_id in self.round_locks:
                raise ConflictError(
                    f"sentence {sentence_id} is locked by unification round "
                    f"{self.round_locks[sentence_id]}"
                )
            current = self.current_version(sentence_id, annotator)
            if version != current + 1:
                raise ConflictError(
                    f"stale version {version} for {sentence_id}/{annotator}, "
                    f"current is {current}",
                    latest=self.latest_annotation(sentence_id, annotator),
                )
            if level is None and not flags:
                raise WorkflowError("an annotation needs a level or at least one flag")

            level_index = None
            judgment = None
            features = detect_features(sentence.text, self.profile.detectors)
            features.asserted_features |= set(asserted_features)
            if level is not None:
                level_index = level.index if isinstance(level, ReadabilityLevel) else int(level)
                judgment = validate_choice(level_index, features, self.profile)

            event = self._emit({
                "type": "annotation",
                "sentence_id": sentence_id,
                "annotator": annotator,
                "batch_id": batch_id,
                "level": level_index,
                "asserted_features": sorted(set(asserted_features)),
                "flags": sorted(set(flags)),
                "note": note,
                "version": version,
            })
            return event, judgment, features.word_count

    def open_unification(self, sentence_ids, annotators) -> dict:
        with self.lock:
            sentence_ids = sorted(set(sentence_ids))
            for sentence_id in sentence_ids:
                if sentence_id in self.round_locks:
                    raise ConflictError(
                        f"sentence {sentence_id} already in open round "
                        f"{self.round_locks[sentence_id]}"
                    )
                labels = self.current_labels(sentence_id)
                if len(labels) < 2:
                    raise WorkflowError(
                        f"sentence {sentence_id} has {len(labels)} labels; "
                        f"unification needs at least two"
                    )
            round_id = f"round-{len(self.rounds) + 1:05d}"
            self._emit({
                "type": "unification_opened",
                "round_id": round_id,
                "sentence_ids": sentence_ids,
                "annotators": sorted(set(annotators)),
            })
            return self.round_view(round_id)

    def round_view(self, round_id: str) -> dict:
        round_state = self.rounds.get(round_id)
        if round_state is None:
            raise UnknownRoundError(f"unknown round {round_id}")
        sentences = []
        for sentence_id in round_state["sentence_ids"]:
            labels = self.current_labels(sentence_id)
            values = list(labels.values())
            sentences.append({
                "sentence_id": sentence_id,
                "text": self.corpus.sentences[sentence_id].text,
                "labels": labels,
                "max_min": max(values) - min(values) if values else 0,
                "al_suggestion": average_label(values).index if values else None,
                "ul": round_state["ul"].get(sentence_id, {}).get("ul"),
            })
        return {
            "round_id": round_id,
            "status": round_state["status"],
            "annotators": round_state["annotators"],
            "sentences": sentences,
        }

    def record_ul(self, round_id: str, sentence_id: str, ul, rationale: str = ""):
        """Store a unified label; out-of-range ULs require a rationale."""
        with self.lock:
            round_state = self.rounds.get(round_id)
            if round_state is None:
                raise UnknownRoundError(f"unknown round {round_id}")
            if sentence_id not in round_state["sentence_ids"]:
                raise WorkflowError(
                    f"sentence {sentence_id} is not part of round {round_id}"
                )
            ul_index = ul.index if isinstance(ul, ReadabilityLevel) else int(ul)
            ReadabilityLevel(ul_index)  # range check
            labels = self.current_labels(sentence_id)
            within = min(labels.values()) <= ul_index <= max(labels.values())
            if not within and not rationale.strip():
                raise WorkflowError(
                    f"UL {ul_index} is outside the max-min range "
                    f"[{min(labels.values())}, {max(labels.values())}]; "
                    f"a rationale is required"
                )
            self._emit({
                "type": "ul_recorded",
                "round_id": round_id,
                "sentence_id": sentence_id,
                "ul": ul_index,
                "rationale": rationale,
            })
            record = unification_record(
                IaaSentence(sentence_id=sentence_id, labels=labels, ul=ul_index)
            )
            return record

    # -- export and determinism ----------------------------------------------

    def official_labels(self) -> dict:
        """sentence_id -> (level, status) for unified or single-pass labels."""
        official = {}
        for sentence_id, event in self.unified.items():
            official[sentence_id] = (event["ul"], "unified")
        for sentence_id, per_annotator in self.annotations.items():
            if sentence_id in official:
                continue
            latest = {a: evs[-1] for a, evs in per_annotator.items()}
            labeled = {a: e for a, e in latest.items() if e.get("level") is not None}
            if len(labeled) != 1 or len(latest) != 1:
                continue  # multi-annotated sentences need unification
            (event,) = labeled.values()
            if event.get("flags"):
                continue
            batch = self.batches.get(event.get("batch_id"))
            if batch and batch["status"] == "submitted":
                official[sentence_id] = (event["level"], "single_pass")
        return official

    def export_records(self, split: str | None = None, status: str | None = None) -> list:
        official = self.official_labels()
        records = []
        for sentence_id in sorted(official):
            level, label_status = official[sentence_id]
            sentence = self.corpus.sentences[sentence_id]
            if split and sentence.split != split:
                continue
            if status and label_status != status:
                continue
            records.append({
                "sentence_id": sentence_id,
                "doc_id": sentence.doc_id,
                "text": sentence.text,
                "level": level,
                "status": label_status,
                "split": sentence.split,
            })
        return records

    def export_bytes(self, split: str | None = None, status: str | None = None) -> bytes:
        lines = [
            json.dumps(r, ensure_ascii=False, sort_keys=True)
            for r in self.export_records(split, status)
        ]
        return ("\n".join(lines) + "\n").encode("utf-8") if lines else b""

    def state_snapshot(self) -> str:
        """Canonical JSON of the folded state, for replay comparisons."""
        state = {
            "batches": self.batches,
            "reservations": self.reservations,
            "annotations": self.annotations,
            "rounds": self.rounds,
            "round_locks": self.round_locks,
            "unified": self.unified,
        }
        return json.dumps(state, ensure_ascii=False, sort_keys=True)

    @classmethod
    def replay(cls, corpus: Corpus, profile: GuidelineProfile, gmap: GranularityMap,
               log_path) -> "AnnotationStore":
        """Rebuild a store purely from a stored event log."""
        return cls(corpus, profile, gmap, log=EventLog(log_path))
