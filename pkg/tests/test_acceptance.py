"""Acceptance suite: one test per exit criterion, one printed line each.

Run with ``pytest tests/test_acceptance.py -v -s``. The two criteria that
need the released real-world data (full corpus counts, multi-annotator
agreement numbers) look for it under $MIQYAS_RELEASE_DIR and fall back to
the bundled synthetic fixtures / property suites when it is absent.
"""

import json
import os
import random
import time
from pathlib import Path

import numpy as np
import pytest

from miqyas import corpus as C
from miqyas import iaa as I
from miqyas import metrics as M
from miqyas.events import AnnotationStore, EventLog
from miqyas.guidelines import compute_floor, load_profile
from miqyas.levels import load_granularity_map
from miqyas.text import count_syllables, detect_features

from oracles import (
    oracle_accuracy,
    oracle_adjacent_accuracy,
    oracle_avg_distance,
    oracle_qwk,
)

RELEASE_DIR = os.environ.get("MIQYAS_RELEASE_DIR")


def report(name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"[{status}] {name}{suffix}")
    assert ok, f"{name}{suffix}"


def test_metric_oracle_equivalence(gmap):
    rng = random.Random(20240712)
    started = time.perf_counter()
    checked = 0
    worst = 0.0
    for _ in range(250):
        k = rng.choice((3, 5, 7, 19))
        n = rng.randint(1, 50)
        ref = [rng.randint(1, k) for _ in range(n)]
        hyp = [rng.randint(1, k) for _ in range(n)]
        diffs = [
            abs(M.accuracy(ref, hyp) - oracle_accuracy(ref, hyp)),
            abs(M.adjacent_accuracy(ref, hyp) - oracle_adjacent_accuracy(ref, hyp)),
            abs(M.qwk(ref, hyp, k) - oracle_qwk(ref, hyp, k)),
        ]
        distance, relative = M.avg_distance(ref, hyp, k)
        odistance, orelative = oracle_avg_distance(ref, hyp, k)
        diffs += [abs(distance - odistance), abs(relative - orelative)]
        worst = max(worst, *diffs)
        checked += 1
    elapsed = time.perf_counter() - started
    report(
        "metric oracle equivalence",
        checked >= 200 and worst <= 1e-9 and elapsed < 5.0,
        f"{checked} pairs, max |delta| {worst:.2e}, {elapsed:.2f}s",
    )


def test_relative_distance_table_reproduction():
    published = ((0.95, 19, 5.0), (0.39, 7, 5.5), (0.30, 5, 6.0), (0.23, 3, 7.5))
    deltas = []
    for distance, k, printed in published:
        series_relative = 100 * distance / k
        deltas.append(abs(series_relative - printed))
    report(
        "relative-to-range table reproduction",
        all(d <= 0.2 for d in deltas),
        "deltas " + ", ".join(f"{d:.2f}pp" for d in deltas),
    )


def test_granularity_anchors_and_invariants(gmap):
    anchor = (gmap.collapse(11, 7), gmap.collapse(11, 5), gmap.collapse(11, 3))
    ok = anchor == (4, 2, 1)
    for g in (19, 7, 5, 3):
        images = [gmap.collapse(level, g) for level in range(1, 20)]
        ok = ok and images == sorted(images) and set(images) == set(range(1, g + 1))
    report("granularity anchors + monotone/surjective", ok, f"11 -> {anchor}")


def test_guideline_worked_example(profile):
    features = detect_features("سُلوكي مَسْؤولِيَّتي", profile.detectors)
    judgment = compute_floor(features, profile)
    trace = [step.floor_after for step in judgment.trace]
    rabbit = count_syllables("أَرْنَبٌ", waqf=True)
    responsibility = count_syllables("مَسْؤولِيَّتي")
    ok = judgment.floor.index == 6 and trace == [2, 3, 6] \
        and rabbit == 2 and responsibility == 5
    report(
        "guideline worked example + syllable oracle",
        ok,
        f"floor {judgment.floor.index}, trace {trace}, syllables {rabbit}/{responsibility}",
    )


def _released_corpus_available():
    if not RELEASE_DIR:
        return None
    directory = Path(RELEASE_DIR) / "corpus"
    return directory if (directory / "sentences.jsonl").exists() else None


def test_corpus_reproduction(gmap, fixtures_dir):
    released = _released_corpus_available()
    if released:
        corpus, ingest_report = C.load_corpus(released)
        stats = C.stats(corpus)
        counts = {s: stats.totals[s] for s in ("train", "dev", "test")}
        ok = (
            ingest_report.sentences == 69441
            and ingest_report.documents == 1922
            and counts == {"train": 54845, "dev": 7310, "test": 7286}
            and stats.level_counts[12]["all"] == 14471
            and abs(stats.pearson_r - 0.81) <= 0.03
        )
        report("corpus reproduction (released data)", ok, str(counts))
        return

    fixture = fixtures_dir / "synthetic"
    expected = json.loads((fixture / "expected.json").read_text(encoding="utf-8"))
    corpus, ingest_report = C.load_corpus(fixture)
    ok = not ingest_report.errors and not ingest_report.warnings
    ok = ok and ingest_report.sentences == expected["sentences"]
    ok = ok and ingest_report.documents == expected["documents"]

    stats = C.stats(corpus)
    level_counts = {str(k): v["all"] for k, v in stats.level_counts.items()}
    ok = ok and level_counts == expected["level_counts"]
    ok = ok and stats.totals["words"] == expected["words"]
    ok = ok and abs(stats.pearson_r - expected["pearson_r"]) <= 1e-9

    preassigned = {d.doc_id: d.split for d in corpus.documents.values()
                   if d.preassigned and d.split in C.SPLITS}
    assignment = C.split_documents(corpus, (0.8, 0.1, 0.1),
                                   preassignments=preassigned,
                                   seed=expected["split_seed"])
    ok = ok and assignment == expected["assignment"]
    C.apply_split(corpus, assignment)
    split_counts = {
        s: sum(1 for x in corpus.sentences.values() if x.split == s) for s in C.SPLITS
    }
    ok = ok and split_counts == expected["split_sentences"]
    total_words = expected["words"]
    word_shares = {
        s: sum(x.word_count for x in corpus.sentences.values() if x.split == s) / total_words
        for s in C.SPLITS
    }
    for target, split in zip((0.8, 0.1, 0.1), C.SPLITS):
        ok = ok and abs(word_shares[split] - target) <= 0.02
    report(
        "corpus reproduction (synthetic fixture)",
        ok,
        f"500 sentences, splits {split_counts}, r={stats.pearson_r:.4f}",
    )


def _released_iaa_available():
    if not RELEASE_DIR:
        return None
    path = Path(RELEASE_DIR) / "iaa" / "sets.jsonl"
    return path if path.exists() else None


def test_iaa_reproduction(gmap):
    released = _released_iaa_available()
    if released:
        sets = I.load_iaa_sets(released)
        phase2 = [s for s in sets if s.phase in ("Phase 2A", "Phase 2B")]
        _, _, micro = I.phase_rollup(phase2, gmap)
        stats = I.unification_stats(phase2, gmap)
        ok = (
            abs(micro.distance - 0.95) <= 0.5 / 100 * 19  # distance printed raw
            and abs(micro.acc19 * 100 - 61.1) <= 0.5
            and abs(micro.adjacent_acc19 * 100 - 74.4) <= 0.5
            and abs(micro.qwk * 100 - 81.8) <= 0.5
            and abs(stats.within_range_rate * 100 - 99.2) <= 0.5
            and abs(stats.matches_annotator_rate * 100 - 86.8) <= 0.5
        )
        report("IAA reproduction (released data)", ok)
        return

    rng = random.Random(31)
    sets = []
    for s in range(100):
        iaa_set = I.IaaSet(set_id=f"synth-{s:03d}", phase="synthetic")
        for i in range(rng.randint(5, 15)):
            base = rng.randint(1, 19)
            labels = {
                f"a{j}": max(1, min(19, base + rng.choice((-2, -1, 0, 0, 0, 1, 2))))
                for j in range(1, rng.randint(3, 6))
            }
            values = sorted(labels.values())
            ul = rng.choice(values) if rng.random() < 0.9 else rng.randint(1, 19)
            iaa_set.sentences.append(
                I.IaaSentence(sentence_id=f"{s}-{i}", labels=labels, ul=ul)
            )
        sets.append(iaa_set.validate())

    ok = True
    for iaa_set in sets:
        for sentence in iaa_set.sentences:
            al = I.average_label(sentence.labels.values()).index
            values = sentence.labels.values()
            ok = ok and min(values) <= al <= max(values)

    stats = I.unification_stats(sets, gmap)
    ok = ok and 0.0 <= stats.within_range_rate <= 1.0
    ok = ok and 0.0 <= stats.matches_annotator_rate <= 1.0

    pooled = []
    summed = np.zeros((19, 19), dtype=np.int64)
    for iaa_set in sets:
        from itertools import combinations

        for first, second in combinations(iaa_set.annotators(), 2):
            ref, hyp = I.pair_series(iaa_set, first, second)
            if ref:
                pooled.append((ref, hyp))
                summed += M.confusion(ref, hyp, 19)
    micro = M.aggregate(pooled, "micro", gmap)
    from_sum, _ = M.qwk_from_confusion(summed)
    ok = ok and abs(micro.qwk - from_sum) <= 1e-12
    report(
        "IAA property suite (synthetic fallback)",
        ok,
        f"100 sets, micro QWK {micro.qwk:.4f} == summed-confusion QWK",
    )


def test_model_scoring_parity(gmap, fixtures_dir):
    fixture = fixtures_dir / "scoring"
    expected = json.loads((fixture / "expected.json").read_text(encoding="utf-8"))
    corpus, ingest_report = C.load_corpus(fixture)
    predictions = C.read_predictions(
        (fixture / "predictions.tsv").read_text(encoding="utf-8").splitlines()
    )
    scored, issues = C.score_predictions(corpus, "dev", predictions, gmap)
    columns = ("distance", "distance_relative", "acc19", "adjacent_acc19",
               "qwk", "acc7", "acc5", "acc3")
    deltas = {c: abs(getattr(scored, c) - expected[c]) for c in columns}
    ok = (not ingest_report.errors and scored.n == expected["n"]
          and not issues["missing"] and not issues["extra"]
          and all(d <= 1e-9 for d in deltas.values()))
    report(
        "model-scoring parity (20-sentence fixture)",
        ok,
        "max |delta| " + format(max(deltas.values()), ".2e"),
    )


def _drive_events(store, rng, target: int):
    """Generate a realistic mixed workload until the log holds `target` events."""
    annotators = ["a1", "a2", "a3", "a4", "a5"]
    while len(store.log) < target:
        remaining = target - len(store.log)
        annotator = rng.choice(annotators)
        size = min(10, max(1, remaining - 2))
        try:
            batch = store.create_batch(annotator, size=size, seed=rng.randint(0, 10**6),
                                       allow_partial=True,
                                       include_annotated=rng.random() < 0.3)
        except Exception:
            break
        for sid in batch["sentence_ids"]:
            if len(store.log) >= target:
                return
            if rng.random() < 0.08:
                store.submit_annotation(sid, annotator, 1, flags=["sensitive"])
            else:
                store.submit_annotation(sid, annotator, 1, level=rng.randint(1, 19))
            if rng.random() < 0.1 and len(store.log) < target:
                store.submit_annotation(sid, annotator, 2, level=rng.randint(1, 19))
        if len(store.log) < target:
            store.submit_batch(batch["batch_id"])
        # occasionally unify doubly-annotated sentences
        if rng.random() < 0.25 and len(store.log) < target:
            candidates = [
                sid for sid in store.annotations
                if len(store.current_labels(sid)) >= 2
                and sid not in store.round_locks and sid not in store.unified
                and sid not in store.reservations
            ]
            if candidates:
                chosen = sorted(rng.sample(candidates, min(4, len(candidates))))
                view = store.open_unification(chosen, annotators)
                for row in view["sentences"]:
                    if len(store.log) >= target:
                        return
                    values = sorted(row["labels"].values())
                    store.record_ul(view["round_id"], row["sentence_id"],
                                    rng.choice(values))


def _determinism_corpus():
    docs = [{"doc_id": f"d{i}", "domain": "STEM", "readership": "Advanced"}
            for i in range(10)]
    sents = [{"sentence_id": f"s{i:04d}", "doc_id": f"d{i % 10}",
              "text": "كلمة " * (i % 7 + 1)} for i in range(1500)]
    corpus, _ = C.ingest(
        [json.dumps(s, ensure_ascii=False) for s in sents],
        [json.dumps(d) for d in docs],
    )
    return corpus


def test_service_determinism(profile, gmap, tmp_path):
    log_path = tmp_path / "events.jsonl"
    ticker = iter(range(1, 10**7))
    store = AnnotationStore(_determinism_corpus(), profile, gmap,
                            log=EventLog(log_path),
                            clock=lambda: f"t{next(ticker):07d}")
    _drive_events(store, random.Random(77), target=1000)
    ok = len(store.log) == 1000

    replayed = AnnotationStore.replay(_determinism_corpus(), profile, gmap, log_path)
    ok = ok and replayed.state_snapshot() == store.state_snapshot()
    ok = ok and replayed.export_bytes() == store.export_bytes()
    # replaying a second time is still bit-identical
    again = AnnotationStore.replay(_determinism_corpus(), profile, gmap, log_path)
    ok = ok and again.export_bytes() == store.export_bytes()
    report(
        "service determinism (1000-event replay)",
        ok,
        f"{len(store.log)} events, export {len(store.export_bytes())} bytes",
    )
