import json

import pytest

from miqyas import corpus as C

from oracles import oracle_pearson


def jsonl(records):
    return [json.dumps(r, ensure_ascii=False) for r in records]


DOCS = [
    {"doc_id": "d1", "source": "src", "domain": "STEM", "readership": "Advanced"},
    {"doc_id": "d2", "source": "src", "domain": "Arts & Humanities",
     "readership": "Foundational"},
]

SENTS = [
    {"sentence_id": "s1", "doc_id": "d1", "text": "كتاب جديد", "level": 3},
    {"sentence_id": "s2", "doc_id": "d1", "text": "شمس و قمر و بحر", "level": 5},
    {"sentence_id": "s3", "doc_id": "d2", "text": "بيت", "level": 1},
]


def test_ingest_canonical_counts():
    corpus, report = C.ingest(jsonl(SENTS), jsonl(DOCS))
    assert report.sentences == 3
    assert report.documents == 2
    assert not report.errors and not report.warnings
    assert corpus.sentences["s1"].word_count == 2
    assert corpus.sentences["s2"].word_count == 5


def test_ingest_empty_stream():
    corpus, report = C.ingest([], [])
    assert report.sentences == 0 and report.documents == 0
    assert not report.errors


def test_ingest_reports_word_count_mismatch():
    rows = jsonl([dict(SENTS[0], word_count=9)])
    _, report = C.ingest(rows, jsonl(DOCS))
    assert any("word count" in w for w in report.warnings)


def test_ingest_reports_duplicates_and_bad_levels():
    rows = jsonl([SENTS[0], SENTS[0], dict(SENTS[1], level=42)])
    corpus, report = C.ingest(rows, jsonl(DOCS))
    assert any("duplicate" in w for w in report.warnings)
    assert any("42" in e for e in report.errors)
    # nothing silently dropped: the bad-level sentence is retained unleveled
    assert "s2" in corpus.sentences
    assert corpus.sentences["s2"].level is None


def test_ingest_strict_raises():
    rows = jsonl([SENTS[0], SENTS[0]])
    with pytest.raises(C.IngestError):
        C.ingest(rows, jsonl(DOCS), strict=True)


def test_ingest_unparseable_line_collected_with_lineno():
    rows = [json.dumps(SENTS[0]), "{broken", json.dumps(SENTS[2])]
    corpus, report = C.ingest(rows, jsonl(DOCS))
    assert any("line 2" in e for e in report.errors)
    assert len(corpus.sentences) == 2


def test_ingest_tsv_adapter():
    lines = [
        "ID\tDocument\tSentence\tReadability_Level_19\tSplit",
        "t1\td1\tكتاب جديد\t3\ttrain",
        "t2\td1\tبيت\t1-alif\tdev",
    ]
    corpus, report = C.ingest(lines, None, adapter="tsv")
    assert not report.errors
    assert corpus.sentences["t1"].level == 3
    assert corpus.sentences["t2"].level == 1
    assert corpus.sentences["t2"].split == "dev"


def test_flagged_sentences_without_level_are_excluded_but_kept():
    rows = jsonl([{"sentence_id": "f1", "doc_id": "d1", "text": "نص ملتبس",
                   "flags": ["colloquial"]}])
    corpus, report = C.ingest(rows, jsonl(DOCS))
    record = corpus.sentences["f1"]
    assert record.excluded and record.level is None
    assert record in list(corpus.sentences.values())
    assert not corpus.gold_sentences()


def test_roundtrip_canonical(tmp_path):
    corpus, _ = C.ingest(jsonl(SENTS), jsonl(DOCS))
    C.save_corpus(corpus, tmp_path)
    loaded, report = C.load_corpus(tmp_path)
    assert not report.errors
    assert {s.sentence_id for s in loaded.sentences.values()} == {"s1", "s2", "s3"}
    assert loaded.sentences["s2"].to_dict() == corpus.sentences["s2"].to_dict()
    # saving again produces identical bytes
    first = (tmp_path / "sentences.jsonl").read_bytes()
    C.save_corpus(loaded, tmp_path)
    assert (tmp_path / "sentences.jsonl").read_bytes() == first


def ten_doc_corpus():
    docs = [{"doc_id": f"d{i}", "domain": "STEM", "readership": "Advanced"}
            for i in range(10)]
    sents = []
    for i in range(10):
        for j in range(4):
            sents.append({"sentence_id": f"d{i}-s{j}", "doc_id": f"d{i}",
                          "text": "كلمة " * 5, "level": 5})
    corpus, _ = C.ingest(jsonl(sents), jsonl(docs))
    return corpus


def test_split_ten_equal_docs_exact():
    corpus = ten_doc_corpus()
    assignment = C.split_documents(corpus, (0.8, 0.1, 0.1), seed=13)
    counts = {s: 0 for s in C.SPLITS}
    for split in assignment.values():
        counts[split] += 1
    assert counts == {"train": 8, "dev": 1, "test": 1}
    assert set(assignment) == set(corpus.documents)


def test_split_is_deterministic_and_input_order_free():
    corpus = ten_doc_corpus()
    a = C.split_documents(corpus, seed=5)
    b = C.split_documents(corpus, seed=5)
    assert a == b
    c = C.split_documents(corpus, seed=6)
    assert any(a[d] != c[d] for d in a) or a == c  # different seed may differ


def test_split_respects_preassignments():
    corpus = ten_doc_corpus()
    pre = {"d0": "test", "d1": "dev"}
    assignment = C.split_documents(corpus, preassignments=pre, seed=1)
    assert assignment["d0"] == "test" and assignment["d1"] == "dev"
    all_pre = {f"d{i}": "train" for i in range(10)}
    assert C.split_documents(corpus, preassignments=all_pre) == all_pre


def test_split_unknown_preassignment_rejected():
    corpus = ten_doc_corpus()
    with pytest.raises(C.IngestError, match="unknown document"):
        C.split_documents(corpus, preassignments={"nope": "train"})


def test_split_partition_and_sentence_inheritance():
    corpus = ten_doc_corpus()
    corpus.sentences["d0-s0"].iaa_distributed = True
    corpus.sentences["d0-s0"].split = "dev"
    assignment = C.split_documents(corpus, seed=2)
    C.apply_split(corpus, assignment)
    for sentence in corpus.sentences.values():
        if sentence.iaa_distributed:
            assert sentence.split == "dev"
        else:
            assert sentence.split == assignment[sentence.doc_id]


def test_stats_counts_and_correlation():
    corpus, _ = C.ingest(jsonl(SENTS), jsonl(DOCS))
    result = C.stats(corpus)
    assert result.level_counts[3]["all"] == 1
    assert result.totals["sentences"] == 3
    levels = [3, 5, 1]
    words = [2, 5, 1]
    assert result.pearson_r == pytest.approx(oracle_pearson(levels, words))
    assert result.breakdown[("STEM", "Advanced")]["sentences"] == 2


def test_stats_single_sentence_correlation_undefined():
    corpus, _ = C.ingest(jsonl([SENTS[0]]), jsonl(DOCS))
    result = C.stats(corpus)
    assert result.pearson_r is None
    assert result.level_counts[3]["all"] == 1


def test_stats_permutation_invariant():
    forward, _ = C.ingest(jsonl(SENTS), jsonl(DOCS))
    backward, _ = C.ingest(jsonl(list(reversed(SENTS))), jsonl(DOCS))
    a, b = C.stats(forward), C.stats(backward)
    assert a.level_counts == b.level_counts
    assert a.totals == b.totals
    assert a.pearson_r == pytest.approx(b.pearson_r)


def test_score_predictions_identity(gmap):
    corpus, _ = C.ingest(jsonl(SENTS), jsonl(DOCS))
    for s in corpus.sentences.values():
        s.split = "dev"
    predictions = {"s1": 3, "s2": 5, "s3": 1}
    report, issues = C.score_predictions(corpus, "dev", predictions, gmap)
    assert report.distance == 0.0
    assert report.acc19 == report.acc7 == report.acc5 == report.acc3 == 1.0
    assert report.qwk == 1.0
    assert not issues["missing"] and not issues["extra"]


def test_score_predictions_majority_toy(gmap):
    docs = [{"doc_id": "d", "domain": "STEM", "readership": "Advanced"}]
    sents = [
        {"sentence_id": "a", "doc_id": "d", "text": "كلمة", "level": 5, "split": "dev"},
        {"sentence_id": "b", "doc_id": "d", "text": "كلمة", "level": 5, "split": "dev"},
        {"sentence_id": "c", "doc_id": "d", "text": "كلمة", "level": 9, "split": "dev"},
    ]
    corpus, _ = C.ingest(jsonl(sents), jsonl(docs))
    report, _ = C.score_predictions(corpus, "dev", {"a": 5, "b": 5, "c": 5}, gmap)
    # frozen from the direct-summation oracles
    assert report.distance == pytest.approx(4 / 3)
    assert report.acc19 == pytest.approx(2 / 3)
    assert report.adjacent_acc19 == pytest.approx(2 / 3)
    assert report.qwk == pytest.approx(0.0, abs=1e-12)
    assert report.acc7 == pytest.approx(2 / 3)
    assert report.acc5 == pytest.approx(1.0)
    assert report.acc3 == pytest.approx(1.0)


def test_score_predictions_coverage_errors(gmap):
    corpus, _ = C.ingest(jsonl(SENTS), jsonl(DOCS))
    for s in corpus.sentences.values():
        s.split = "dev"
    with pytest.raises(C.IngestError, match="missing"):
        C.score_predictions(corpus, "dev", {"s1": 3}, gmap)
    report, issues = C.score_predictions(
        corpus, "dev", {"s1": 3, "zz": 9}, gmap, lenient=True)
    assert issues["missing"] == ["s2", "s3"]
    assert issues["extra"] == ["zz"]
    assert report.n == 1


def test_read_predictions_format(tmp_path):
    path = tmp_path / "pred.tsv"
    path.write_text("s1\t3\ns2\t5-ha\n# comment\n", encoding="utf-8")
    predictions = C.read_predictions(path.read_text(encoding="utf-8").splitlines())
    assert predictions == {"s1": 3, "s2": 5}
    with pytest.raises(C.IngestError):
        C.read_predictions(["oops"])
