"""Command-line interface.

Thin wrappers over the core package: corpus ingestion/splitting/statistics,
batch guideline floors, prediction scoring, agreement reports, and the
annotation service.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import iaa as iaa_mod
from .guidelines import NotLevelableError, judge_sentence, judgments_to_jsonl, load_profile
from .levels import load_granularity_map
from .metrics import render_report_table


def _load_corpus(args):
    corpus, report = corpus_mod.load_corpus(args.corpus, strict=args.strict)
    if report.errors or report.warnings:
        for line in report.errors + report.warnings:
            print(f"[ingest] {line}", file=sys.stderr)
    return corpus


def cmd_ingest(args):
    sentences = Path(args.sentences).read_text(encoding="utf-8").splitlines()
    documents = (
        Path(args.documents).read_text(encoding="utf-8").splitlines()
        if args.documents else None
    )
    corpus, report = corpus_mod.ingest(
        sentences, documents, adapter=args.format, strict=args.strict
    )
    print(report.summary())
    for line in report.errors:
        print(f"error: {line}")
    for line in report.warnings:
        print(f"warning: {line}")
    if args.out:
        corpus_mod.save_corpus(corpus, args.out)
        print(f"wrote canonical corpus to {args.out}")
    return 1 if report.errors else 0


def cmd_split(args):
    corpus = _load_corpus(args)
    proportions = tuple(float(p) for p in args.proportions.split(","))
    preassignments = {
        d.doc_id: d.split
        for d in corpus.documents.values()
        if d.preassigned and d.split in corpus_mod.SPLITS
    }
    assignment = corpus_mod.split_documents(
        corpus, proportions=proportions, preassignments=preassignments, seed=args.seed
    )
    corpus_mod.apply_split(corpus, assignment)
    if args.apply:
        corpus_mod.save_corpus(corpus, args.corpus)
    counts = {s: 0 for s in corpus_mod.SPLITS}
    words = {s: 0 for s in corpus_mod.SPLITS}
    for sentence in corpus.sentences.values():
        if sentence.split in counts:
            counts[sentence.split] += 1
            words[sentence.split] += sentence.word_count
    for split in corpus_mod.SPLITS:
        print(f"{split}: {sum(1 for d in assignment.values() if d == split)} documents, "
              f"{counts[split]} sentences, {words[split]} words")
    return 0


def cmd_stats(args):
    corpus = _load_corpus(args)
    result = corpus_mod.stats(corpus)
    if args.json:
        payload = {
            "level_counts": {str(k): v for k, v in sorted(result.level_counts.items())},
            "totals": result.totals,
            "mean_words_per_level": {str(k): v for k, v in sorted(result.mean_words_per_level.items())},
            "pearson_r": result.pearson_r,
        }
        print(json.dumps(payload, ensure_ascii=False, indent=2))
    else:
        print(result.render_levels())
        r = result.pearson_r
        print(f"Pearson r(level, word count) = {r:.3f}" if r is not None
              else "Pearson r(level, word count) undefined")
    return 0


def cmd_floor(args):
    profile = load_profile(args.profile)
    judgments = []
    if args.text:
        texts = [("cli-text", args.text)]
    elif args.corpus:
        corpus = _load_corpus(args)
        texts = [(s.sentence_id, s.text) for s in corpus.sentences.values()]
    else:
        print("floor: need --corpus or --text", file=sys.stderr)
        return 2
    for sentence_id, text in texts:
        try:
            judgment = judge_sentence(text, profile)
        except NotLevelableError:
            print(f"{sentence_id}\tnot-levelable")
            continue
        judgments.append(judgment)
        steps = " -> ".join(str(s.floor_after) for s in judgment.trace)
        print(f"{sentence_id}\t{judgment.floor.name}\t{steps}")
    if args.jsonl and judgments:
        Path(args.jsonl).write_text(judgments_to_jsonl(judgments), encoding="utf-8")
    return 0


def cmd_score(args):
    corpus = _load_corpus(args)
    gmap = load_granularity_map(args.granularity_map)
    predictions = corpus_mod.read_predictions(
        Path(args.predictions).read_text(encoding="utf-8").splitlines()
    )
    report, issues = corpus_mod.score_predictions(
        corpus, args.split, predictions, gmap, lenient=args.lenient
    )
    for kind in ("missing", "extra"):
        for sentence_id in issues[kind]:
            print(f"{kind}: {sentence_id}", file=sys.stderr)
    if args.json:
        print(json.dumps({"split": args.split, **report.to_dict()}, indent=2))
    else:
        print(render_report_table({args.split: report}, title=f"n = {report.n}"))
    return 0


def cmd_iaa(args):
    gmap = load_granularity_map(args.granularity_map)
    sets = iaa_mod.load_iaa_sets(args.sets)
    set_reports, macro, micro = iaa_mod.phase_rollup(sets, gmap, strict=args.strict)
    try:
        ustats = iaa_mod.unification_stats(sets, gmap)
    except iaa_mod.IaaDataError:
        ustats = None

    if args.json:
        payload = {
            "sets": {k: v.to_dict() for k, v in sorted(set_reports.items())},
            "macro": macro.to_dict(),
            "micro": micro.to_dict(),
        }
        if ustats is not None:
            per_annotator, annotator_avg = iaa_mod.annotator_vs_ul(sets, gmap)
            payload["unification"] = {
                "within_range_rate": ustats.within_range_rate,
                "matches_annotator_rate": ustats.matches_annotator_rate,
                "skipped": ustats.skipped,
                "al_ul": ustats.al_ul_report.to_dict(),
                "al_ul_by_granularity": {str(g): t for g, t in ustats.al_ul_table.items()},
                "annotator_vs_ul": {a: r.to_dict() for a, r in per_annotator.items()},
                "annotator_vs_ul_avg": annotator_avg.to_dict(),
            }
        print(json.dumps(payload, indent=2))
        return 0

    rows = dict(sorted(set_reports.items()))
    rows["Macro"] = macro
    rows["Micro"] = micro
    print(render_report_table(rows, title="Pairwise inter-annotator agreement"))
    if ustats is None:
        return 0
    print()
    print(f"UL within max-min range: {ustats.within_range_rate:.1%}   "
          f"UL matches an annotator: {ustats.matches_annotator_rate:.1%}   "
          f"(skipped without UL: {ustats.skipped})")
    print(iaa_mod.render_granularity_table(ustats.al_ul_table, title="AL vs UL"))
    per_annotator, annotator_avg = iaa_mod.annotator_vs_ul(sets, gmap)
    annotator_rows = dict(per_annotator)
    annotator_rows["Avg"] = annotator_avg
    print()
    print(render_report_table(annotator_rows, title="Annotators vs UL"))
    return 0


def cmd_serve(args):
    import uvicorn

    from .events import AnnotationStore, EventLog
    from .service import create_app

    corpus = _load_corpus(args)
    profile = load_profile(args.profile)
    gmap = load_granularity_map(args.granularity_map)
    log_path = None
    if args.state_dir:
        Path(args.state_dir).mkdir(parents=True, exist_ok=True)
        log_path = Path(args.state_dir) / "events.jsonl"
    store = AnnotationStore(corpus, profile, gmap, log=EventLog(log_path))
    app = create_app(store, frontend_dir=args.frontend)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="miqyas",
        description="Arabic sentence readability toolkit: corpus, guidelines, agreement, service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="Load records, validate, optionally write canonical files")
    p.add_argument("--sentences", required=True)
    p.add_argument("--documents")
    p.add_argument("--format", choices=["canonical", "tsv"], default="canonical")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--out", help="directory for canonical output")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("split", help="Document-level train/dev/test assignment")
    p.add_argument("--corpus", required=True)
    p.add_argument("--proportions", default="0.8,0.1,0.1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--apply", action="store_true", help="write the assignment back")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("stats", help="Level distribution, domain breakdown, correlation")
    p.add_argument("--corpus", required=True)
    p.add_argument("--strict", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("floor", help="Guideline floors for a corpus or a single text")
    p.add_argument("--corpus")
    p.add_argument("--text")
    p.add_argument("--profile")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--jsonl", help="write judgment records to this file")
    p.set_defaults(func=cmd_floor)

    p = sub.add_parser("score", help="Score a prediction file against a split")
    p.add_argument("--corpus", required=True)
    p.add_argument("--split", default="dev")
    p.add_argument("--predictions", required=True)
    p.add_argument("--granularity-map")
    p.add_argument("--lenient", action="store_true")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--json", action="store_true", help="structured report instead of the table")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("iaa", help="Inter-annotator agreement and unification reports")
    p.add_argument("--sets", required=True, help="line-delimited IAA records")
    p.add_argument("--granularity-map")
    p.add_argument("--strict", action="store_true")
    p.add_argument("--json", action="store_true", help="structured reports instead of tables")
    p.set_defaults(func=cmd_iaa)

    p = sub.add_parser("serve", help="Run the annotation HTTP service")
    p.add_argument("--corpus", required=True)
    p.add_argument("--profile")
    p.add_argument("--granularity-map")
    p.add_argument("--state-dir", help="directory for the append-only event log")
    p.add_argument("--frontend", help="built UI directory to serve at /ui")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
