"""Compare alignment metrics and methods on one chapter.

For every (metric, method) combination the chapter is aligned to one
reference summary, an oracle extract is built under the quantile budget, and
the extract is scored with R-L F1 against the remaining references. Prints a
TSV to stdout.

    python3 scripts/compare_alignments.py \
        --chapter tests/fixtures/chapter11.jsonl \
        --references tests/fixtures/chapter11_refs.jsonl --label awakening-ch11-NG
"""

from __future__ import annotations

import argparse
import time

from chapteralign.align import greedy_sentence_align, stable_align, summary_level_align
from chapteralign.budget import assemble_extract, default_quantiles, oracle_extract, target_length
from chapteralign.metrics import (
    CLI_NAMES,
    COSINE,
    RL,
    MetricConfig,
    Scorer,
    default_config,
    score_multi_reference,
)
from chapteralign.textcore import GENERATED, Document, read_documents
from chapteralign.weighting import chapter_weight_table

METHODS = ("greedy", "stable", "wl", "ws")


def align(method: str, summary: Document, chapter: Document, scorer: Scorer, metric_id: str):
    if method == "greedy":
        return greedy_sentence_align(summary, chapter, scorer, metric_id)
    if method == "stable":
        return stable_align(summary, chapter, scorer, metric_id)
    return summary_level_align(summary, chapter, scorer, method.upper(), metric_id)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--chapter", required=True)
    ap.add_argument("--references", required=True)
    ap.add_argument("--label", help="doc_id of the reference used for alignment (default: first)")
    ap.add_argument("--methods", nargs="+", default=list(METHODS), choices=METHODS)
    args = ap.parse_args()

    chapter = read_documents(args.chapter)[0]
    refs = read_documents(args.references)
    label = next((r for r in refs if r.doc_id == args.label), refs[0])
    others = [r for r in refs if r is not label] or refs
    budget = target_length(chapter.word_count, default_quantiles())
    table = chapter_weight_table(chapter)
    eval_cfg = MetricConfig(metric_id=RL, use_stems=True)

    print("metric\tmethod\tn_selected\twords\tmean_RL_F1\tseconds")
    for name, metric_id in CLI_NAMES.items():
        if metric_id == COSINE:
            continue  # needs external vectors
        scorer = Scorer(default_config(metric_id, table))
        for method in args.methods:
            t0 = time.perf_counter()
            res = align(method, label, chapter, scorer, metric_id)
            if res.sentence_level:
                extract = oracle_extract(chapter, label, res, budget)
            else:
                extract = assemble_extract(chapter, res.selected_ids, budget)
            gen = Document("extract", GENERATED, extract.segments)
            scores = score_multi_reference(gen, others, (RL,), eval_cfg)
            f1 = scores.mean[RL].f1
            print(f"{name}\t{method}\t{len(extract.segments)}\t{extract.word_count}\t{f1:.4f}\t"
                  f"{time.perf_counter() - t0:.2f}")


if __name__ == "__main__":
    main()
