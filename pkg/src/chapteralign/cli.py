"""Command-line entry point: ``chapteralign <subcommand> ...``.

Exit codes: 0 success, 1 processing error (including per-item failures that
were skipped), 2 usage or input validation error. Data goes to files or
stdout, logs to stderr.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

from . import __version__
from .align import (
    CLI_METHODS,
    AlignmentResult,
    dumps_record,
    greedy_sentence_align,
    result_from_record,
    result_to_record,
    stable_align,
    summary_level_align,
)
from .budget import (
    ExtractBudget,
    QuantileModel,
    assemble_extract,
    context_expand,
    default_quantiles,
    dumps_quantiles,
    fit_quantiles,
    load_quantiles,
    oracle_extract,
    render_extract,
    target_length,
)
from .corpus import (
    DEFAULT_RATIOS,
    CorpusPair,
    assign_splits,
    corpus_stats,
    filter_pairs,
    read_manifest,
    resolve_document,
    stats_tsv,
)
from .errors import ChapterAlignError, EmptyText, InvalidArg, IoError
from .metrics import (
    CLI_NAMES,
    COSINE,
    EVAL_METRICS,
    MetricConfig,
    Scorer,
    SegmentVectors,
    default_config,
    load_synonyms,
    score_multi_reference,
)
from .segment import DEFAULT_MIN_LEN, segment_document, spans_record, constituent_segments
from .textcore import (
    CHAPTER,
    GENERATED,
    REFERENCE,
    Document,
    document_from_record,
    load_stopwords,
)
from .trees import ParseTree, read_trees
from .weighting import DEFAULT_ALPHA, chapter_weight_table, write_weight_tsv

log = logging.getLogger("chapteralign")

EXIT_OK, EXIT_PROCESSING, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    """Bad flags or unusable input; maps to exit code 2."""


@dataclass
class RunConfig:
    """Everything a worker needs; must stay picklable."""

    metric_id: str = "R_wtd"
    method: str = "stable_sent"
    alpha: float = DEFAULT_ALPHA
    min_len: int = DEFAULT_MIN_LEN
    segments: str = "sentence"
    pretokenized: bool = True
    stopwords: frozenset[str] | None = None
    synonyms: dict | None = None
    vectors: SegmentVectors | None = None
    quantiles: QuantileModel | None = None
    seed: int = 0

    def metric_config(self, chapter: Document) -> MetricConfig:
        table = chapter_weight_table(chapter, self.alpha)
        kw: dict = {"vectors": self.vectors}
        if self.synonyms:
            kw["matchers"] = ("exact", "stem", "synonym")
            kw["synonyms"] = self.synonyms
        if self.stopwords is not None and self.metric_id == "R1_stopstem":
            kw["stopwords"] = self.stopwords
        return default_config(self.metric_id, table, **kw)


# ---------------------------------------------------------------------------
# I/O helpers


def atomic_write(path: str | Path, text: str) -> None:
    """Write through a temp file in the target folder, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except FileNotFoundError:
            pass
        raise


def emit(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        atomic_write(path, text)


def read_docs(path: str, cfg: RunConfig, roles: Sequence[str] | None = None) -> list[Document]:
    """Read a JSONL document file; empty or unreadable input is a usage error."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    docs = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}:{lineno}: bad JSON ({exc.msg})") from exc
        try:
            doc = document_from_record(rec, cfg.pretokenized, cfg.stopwords)
        except (InvalidArg, EmptyText) as exc:
            raise UsageError(f"{path}:{lineno}: {exc}") from exc
        if roles and doc.role not in roles:
            raise UsageError(f"{path}:{lineno}: document {doc.doc_id!r} has role {doc.role!r}, "
                             f"expected one of {list(roles)}")
        docs.append(doc)
    if not docs:
        raise UsageError(f"{path}: no documents")
    return docs


def load_tree_file(path: str) -> list[ParseTree]:
    try:
        return read_trees(path)
    except IoError as exc:
        raise UsageError(str(exc)) from exc
    except ChapterAlignError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def split_trees(chapters: Sequence[Document], trees: Sequence[ParseTree]) -> list[list[ParseTree]]:
    """Trees are listed sentence by sentence across all chapters in order."""
    need = sum(len(c.segments) for c in chapters)
    if need != len(trees):
        raise UsageError(f"trees file has {len(trees)} trees, chapters have {need} sentences")
    out, pos = [], 0
    for c in chapters:
        out.append(list(trees[pos : pos + len(c.segments)]))
        pos += len(c.segments)
    return out


def prepare_chapter(chapter: Document, trees: Sequence[ParseTree] | None, cfg: RunConfig) -> Document:
    if cfg.segments == "sentence":
        return chapter
    return segment_document(chapter, list(trees), cfg.min_len)


def run_pool(fn: Callable, tasks: Sequence, jobs: int) -> list:
    """Map preserving input order; sequential when ``jobs`` is 1."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(fn, tasks))


def tsv(rows: Iterable[Sequence], header: Sequence[str]) -> str:
    lines = ["\t".join(header)]
    for row in rows:
        lines.append("\t".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6f}"
    return "" if v is None else str(v)


# ---------------------------------------------------------------------------
# alignment worker


def align_one(summary: Document, chapter_segs: Document, sentence_chapter: Document,
              cfg: RunConfig) -> AlignmentResult:
    scorer = Scorer(cfg.metric_config(sentence_chapter))
    if cfg.method == "greedy_sent":
        return greedy_sentence_align(summary, chapter_segs, scorer, cfg.metric_id)
    if cfg.method == "stable_sent":
        return stable_align(summary, chapter_segs, scorer, cfg.metric_id)
    rule = "WL" if cfg.method == "summary_wl" else "WS"
    return summary_level_align(summary, chapter_segs, scorer, rule, cfg.metric_id)


def _align_task(task):
    chapter, trees, summary, cfg = task
    try:
        segs = prepare_chapter(chapter, trees, cfg)
        result = align_one(summary, segs, chapter, cfg)
        return result_to_record(result, segs), None
    except ChapterAlignError as exc:
        return None, f"{summary.doc_id}: {type(exc).__name__}: {exc}"


# ---------------------------------------------------------------------------
# subcommands


def cmd_segment(args, cfg: RunConfig) -> int:
    chapters = read_docs(args.chapter, cfg, (CHAPTER,))
    out = []
    if cfg.segments == "constituent":
        per_chapter = split_trees(chapters, load_tree_file(args.trees))
    else:
        per_chapter = [None] * len(chapters)
    for chapter, trees in zip(chapters, per_chapter):
        for k, sent in enumerate(chapter.segments):
            if trees is None:
                out.append(json.dumps({"sentence_id": sent.id, "spans": [
                    {"start": 0, "end": len(sent.tokens), "text": sent.text}]}, ensure_ascii=False))
                continue
            tree = trees[k]
            if len(tree) != len(sent.tokens):
                raise UsageError(f"tree for {sent.id} has {len(tree)} leaves, "
                                 f"sentence has {len(sent.tokens)} tokens")
            out.append(spans_record(sent.id, constituent_segments(tree, cfg.min_len, sent.id)))
    emit(args.output, "\n".join(out) + "\n")
    return EXIT_OK


def cmd_weight(args, cfg: RunConfig) -> int:
    chapters = read_docs(args.chapter, cfg, (CHAPTER,))
    buf = io.StringIO()
    buf.write("chapter_id\t")
    header_done = False
    for chapter in chapters:
        table = chapter_weight_table(chapter, cfg.alpha)
        part = io.StringIO()
        write_weight_tsv(table, part)
        lines = part.getvalue().splitlines()
        if not header_done:
            buf.write(lines[0] + "\n")
            header_done = True
        for line in lines[1:]:
            buf.write(f"{chapter.doc_id}\t{line}\n")
    emit(args.output, buf.getvalue())
    return EXIT_OK


def _pairs_from_args(args, cfg: RunConfig) -> list[tuple[Document, list | None, Document]]:
    """(chapter, trees or None, summary) triples from --manifest or --chapter/--summary."""
    if args.manifest:
        groups = load_manifest_groups(args.manifest, cfg, getattr(args, "trees", None))
        return [(g.chapter, g.trees, s) for g in groups for s in g.summaries]
    if not (args.chapter and args.summary):
        raise UsageError("give --manifest, or both --chapter and --summary")
    chapters = read_docs(args.chapter, cfg, (CHAPTER,))
    if len(chapters) != 1:
        raise UsageError(f"{args.chapter} holds {len(chapters)} chapters; use --manifest for several")
    summaries = read_docs(args.summary, cfg, (REFERENCE,))
    trees = None
    if cfg.segments == "constituent":
        trees = split_trees(chapters, load_tree_file(args.trees))[0]
    return [(chapters[0], trees, s) for s in summaries]


def cmd_align(args, cfg: RunConfig) -> int:
    triples = _pairs_from_args(args, cfg)
    tasks = [(c, t, s, cfg) for c, t, s in triples]
    results = run_pool(_align_task, tasks, args.jobs)
    records, rows, failures = [], [], 0
    for (chapter, _, summary), (rec, err) in zip(triples, results):
        if err:
            failures += 1
            log.error("skipped %s", err)
            continue
        log.info("aligned %s -> %s (%d pairs)", summary.doc_id, chapter.doc_id, len(rec["pairs"]))
        records.append(dumps_record(rec))
        res = result_from_record(rec)
        rows.append((rec["chapter_id"], rec["summary_id"], rec["method"], rec["metric"],
                     len(rec["pairs"]), res.mean_score()))
    emit(args.output, "".join(r + "\n" for r in records))
    if args.report:
        atomic_write(args.report, tsv(rows, ("chapter_id", "summary_id", "method", "metric",
                                              "n_pairs", "mean_score")))
    if failures:
        log.error("%d of %d pairs failed", failures, len(triples))
        return EXIT_PROCESSING
    return EXIT_OK


def cmd_budget(args, cfg: RunConfig) -> int:
    chapters = read_docs(args.chapter, cfg, (CHAPTER,))
    rows = []
    for c in chapters:
        b = target_length(max(1, c.word_count), cfg.quantiles)
        rows.append((c.doc_id, b.chapter_wc, b.bin_index, b.target_words))
    emit(args.output, tsv(rows, ("chapter_id", "chapter_wc", "bin_index", "target_words")))
    return EXIT_OK


def _extract_record(extract: Document, chapter: Document, summary_id: str | None,
                    budget: ExtractBudget) -> dict:
    return {
        "doc_id": f"{chapter.doc_id}:oracle" + (f":{summary_id}" if summary_id else ""),
        "role": GENERATED,
        "chapter_id": chapter.doc_id,
        "summary_id": summary_id,
        "target_words": budget.target_words,
        "bin_index": budget.bin_index,
        "words": extract.word_count,
        "segment_ids": [s.id for s in extract.segments],
        "sentences": [s.text for s in extract.segments],
    }


def build_extract(chapter: Document, segs: Document, result: AlignmentResult,
                  quantiles: QuantileModel) -> tuple[Document, ExtractBudget]:
    budget = target_length(max(1, chapter.word_count), quantiles)
    if result.sentence_level:
        extract = oracle_extract(segs, Document(result.summary_id or "", REFERENCE, ()), result, budget)
    elif result.selected_ids:
        extract = assemble_extract(segs, result.selected_ids, budget)
    else:
        extract = segs.with_segments(())
    return extract, budget


def cmd_extract(args, cfg: RunConfig) -> int:
    chapters = read_docs(args.chapter, cfg, (CHAPTER,))
    trees = (split_trees(chapters, load_tree_file(args.trees))
             if cfg.segments == "constituent" else [None] * len(chapters))
    by_id = {c.doc_id: (c, prepare_chapter(c, t, cfg)) for c, t in zip(chapters, trees)}
    try:
        lines = Path(args.alignment).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read {args.alignment}: {exc.strerror or exc}") from exc
    lines = [l for l in lines if l.strip()]
    if not lines:
        raise UsageError(f"{args.alignment}: no alignment records")
    out, rendered, failures = [], [], 0
    for lineno, line in enumerate(lines, 1):
        try:
            rec = json.loads(line)
            result = result_from_record(rec)
        except (json.JSONDecodeError, KeyError, InvalidArg) as exc:
            raise UsageError(f"{args.alignment}:{lineno}: bad alignment record ({exc})") from exc
        if rec.get("chapter_id") not in by_id:
            failures += 1
            log.error("skipped record %d: chapter %r not in %s", lineno, rec.get("chapter_id"), args.chapter)
            continue
        chapter, segs = by_id[rec["chapter_id"]]
        try:
            extract, budget = build_extract(chapter, segs, result, cfg.quantiles)
        except ChapterAlignError as exc:
            failures += 1
            log.error("skipped record %d: %s", lineno, exc)
            continue
        out.append(json.dumps(_extract_record(extract, chapter, result.summary_id, budget),
                              ensure_ascii=False))
        shown = context_expand(extract, chapter) if cfg.segments == "constituent" else extract
        rendered.append(render_extract(shown))
    emit(args.output, "".join(r + "\n" for r in out))
    if args.render:
        atomic_write(args.render, "\n".join(rendered))
    return EXIT_PROCESSING if failures else EXIT_OK


SCORE_HEADER = ("generated_id", "metric", "reference_id", "P", "R", "F1")


def score_rows(generated: Document, refs: Sequence[Document], cfg: RunConfig) -> list[tuple]:
    mcfg = MetricConfig(metric_id="R1", use_stems=True,
                        matchers=("exact", "stem", "synonym") if cfg.synonyms else ("exact", "stem"),
                        synonyms=cfg.synonyms)
    scores = score_multi_reference(generated, refs, EVAL_METRICS, mcfg)
    return [(generated.doc_id,) + row for row in scores.rows()]


def cmd_score(args, cfg: RunConfig) -> int:
    generated = read_docs(args.generated, cfg, (GENERATED, CHAPTER))
    refs = read_docs(args.references, cfg, (REFERENCE,))
    rows = []
    for g in generated:
        rows.extend(score_rows(g, refs, cfg))
    emit(args.output, tsv(rows, SCORE_HEADER))
    return EXIT_OK


def _manifest_pairs(path: str, cfg: RunConfig) -> tuple[list[CorpusPair], list]:
    groups = load_manifest_groups(path, cfg, None, need_trees=False)
    pairs, entries = [], []
    for g in groups:
        for s, e in zip(g.summaries, g.entries):
            pairs.append(CorpusPair(e["book_id"], g.chapter, s, e.get("source", "")))
            entries.append(e)
    return pairs, entries


def cmd_stats(args, cfg: RunConfig) -> int:
    pairs, entries = _manifest_pairs(args.manifest, cfg)
    if args.split:
        pairs = [p for p, e in zip(pairs, entries) if e.get("split") == args.split]
        if not pairs:
            raise UsageError(f"no pairs in split {args.split!r}")
    emit(args.output, stats_tsv(corpus_stats(pairs)))
    return EXIT_OK


def cmd_filter(args, cfg: RunConfig) -> int:
    pairs, entries = _manifest_pairs(args.manifest, cfg)
    kept, removed = filter_pairs(pairs)
    kept_ids = {id(p) for p in kept}
    reasons = {id(p): r for p, r in removed}
    out, rows = [], []
    for p, e in zip(pairs, entries):
        if id(p) in kept_ids:
            out.append(json.dumps(e, ensure_ascii=False))
        else:
            rows.append((e["book_id"], e["chapter_file"], e["summary_file"], e.get("source", ""),
                         reasons[id(p)]))
            log.info("removed %s (%s)", e["summary_file"], reasons[id(p)])
    emit(args.output, "".join(l + "\n" for l in out))
    if args.removed:
        atomic_write(args.removed, tsv(rows, ("book_id", "chapter_file", "summary_file",
                                              "source", "rule")))
    return EXIT_OK


def cmd_split(args, cfg: RunConfig) -> int:
    pairs, entries = _manifest_pairs(args.manifest, cfg)
    ratios = tuple(args.ratios) if args.ratios else DEFAULT_RATIOS
    assigned = assign_splits(pairs, ratios, cfg.seed)
    out = []
    for p, e in zip(assigned, entries):
        rec = dict(e)
        rec["split"] = p.split
        out.append(json.dumps(rec, ensure_ascii=False))
    emit(args.output, "".join(l + "\n" for l in out))
    return EXIT_OK


def _read_count_pairs(path: str) -> list[tuple[int, int]]:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from exc
    out = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split()
        if fields[0] == "chapter_wc":
            continue
        try:
            out.append((int(fields[0]), int(fields[1])))
        except (ValueError, IndexError) as exc:
            raise UsageError(f"{path}:{lineno}: expected 'chapter_wc summary_wc'") from exc
    return out


def cmd_fit_quantiles(args, cfg: RunConfig) -> int:
    if args.pairs:
        counts = _read_count_pairs(args.pairs)
        tag = args.pairs
    elif args.manifest:
        pairs, _ = _manifest_pairs(args.manifest, cfg)
        counts = [(p.chapter.word_count, p.summary.word_count) for p in pairs]
        tag = args.manifest
    else:
        raise UsageError("give --pairs or --manifest")
    try:
        model = fit_quantiles(counts, fitted_on=Path(tag).name)
    except ChapterAlignError as exc:
        raise UsageError(str(exc)) from exc
    emit(args.output, dumps_quantiles(model))
    return EXIT_OK


# ---------------------------------------------------------------------------
# pipeline


@dataclass
class ChapterGroup:
    chapter: Document
    trees: list | None
    summaries: list[Document] = field(default_factory=list)
    entries: list[dict] = field(default_factory=list)


def load_manifest_groups(path: str, cfg: RunConfig, trees_path: str | None,
                         need_trees: bool = True) -> list[ChapterGroup]:
    """Group manifest rows by chapter, keeping first-appearance order."""
    try:
        entries = read_manifest(path)
    except (IoError, InvalidArg) as exc:
        raise UsageError(str(exc)) from exc
    if not entries:
        raise UsageError(f"{path}: empty manifest")
    base = Path(path).parent
    cache: dict[Path, list[Document]] = {}

    def resolve(ref: str) -> Document:
        try:
            return resolve_document(ref, base, cache, lambda p: read_docs(str(p), cfg))
        except InvalidArg as exc:
            raise UsageError(f"{path}: {exc}") from exc

    groups: dict[str, ChapterGroup] = {}
    for e in entries:
        chapter = resolve(e.chapter_file)
        summary = resolve(e.summary_file)
        if chapter.role != CHAPTER or summary.role != REFERENCE:
            raise UsageError(f"{path}: {e.chapter_file} / {e.summary_file} have wrong roles")
        g = groups.get(chapter.doc_id)
        if g is None:
            trees = None
            if need_trees and cfg.segments == "constituent":
                tp = e.extra.get("trees_file")
                if tp:
                    tp = str(Path(tp) if Path(tp).is_absolute() else base / tp)
                else:
                    tp = trees_path
                if not tp:
                    raise UsageError(f"constituent mode needs trees for chapter {chapter.doc_id!r}")
                trees = split_trees([chapter], load_tree_file(tp))[0]
            g = groups[chapter.doc_id] = ChapterGroup(chapter, trees)
        g.summaries.append(summary)
        rec = {"book_id": e.book_id, "chapter_file": e.chapter_file,
               "summary_file": e.summary_file, "source": e.source}
        rec.update(e.extra)
        g.entries.append(rec)
    return list(groups.values())


def pick_label_summary(group: ChapterGroup, label_source: str | None) -> Document:
    if label_source:
        for s, e in zip(group.summaries, group.entries):
            if e.get("source") == label_source:
                return s
        log.warning("chapter %s has no %s summary; using the first one", group.chapter.doc_id,
                    label_source)
    return group.summaries[0]


def _pipeline_task(task):
    group, label_source, cfg = task
    chapter = group.chapter
    try:
        label = pick_label_summary(group, label_source)
        segs = prepare_chapter(chapter, group.trees, cfg)
        result = align_one(label, segs, chapter, cfg)
        record = result_to_record(result, segs)
        extract, budget = build_extract(chapter, segs, result, cfg.quantiles)
        shown = context_expand(extract, chapter) if cfg.segments == "constituent" else extract
        ext_rec = _extract_record(extract, chapter, label.doc_id, budget)
        gen = Document(ext_rec["doc_id"], GENERATED, extract.segments)
        rows = score_rows(gen, group.summaries, cfg) if extract.segments else []
        return {
            "alignment": dumps_record(record),
            "extract": json.dumps(ext_rec, ensure_ascii=False),
            "render": f"# {chapter.doc_id} (labels from {label.doc_id}, "
                      f"target {budget.target_words} words)\n" + render_extract(shown),
            "scores": rows,
        }, None
    except ChapterAlignError as exc:
        return None, f"{chapter.doc_id}: {type(exc).__name__}: {exc}"


def cmd_pipeline(args, cfg: RunConfig) -> int:
    groups = load_manifest_groups(args.manifest, cfg, args.trees)
    results = run_pool(_pipeline_task, [(g, args.label_source, cfg) for g in groups], args.jobs)
    aligns, extracts, renders, rows, failures = [], [], [], [], 0
    for g, (res, err) in zip(groups, results):
        if err:
            failures += 1
            log.error("skipped %s", err)
            continue
        log.info("pipeline done for %s", g.chapter.doc_id)
        aligns.append(res["alignment"])
        extracts.append(res["extract"])
        renders.append(res["render"])
        rows.extend(res["scores"])
    out = Path(args.out_dir)
    atomic_write(out / "alignments.jsonl", "".join(a + "\n" for a in aligns))
    atomic_write(out / "extracts.jsonl", "".join(e + "\n" for e in extracts))
    atomic_write(out / "extracts.txt", "\n".join(renders))
    atomic_write(out / "scores.tsv", tsv(rows, SCORE_HEADER))
    if failures:
        log.error("%d of %d chapters failed", failures, len(groups))
        return EXIT_PROCESSING
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--metric", choices=sorted(CLI_NAMES), default="r-wtd")
    p.add_argument("--method", choices=sorted(CLI_METHODS), default="stable")
    p.add_argument("--alpha", type=float, default=DEFAULT_ALPHA)
    p.add_argument("--min-const-len", type=int, default=DEFAULT_MIN_LEN)
    p.add_argument("--segments", choices=("sentence", "constituent"), default="sentence")
    p.add_argument("--trees", help="bracketed parse trees, one per sentence")
    p.add_argument("--vectors", help="segment vectors JSONL (required for --metric cosine)")
    p.add_argument("--stopwords", help="stop-word list (default: bundled English list)")
    p.add_argument("--synonyms", help="synonym TSV; enables the synonym METEOR matcher")
    p.add_argument("--quantiles", help="quantile model TSV (default: bundled table)")
    p.add_argument("--raw-text", action="store_true",
                   help="input sentences are not pre-tokenized")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chapteralign", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        _common(p)
        p.set_defaults(func=fn)
        return p

    p = add("segment", cmd_segment, "split chapter sentences into segments")
    p.add_argument("--chapter", required=True)
    p.add_argument("-o", "--output")

    p = add("weight", cmd_weight, "per-chapter word weight tables")
    p.add_argument("--chapter", required=True)
    p.add_argument("-o", "--output")

    p = add("align", cmd_align, "align summaries to chapters")
    p.add_argument("--chapter")
    p.add_argument("--summary")
    p.add_argument("--manifest")
    p.add_argument("-o", "--output")
    p.add_argument("--report", help="TSV of mean alignment score per pair")

    p = add("budget", cmd_budget, "target summary length per chapter")
    p.add_argument("--chapter", required=True)
    p.add_argument("-o", "--output")

    p = add("extract", cmd_extract, "oracle extracts from alignments")
    p.add_argument("--chapter", required=True)
    p.add_argument("--alignment", required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--render", help="human-readable extract text")

    p = add("score", cmd_score, "score generated summaries against references")
    p.add_argument("--generated", required=True)
    p.add_argument("--references", required=True)
    p.add_argument("-o", "--output")

    p = add("stats", cmd_stats, "corpus word-count statistics")
    p.add_argument("--manifest", required=True)
    p.add_argument("--split", help="only pairs whose manifest record has this split")
    p.add_argument("-o", "--output")

    p = add("filter", cmd_filter, "drop over-long chapters and weakly compressed summaries")
    p.add_argument("--manifest", required=True)
    p.add_argument("-o", "--output")
    p.add_argument("--removed", help="TSV of removed pairs with the rule that removed them")

    p = add("split", cmd_split, "assign books to train/dev/test")
    p.add_argument("--manifest", required=True)
    p.add_argument("--ratios", type=float, nargs=3, metavar=("TRAIN", "DEV", "TEST"))
    p.add_argument("-o", "--output")

    p = add("fit-quantiles", cmd_fit_quantiles, "fit a length quantile model")
    p.add_argument("--manifest")
    p.add_argument("--pairs", help="whitespace-separated 'chapter_wc summary_wc' rows")
    p.add_argument("-o", "--output")

    p = add("pipeline", cmd_pipeline, "segment, align, budget, extract and score")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--label-source", help="summary source used for labels (default: first listed)")
    return ap


def config_from_args(args) -> RunConfig:
    metric_id = CLI_NAMES[args.metric]
    if metric_id == COSINE and not args.vectors:
        raise UsageError("--metric cosine needs --vectors")
    if args.segments == "constituent" and not args.trees and args.command not in ("pipeline", "align"):
        raise UsageError("--segments constituent needs --trees")
    if args.segments == "constituent" and args.command == "align" and not args.manifest and not args.trees:
        raise UsageError("--segments constituent needs --trees")
    if not args.alpha > 0:
        raise UsageError("--alpha must be positive")
    if args.min_const_len < 1:
        raise UsageError("--min-const-len must be >= 1")
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    try:
        stopwords = load_stopwords(args.stopwords) if args.stopwords else None
        synonyms = load_synonyms(args.synonyms) if args.synonyms else None
        vectors = SegmentVectors.load(args.vectors) if args.vectors else None
        quantiles = load_quantiles(args.quantiles) if args.quantiles else default_quantiles()
    except ChapterAlignError as exc:
        raise UsageError(str(exc)) from exc
    return RunConfig(
        metric_id=metric_id,
        method=CLI_METHODS[args.method],
        alpha=args.alpha,
        min_len=args.min_const_len,
        segments=args.segments,
        pretokenized=not args.raw_text,
        stopwords=stopwords,
        synonyms=synonyms,
        vectors=vectors,
        quantiles=quantiles,
        seed=args.seed,
    )


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        return args.func(args, cfg)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except ChapterAlignError as exc:
        log.error("%s: %s", type(exc).__name__, exc)
        return EXIT_PROCESSING


if __name__ == "__main__":
    sys.exit(main())
