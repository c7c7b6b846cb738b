"""Chapter/summary pairs: filtering, book-level splits and descriptive statistics."""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field, replace
from pathlib import Path
from statistics import fmean, median, stdev
from typing import Callable, Iterable, Sequence

from .errors import DegenerateChapter, InvalidArg, IoError
from .textcore import CHAPTER, REFERENCE, Document, read_documents

TRAIN, DEV, TEST, UNASSIGNED = "train", "dev", "test", "unassigned"
SPLITS = (TRAIN, DEV, TEST)
DEFAULT_RATIOS = (6288, 938, 862)

MAX_CHAPTER_SENTENCES = 700
MIN_COMPRESSION = 2.0
RULE_LENGTH = "length"
RULE_COMPRESSION = "compression"


@dataclass(frozen=True)
class CorpusPair:
    book_id: str
    chapter: Document
    summary: Document
    source: str = ""
    split: str = UNASSIGNED

    def __post_init__(self):
        if self.chapter.role != CHAPTER:
            raise InvalidArg(f"{self.chapter.doc_id!r} is not a chapter document")
        if self.summary.role != REFERENCE:
            raise InvalidArg(f"{self.summary.doc_id!r} is not a reference summary")
        if self.split not in SPLITS + (UNASSIGNED,):
            raise InvalidArg(f"unknown split {self.split!r}")

    @property
    def compression(self) -> float:
        sw = self.summary.word_count
        return self.chapter.word_count / sw if sw else math.inf


# ---------------------------------------------------------------------------
# filtering


def removal_reason(pair: CorpusPair) -> str | None:
    if len(pair.chapter.segments) > MAX_CHAPTER_SENTENCES:
        return RULE_LENGTH
    # a summary with no words has no defined ratio and is dropped with the ratio rule
    if pair.summary.word_count == 0 or pair.compression < MIN_COMPRESSION:
        return RULE_COMPRESSION
    return None


def filter_pairs(pairs: Iterable[CorpusPair]) -> tuple[list[CorpusPair], list[tuple[CorpusPair, str]]]:
    kept, removed = [], []
    for p in pairs:
        reason = removal_reason(p)
        if reason is None:
            kept.append(p)
        else:
            removed.append((p, reason))
    return kept, removed


# ---------------------------------------------------------------------------
# splits


def _book_quota(n_books: int, ratios: Sequence[float]) -> list[int]:
    """Largest-remainder apportionment of books to splits."""
    total = float(sum(ratios))
    exact = [n_books * r / total for r in ratios]
    quota = [int(math.floor(x)) for x in exact]
    order = sorted(range(len(ratios)), key=lambda k: (-(exact[k] - quota[k]), k))
    for k in order[: n_books - sum(quota)]:
        quota[k] += 1
    return quota


def assign_splits(pairs: Sequence[CorpusPair], ratios: Sequence[float] = DEFAULT_RATIOS,
                  seed: int = 0) -> list[CorpusPair]:
    """Shuffle books with ``seed`` and deal them out to train/dev/test."""
    if len(ratios) != len(SPLITS) or any(r < 0 for r in ratios) or sum(ratios) <= 0:
        raise InvalidArg(f"need three non-negative ratios, got {tuple(ratios)}")
    books = sorted({p.book_id for p in pairs})
    random.Random(seed).shuffle(books)
    split_of = {}
    start = 0
    for name, n in zip(SPLITS, _book_quota(len(books), ratios)):
        for b in books[start : start + n]:
            split_of[b] = name
        start += n
    return [replace(p, split=split_of[p.book_id]) for p in pairs]


# ---------------------------------------------------------------------------
# vocabulary overlap


def vocabulary(doc: Document) -> set[str]:
    return {t.norm for s in doc.segments for t in s.tokens if not t.is_punct}


@dataclass(frozen=True)
class Overlap:
    summary_side: float
    chapter_side: float
    jaccard: float


def overlap_variants(summary: Document, chapter: Document) -> Overlap:
    vs, vc = vocabulary(summary), vocabulary(chapter)
    if not vs:
        raise DegenerateChapter(f"summary {summary.doc_id!r} has no word types")
    if not vc:
        raise DegenerateChapter(f"chapter {chapter.doc_id!r} has no word types")
    common = len(vs & vc)
    return Overlap(common / len(vs), common / len(vc), common / len(vs | vc))


def word_overlap(summary: Document, chapter: Document) -> float:
    """Share of the summary's word types that also occur in the chapter."""
    return overlap_variants(summary, chapter).summary_side


# ---------------------------------------------------------------------------
# statistics


@dataclass(frozen=True)
class LengthStats:
    count: int
    mean: float
    stdev: float
    median: float

    @classmethod
    def of(cls, values: Sequence[float]) -> "LengthStats":
        if not values:
            return cls(0, 0.0, 0.0, 0.0)
        sd = stdev(values) if len(values) > 1 else 0.0
        return cls(len(values), fmean(values), sd, float(median(values)))


@dataclass(frozen=True)
class CorpusStats:
    by_source: dict[str, LengthStats]
    all_sources: LengthStats
    chapter: LengthStats
    compression: LengthStats
    overlap: Overlap
    pairs: int = 0

    def rows(self) -> list[tuple[str, float, float, float, int]]:
        out = [(src, s.mean, s.stdev, s.median, s.count) for src, s in self.by_source.items()]
        out.append(("all", self.all_sources.mean, self.all_sources.stdev,
                    self.all_sources.median, self.all_sources.count))
        out.append(("chapter", self.chapter.mean, self.chapter.stdev,
                    self.chapter.median, self.chapter.count))
        return out


def corpus_stats(pairs: Sequence[CorpusPair]) -> CorpusStats:
    """Word-count statistics per summary source and for chapters.

    Chapter statistics count one chapter per pair, so a chapter with several
    summaries is counted several times.
    """
    if not pairs:
        raise InvalidArg("corpus_stats needs at least one pair")
    per_source: dict[str, list[int]] = {}
    for p in pairs:
        per_source.setdefault(p.source, []).append(p.summary.word_count)
    overlaps = [overlap_variants(p.summary, p.chapter) for p in pairs]
    ratios = [p.compression for p in pairs if p.summary.word_count]
    return CorpusStats(
        by_source={src: LengthStats.of(v) for src, v in sorted(per_source.items())},
        all_sources=LengthStats.of([p.summary.word_count for p in pairs]),
        chapter=LengthStats.of([p.chapter.word_count for p in pairs]),
        compression=LengthStats.of(ratios),
        overlap=Overlap(fmean(o.summary_side for o in overlaps),
                        fmean(o.chapter_side for o in overlaps),
                        fmean(o.jaccard for o in overlaps)),
        pairs=len(pairs),
    )


def stats_tsv(stats: CorpusStats) -> str:
    lines = ["source\tmean\tstdev\tmedian\ttotal"]
    for src, mean, sd, med, n in stats.rows():
        lines.append(f"{src}\t{mean:.4f}\t{sd:.4f}\t{med:.4f}\t{n}")
    ov = stats.overlap
    lines.append(f"# word_overlap summary_side={ov.summary_side:.6f} "
                 f"chapter_side={ov.chapter_side:.6f} jaccard={ov.jaccard:.6f}")
    c = stats.compression
    lines.append(f"# compression mean={c.mean:.4f} stdev={c.stdev:.4f} median={c.median:.4f}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# manifest


@dataclass(frozen=True)
class ManifestEntry:
    book_id: str
    chapter_file: str
    summary_file: str
    source: str = ""
    extra: dict = field(default_factory=dict)


def read_manifest(path: str | Path) -> list[ManifestEntry]:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IoError(f"cannot read manifest {path}: {exc}") from exc
    out = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            out.append(ManifestEntry(str(rec["book_id"]), rec["chapter_file"], rec["summary_file"],
                                     rec.get("source", ""),
                                     {k: v for k, v in rec.items()
                                      if k not in ("book_id", "chapter_file", "summary_file", "source")}))
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise InvalidArg(f"{path}:{lineno}: bad manifest record ({exc})") from exc
    return out


def resolve_document(ref: str, base: Path, cache: dict,
                     loader: Callable[[Path], list[Document]] = read_documents) -> Document:
    """``file.jsonl`` (first document) or ``file.jsonl#doc_id``, relative to ``base``."""
    name, _, doc_id = ref.partition("#")
    p = Path(name)
    if not p.is_absolute():
        p = base / p
    if p not in cache:
        cache[p] = loader(p)
    docs = cache[p]
    if not docs:
        raise InvalidArg(f"{p} holds no documents")
    if not doc_id:
        return docs[0]
    for d in docs:
        if d.doc_id == doc_id:
            return d
    raise InvalidArg(f"document {doc_id!r} not found in {p}")


def load_corpus(manifest_path: str | Path) -> list[CorpusPair]:
    """Resolve a manifest (paths relative to the manifest's folder) into pairs."""
    manifest_path = Path(manifest_path)
    base = manifest_path.parent
    cache: dict = {}
    pairs = []
    for e in read_manifest(manifest_path):
        pairs.append(CorpusPair(e.book_id, resolve_document(e.chapter_file, base, cache),
                                resolve_document(e.summary_file, base, cache), e.source))
    return pairs
