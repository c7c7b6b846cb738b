"""Word budgets from chapter length, and assembly of extracts under a budget.

A :class:`QuantileModel` holds ten chapter-length bins, each with the mean
compression ratio (chapter words / summary words) of the training pairs that
fell into it. The target length for a chapter is its word count divided by the
ratio of its bin.
"""

from __future__ import annotations

import io
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from statistics import fmean
from typing import Iterable, Sequence

from .align import AlignmentResult
from .errors import (
    EmptyRanking,
    InconsistentInput,
    InsufficientData,
    InvalidArg,
    IoError,
    WrongAlignmentKind,
)
from .textcore import Document, Segment

log = logging.getLogger(__name__)

N_BINS = 10
TSV_HEADER = ("bin_index", "min_wc", "max_wc", "mean_cr")


@dataclass(frozen=True)
class QuantileBin:
    min_wc: int
    max_wc: int
    mean_cr: float

    def contains(self, wc: int) -> bool:
        return self.min_wc <= wc <= self.max_wc


@dataclass(frozen=True)
class QuantileModel:
    bins: tuple[QuantileBin, ...]
    fitted_on: str = ""

    def __post_init__(self):
        if len(self.bins) != N_BINS:
            raise InvalidArg(f"quantile model needs {N_BINS} bins, got {len(self.bins)}")
        for k, b in enumerate(self.bins):
            if not b.mean_cr > 0:
                raise InvalidArg(f"bin {k}: mean_cr must be positive, got {b.mean_cr}")
            if b.min_wc > b.max_wc:
                raise InvalidArg(f"bin {k}: min_wc {b.min_wc} > max_wc {b.max_wc}")

    def warnings(self) -> list[str]:
        """Soft problems: overlapping ranges and decreasing ratios."""
        out = []
        for k, (a, b) in enumerate(zip(self.bins, self.bins[1:])):
            if b.min_wc <= a.max_wc:
                out.append(f"bins {k} and {k + 1} overlap ({a.min_wc}-{a.max_wc} vs {b.min_wc}-{b.max_wc})")
            if b.mean_cr < a.mean_cr:
                out.append(f"mean_cr decreases from bin {k} to bin {k + 1}")
        return out

    def bin_for(self, chapter_wc: int) -> int:
        """Index (0-based) of the first bin whose range reaches ``chapter_wc``.

        Counts below every bin land in bin 0, above every bin in the last one.
        A count in a gap between two fitted bins goes to the upper bin.
        """
        for k, b in enumerate(self.bins):
            if chapter_wc <= b.max_wc:
                return k
        return N_BINS - 1


@dataclass(frozen=True)
class ExtractBudget:
    target_words: int
    bin_index: int
    chapter_wc: int

    def __post_init__(self):
        if self.target_words < 1:
            raise InvalidArg("target_words must be >= 1")
        if not 0 <= self.bin_index < N_BINS:
            raise InvalidArg(f"bin_index out of range: {self.bin_index}")


# ---------------------------------------------------------------------------
# model I/O


def parse_quantiles(text: str, source: str = "<string>", quiet: bool = False) -> QuantileModel:
    rows = []
    header_seen = False
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = line.split()
        if not header_seen and fields[0] == TSV_HEADER[0]:
            header_seen = True
            continue
        if len(fields) != 4:
            raise InvalidArg(f"{source}:{lineno}: expected 4 columns, got {len(fields)}")
        try:
            idx, lo, hi, cr = int(fields[0]), int(fields[1]), int(fields[2]), float(fields[3])
        except ValueError as exc:
            raise InvalidArg(f"{source}:{lineno}: {exc}") from exc
        rows.append((idx, QuantileBin(lo, hi, cr)))
    indices = [i for i, _ in rows]
    if indices != list(range(1, len(rows) + 1)):
        raise InvalidArg(f"{source}: bin_index column must run 1..{len(rows)}")
    model = QuantileModel(tuple(b for _, b in rows), fitted_on=source)
    for w in model.warnings():
        log.log(logging.INFO if quiet else logging.WARNING, "%s: %s", source, w)
    return model


def load_quantiles(path: str | Path) -> QuantileModel:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read quantile model {path}: {exc}") from exc
    return parse_quantiles(text, str(path))


@lru_cache(maxsize=1)
def default_quantiles() -> QuantileModel:
    """The bundled ten-bin table fitted on the original training split."""
    ref = resources.files("chapteralign") / "data" / "quantiles_default.tsv"
    # the original table overlaps between rows 4 and 5; that is known, so stay quiet
    return parse_quantiles(ref.read_text(encoding="utf-8"), "bundled", quiet=True)


def dumps_quantiles(model: QuantileModel) -> str:
    buf = io.StringIO()
    if model.fitted_on:
        buf.write(f"# fitted_on: {model.fitted_on}\n")
    buf.write("\t".join(TSV_HEADER) + "\n")
    for k, b in enumerate(model.bins, 1):
        buf.write(f"{k}\t{b.min_wc}\t{b.max_wc}\t{b.mean_cr:.10g}\n")
    return buf.getvalue()


# ---------------------------------------------------------------------------
# fitting and budgets


def fit_quantiles(pairs: Iterable[tuple[int, int]], fitted_on: str = "") -> QuantileModel:
    """Equal-frequency bins over pairs ranked by chapter word count.

    When the pair count is not a multiple of ten, the first bins get one
    extra pair each.
    """
    pairs = list(pairs)
    if len(pairs) < N_BINS:
        raise InsufficientData(f"need at least {N_BINS} pairs, got {len(pairs)}")
    for cw, sw in pairs:
        if cw <= 0 or sw <= 0:
            raise InvalidArg(f"word counts must be positive, got ({cw}, {sw})")
    ranked = sorted(pairs)
    base, extra = divmod(len(ranked), N_BINS)
    bins = []
    start = 0
    for k in range(N_BINS):
        size = base + (1 if k < extra else 0)
        chunk = ranked[start : start + size]
        start += size
        bins.append(QuantileBin(chunk[0][0], chunk[-1][0], fmean(cw / sw for cw, sw in chunk)))
    model = QuantileModel(tuple(bins), fitted_on=fitted_on)
    for w in model.warnings():
        log.warning("refit: %s", w)
    return model


def round_half_up(x: float) -> int:
    return math.floor(x + 0.5)


def target_length(chapter_wc: int, model: QuantileModel) -> ExtractBudget:
    if chapter_wc < 1:
        raise InvalidArg(f"chapter word count must be >= 1, got {chapter_wc}")
    k = model.bin_for(chapter_wc)
    target = max(1, round_half_up(chapter_wc / model.bins[k].mean_cr))
    return ExtractBudget(target_words=target, bin_index=k, chapter_wc=chapter_wc)


# ---------------------------------------------------------------------------
# assembly


def _empty_like(chapter: Document) -> Document:
    return chapter.with_segments(())


def assemble_extract(chapter: Document, ranked_ids: Sequence[str], budget: ExtractBudget) -> Document:
    """Take segments in rank order until the budget is met; keep the last one whole."""
    if not ranked_ids:
        raise EmptyRanking("ranking is empty")
    if len(set(ranked_ids)) != len(ranked_ids):
        raise InvalidArg("ranked ids must be distinct")
    index = chapter.index_of()
    missing = [sid for sid in ranked_ids if sid not in index]
    if missing:
        raise InconsistentInput(f"ids not in chapter {chapter.doc_id!r}: {missing[:5]}")
    picked = []
    words = 0
    for sid in ranked_ids:
        if words >= budget.target_words:
            break
        picked.append(index[sid])
        words += chapter.segments[index[sid]].word_count
    return chapter.with_segments(chapter.segments[i] for i in sorted(picked))


def oracle_ranking(alignment: AlignmentResult, chapter: Document) -> list[str]:
    """Distinct aligned chapter ids by descending score, chapter order on ties."""
    if not alignment.sentence_level:
        raise WrongAlignmentKind(f"oracle extracts need a sentence-level alignment, got {alignment.method}")
    index = chapter.index_of()
    best: dict[str, float] = {}
    for p in alignment.pairs:
        if p.chapter_segment_id not in index:
            raise InconsistentInput(f"segment {p.chapter_segment_id!r} not in chapter {chapter.doc_id!r}")
        if p.chapter_segment_id not in best or p.score > best[p.chapter_segment_id]:
            best[p.chapter_segment_id] = p.score
    return sorted(best, key=lambda sid: (-best[sid], index[sid]))


def oracle_extract(chapter: Document, summary: Document, alignment: AlignmentResult,
                   budget: ExtractBudget) -> Document:
    """One chapter segment per aligned summary segment, cut to the budget."""
    ranking = oracle_ranking(alignment, chapter)
    if not ranking:
        return _empty_like(chapter)
    return assemble_extract(chapter, ranking, budget)


# ---------------------------------------------------------------------------
# constituents shown inside their sentences


def _merge_ranges(ranges: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    out: list[tuple[int, int]] = []
    for a, b in sorted(ranges):
        if out and a < out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return tuple(out)


def context_expand(extract: Document, chapter: Document) -> Document:
    """Swap each extracted constituent for its whole sentence, with marks.

    ``chapter`` is the sentence-level document. Overlapping marks are merged;
    touching ones stay separate so adjacent constituents render as two pieces.
    """
    index = chapter.index_of()
    marks: dict[str, list[tuple[int, int]]] = {}
    for seg in extract.segments:
        sid = seg.source_sentence_id
        if sid not in index:
            raise InconsistentInput(f"constituent {seg.id!r} points to unknown sentence {sid!r}")
        sent = chapter.segments[index[sid]]
        span = seg.token_span if seg.token_span is not None else (0, len(sent.tokens))
        if not (0 <= span[0] < span[1] <= len(sent.tokens)):
            raise InconsistentInput(f"constituent {seg.id!r} span {span} outside sentence {sid!r}")
        marks.setdefault(sid, []).append(span)
    out = []
    for sid in sorted(marks, key=index.__getitem__):
        final = _merge_ranges(marks[sid])
        seg = chapter.segments[index[sid]]
        out.append(Segment(id=seg.id, tokens=seg.tokens, kind=seg.kind,
                           source_sentence_id=seg.source_sentence_id, char_span=seg.char_span,
                           marks=final))
    return chapter.with_segments(out)


def render_marked(seg: Segment) -> str:
    """``| [marked] | plain | [marked] |`` with pieces split at mark edges."""
    if not seg.marks:
        return f"| {seg.text} |"
    pieces = []
    pos = 0
    for a, b in seg.marks:
        if a > pos:
            pieces.append(" ".join(t.surface for t in seg.tokens[pos:a]))
        pieces.append("[" + " ".join(t.surface for t in seg.tokens[a:b]) + "]")
        pos = b
    if pos < len(seg.tokens):
        pieces.append(" ".join(t.surface for t in seg.tokens[pos:]))
    return "| " + " | ".join(pieces) + " |"


def render_extract(doc: Document) -> str:
    return "\n".join(render_marked(s) for s in doc.segments) + ("\n" if doc.segments else "")
