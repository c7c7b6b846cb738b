"""Align reference-summary segments to chapter segments.

Sentence-level methods pair each summary segment with one chapter segment
(greedy argmax, or a stable one-to-one matching). Summary-level methods grow a
set of chapter segments scored against the whole summary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import InconsistentAlignment, InvalidArg
from .textcore import Document, Segment

GREEDY = "greedy_sent"
STABLE = "stable_sent"
SUMMARY_WL = "summary_wl"
SUMMARY_WS = "summary_ws"
METHODS = (GREEDY, STABLE, SUMMARY_WL, SUMMARY_WS)
SENTENCE_LEVEL = frozenset({GREEDY, STABLE})

CLI_METHODS = {"greedy": GREEDY, "stable": STABLE, "wl": SUMMARY_WL, "ws": SUMMARY_WS}

PairScorer = Callable[[Segment, Segment], float]


@dataclass(frozen=True)
class AlignmentPair:
    summary_segment_id: str
    chapter_segment_id: str
    score: float


@dataclass
class AlignmentResult:
    method: str
    metric_id: str
    pairs: list[AlignmentPair] = field(default_factory=list)
    selected_ids: list[str] = field(default_factory=list)
    unmatched_summary_ids: list[str] = field(default_factory=list)
    # score after each selection (summary-level methods only)
    trace: list[float] = field(default_factory=list)
    chapter_id: str | None = None
    summary_id: str | None = None

    @property
    def sentence_level(self) -> bool:
        return self.method in SENTENCE_LEVEL

    def chapter_ids(self) -> list[str]:
        if self.sentence_level:
            return [p.chapter_segment_id for p in self.pairs]
        return list(self.selected_ids)

    def mean_score(self) -> float:
        if self.sentence_level:
            return sum(p.score for p in self.pairs) / len(self.pairs) if self.pairs else 0.0
        return self.trace[-1] if self.trace else 0.0


def _check(summary: Document, chapter: Document) -> None:
    if not summary.segments:
        raise InvalidArg(f"summary {summary.doc_id!r} has no segments")
    if not chapter.segments:
        raise InvalidArg(f"chapter {chapter.doc_id!r} has no segments")


def score_matrix(summary: Document, chapter: Document, scorer: PairScorer) -> list[list[float]]:
    """``m[i][j]`` = score of chapter segment j against summary segment i."""
    return [[scorer(c, s) for c in chapter.segments] for s in summary.segments]


def _argmax(row: Sequence[float]) -> int:
    best = 0
    for j in range(1, len(row)):
        if row[j] > row[best]:
            best = j
    return best


def greedy_from_matrix(scores: Sequence[Sequence[float]]) -> list[int]:
    """Best column per row; lowest index on ties. Columns may repeat."""
    return [_argmax(row) for row in scores]


def gale_shapley(scores: Sequence[Sequence[float]]) -> list[int | None]:
    """Row-proposing stable matching over one shared score matrix.

    Both sides rank partners by descending score, breaking ties by index.
    Returns the matched column per row, None for rows left single (only
    possible when there are more rows than columns).
    """
    n_rows = len(scores)
    n_cols = len(scores[0]) if n_rows else 0
    prefs = [sorted(range(n_cols), key=lambda j, r=row: (-r[j], j)) for row in scores]
    # column-side rank of each row: lower is better
    col_rank = []
    for j in range(n_cols):
        order = sorted(range(n_rows), key=lambda i: (-scores[i][j], i))
        rank = [0] * n_rows
        for pos, i in enumerate(order):
            rank[i] = pos
        col_rank.append(rank)
    next_choice = [0] * n_rows
    holder: list[int | None] = [None] * n_cols
    match: list[int | None] = [None] * n_rows
    free = list(range(n_rows - 1, -1, -1))  # pop() yields lowest index first
    while free:
        i = free.pop()
        if next_choice[i] >= n_cols:
            continue
        j = prefs[i][next_choice[i]]
        next_choice[i] += 1
        current = holder[j]
        if current is None:
            holder[j] = i
            match[i] = j
        elif col_rank[j][i] < col_rank[j][current]:
            holder[j] = i
            match[i] = j
            match[current] = None
            free.append(current)
        else:
            free.append(i)
    return match


def blocking_pairs(scores: Sequence[Sequence[float]], match: Sequence[int | None]) -> list[tuple[int, int]]:
    """Pairs (i, j) that strictly prefer each other to their assigned partners."""
    owner = {j: i for i, j in enumerate(match) if j is not None}
    out = []
    for i, row in enumerate(scores):
        mine = match[i]
        for j, s in enumerate(row):
            if j == mine:
                continue
            row_wants = mine is None or s > row[mine]
            other = owner.get(j)
            col_wants = other is None or s > scores[other][j]
            if row_wants and col_wants:
                out.append((i, j))
    return out


def greedy_sentence_align(summary: Document, chapter: Document, scorer: PairScorer,
                          metric_id: str = "", min_score: float = 0.0) -> AlignmentResult:
    _check(summary, chapter)
    scores = score_matrix(summary, chapter, scorer)
    return _pairs_result(GREEDY, metric_id, summary, chapter, scores,
                         greedy_from_matrix(scores), min_score)


def stable_align(summary: Document, chapter: Document, scorer: PairScorer,
                 metric_id: str = "", min_score: float = 0.0) -> AlignmentResult:
    _check(summary, chapter)
    scores = score_matrix(summary, chapter, scorer)
    return _pairs_result(STABLE, metric_id, summary, chapter, scores,
                         gale_shapley(scores), min_score)


def _pairs_result(method, metric_id, summary, chapter, scores, match, min_score) -> AlignmentResult:
    result = AlignmentResult(method=method, metric_id=metric_id,
                             chapter_id=chapter.doc_id, summary_id=summary.doc_id)
    for i, j in enumerate(match):
        s_id = summary.segments[i].id
        if j is None or scores[i][j] < min_score:
            result.unmatched_summary_ids.append(s_id)
            continue
        result.pairs.append(AlignmentPair(s_id, chapter.segments[j].id, scores[i][j]))
    return result


def summary_level_align(summary: Document, chapter: Document, scorer, stop_rule: str,
                        metric_id: str = "") -> AlignmentResult:
    """Greedily add the chapter segment that most improves the set score.

    ``scorer.score_sets(chapter_segments, summary_segments)`` scores a selection
    (kept in chapter order) against the full summary. WL stops once the selected
    word count reaches the summary's; WS stops when nothing strictly improves.
    """
    _check(summary, chapter)
    if stop_rule not in ("WL", "WS"):
        raise InvalidArg(f"stop_rule must be 'WL' or 'WS', got {stop_rule!r}")
    method = SUMMARY_WL if stop_rule == "WL" else SUMMARY_WS
    result = AlignmentResult(method=method, metric_id=metric_id,
                             chapter_id=chapter.doc_id, summary_id=summary.doc_id)
    target = summary.word_count
    refs = list(summary.segments)
    chosen: list[int] = []
    current = 0.0
    words = 0
    while len(chosen) < len(chapter.segments):
        if stop_rule == "WL" and words >= target:
            break
        best_j, best_score = None, None
        for j in range(len(chapter.segments)):
            if j in chosen:
                continue
            picked = [chapter.segments[k] for k in sorted(chosen + [j])]
            s = scorer.score_sets(picked, refs)
            if best_score is None or s > best_score:
                best_j, best_score = j, s
        if stop_rule == "WS" and not best_score > current:
            break
        chosen.append(best_j)
        current = best_score
        words += chapter.segments[best_j].word_count
        result.selected_ids.append(chapter.segments[best_j].id)
        result.trace.append(best_score)
    return result


def extract_labels(result: AlignmentResult, chapter: Document) -> list[int]:
    index = chapter.index_of()
    labels = [0] * len(chapter.segments)
    for cid in result.chapter_ids():
        if cid not in index:
            raise InconsistentAlignment(f"segment {cid!r} is not in chapter {chapter.doc_id!r}")
        labels[index[cid]] = 1
    return labels


def result_to_record(result: AlignmentResult, chapter: Document) -> dict:
    if result.sentence_level:
        pairs = [{"s": p.summary_segment_id, "c": p.chapter_segment_id, "score": p.score}
                 for p in result.pairs]
    else:
        pairs = [{"s": None, "c": cid, "score": sc}
                 for cid, sc in zip(result.selected_ids, result.trace)]
    return {
        "chapter_id": chapter.doc_id,
        "summary_id": result.summary_id,
        "method": result.method,
        "metric": result.metric_id,
        "pairs": pairs,
        "unmatched": list(result.unmatched_summary_ids),
        "labels": extract_labels(result, chapter),
    }


def result_from_record(record: dict) -> AlignmentResult:
    method = record["method"]
    if method not in METHODS:
        raise InvalidArg(f"unknown alignment method {method!r}")
    result = AlignmentResult(method=method, metric_id=record.get("metric", ""),
                             chapter_id=record.get("chapter_id"),
                             summary_id=record.get("summary_id"),
                             unmatched_summary_ids=list(record.get("unmatched", [])))
    for p in record.get("pairs", []):
        if method in SENTENCE_LEVEL:
            result.pairs.append(AlignmentPair(p["s"], p["c"], float(p["score"])))
        else:
            result.selected_ids.append(p["c"])
            result.trace.append(float(p["score"]))
    return result


def dumps_record(record: dict) -> str:
    return json.dumps(record, sort_keys=False, ensure_ascii=False)
