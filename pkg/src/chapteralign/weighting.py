"""Smooth inverse frequency word weights estimated per chapter.

A word's weight is ``alpha / (alpha + p(w))`` where ``p`` is its relative
frequency in the chapter. Words absent from the chapter get weight 1.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import DegenerateChapter, InvalidArg
from .textcore import Document

DEFAULT_ALPHA = 1e-3
STEM = "stem"
NORM = "norm"


def count_words(chapter: Document, key_mode: str = STEM, include_stopwords: bool = True) -> Counter:
    if key_mode not in (STEM, NORM):
        raise InvalidArg(f"key_mode must be 'stem' or 'norm', got {key_mode!r}")
    counts: Counter = Counter()
    for seg in chapter.segments:
        for tok in seg.tokens:
            if tok.is_punct or (tok.is_stopword and not include_stopwords):
                continue
            counts[tok.stem if key_mode == STEM else tok.norm] += 1
    return counts


def estimate_probs(chapter: Document, key_mode: str = STEM,
                   include_stopwords: bool = True) -> dict[str, float]:
    counts = count_words(chapter, key_mode, include_stopwords)
    total = sum(counts.values())
    if total == 0:
        raise DegenerateChapter(f"chapter {chapter.doc_id!r} has no word tokens")
    return {w: c / total for w, c in counts.items()}


def sif_weight(p: float, alpha: float = DEFAULT_ALPHA) -> float:
    return alpha / (alpha + p)


@dataclass(frozen=True)
class WeightTable:
    alpha: float
    probs: Mapping[str, float]
    weights: Mapping[str, float]
    key_mode: str = STEM
    counts: Mapping[str, int] = field(default_factory=dict)
    # overrides the unseen-word weight; only set by constant_table
    unseen_weight: float | None = None

    @property
    def default_weight(self) -> float:
        if self.unseen_weight is not None:
            return self.unseen_weight
        return sif_weight(0.0, self.alpha)

    def weight(self, key: str) -> float:
        w = self.weights.get(key)
        return self.default_weight if w is None else w

    def rows(self) -> list[tuple[str, int, float, float]]:
        """(key, count, p, W) sorted by descending weight, then key."""
        out = [(k, self.counts.get(k, 0), self.probs[k], self.weights[k]) for k in self.probs]
        out.sort(key=lambda r: (-r[3], r[0]))
        return out


def build_weight_table(probs: Mapping[str, float], alpha: float = DEFAULT_ALPHA,
                       key_mode: str = STEM, counts: Mapping[str, int] | None = None) -> WeightTable:
    if not alpha > 0:
        raise InvalidArg(f"alpha must be positive, got {alpha}")
    for w, p in probs.items():
        if not 0.0 <= p <= 1.0:
            raise InvalidArg(f"probability for {w!r} out of range: {p}")
    weights = {w: sif_weight(p, alpha) for w, p in probs.items()}
    return WeightTable(
        alpha=alpha,
        probs=MappingProxyType(dict(probs)),
        weights=MappingProxyType(weights),
        key_mode=key_mode,
        counts=MappingProxyType(dict(counts or {})),
    )


def chapter_weight_table(chapter: Document, alpha: float = DEFAULT_ALPHA, key_mode: str = STEM,
                         include_stopwords: bool = True) -> WeightTable:
    counts = count_words(chapter, key_mode, include_stopwords)
    total = sum(counts.values())
    if total == 0:
        raise DegenerateChapter(f"chapter {chapter.doc_id!r} has no word tokens")
    probs = {w: c / total for w, c in counts.items()}
    return build_weight_table(probs, alpha, key_mode, counts)


def constant_table(value: float = 0.5, key_mode: str = STEM) -> WeightTable:
    """Table giving every word the same weight.

    Weighted metrics computed with it must equal their unweighted forms.
    """
    if not value > 0:
        raise InvalidArg("constant weight must be positive")
    return WeightTable(alpha=1.0, probs=MappingProxyType({}), weights=MappingProxyType({}),
                       key_mode=key_mode, unseen_weight=value)


def gram_weight(gram: Iterable[str], table: WeightTable) -> float:
    gram = tuple(gram)
    if not gram:
        raise InvalidArg("cannot weight an empty gram")
    return sum(table.weight(w) for w in gram)


def write_weight_tsv(table: WeightTable, fh) -> None:
    fh.write("word\tcount\tp\tW\n")
    for key, count, p, w in table.rows():
        fh.write(f"{key}\t{count}\t{p:.10g}\t{w:.10g}\n")
