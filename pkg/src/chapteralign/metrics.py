"""Segment similarity metrics used for alignment and evaluation.

ROUGE-1/2/L come in a plain form and a weighted form where every n-gram or
LCS count is replaced by the summed word weights of a chapter
:class:`~chapteralign.weighting.WeightTable`. Punctuation never counts.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from statistics import fmean
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidArg, IoError, MissingVector, ZeroVector
from .textcore import Document, Segment, Token, concat_segments, lcs_pairs
from .weighting import STEM, WeightTable, gram_weight

R1 = "R1"
R2 = "R2"
RL = "RL"
R1_STOPSTEM = "R1_stopstem"
R_WTD = "R_wtd"
RM = "RM"
RM_WTD = "RM_wtd"
METEOR = "METEOR"
COSINE = "COSINE"

METRIC_IDS = (R1, R2, RL, R1_STOPSTEM, R_WTD, RM, RM_WTD, METEOR, COSINE)
WEIGHTED_METRICS = frozenset({R_WTD, RM_WTD})

CLI_NAMES = {
    "r1": R1,
    "r2": R2,
    "rl": RL,
    "r1-stopstem": R1_STOPSTEM,
    "r-wtd": R_WTD,
    "rm": RM,
    "rm-wtd": RM_WTD,
    "meteor": METEOR,
    "cosine": COSINE,
}

COMPONENTS = ("precision", "recall", "f1")


@dataclass(frozen=True)
class ScoreTriple:
    precision: float
    recall: float
    f1: float
    degenerate: bool = False

    @classmethod
    def from_pr(cls, precision: float, recall: float, degenerate: bool = False) -> "ScoreTriple":
        denom = precision + recall
        f1 = 2 * precision * recall / denom if denom > 0 else 0.0
        return cls(precision, recall, f1, degenerate)

    @classmethod
    def zero(cls) -> "ScoreTriple":
        return cls(0.0, 0.0, 0.0, degenerate=True)

    def get(self, component: str) -> float:
        if component not in COMPONENTS:
            raise InvalidArg(f"unknown score component {component!r}")
        return getattr(self, component)


@dataclass(frozen=True)
class MetricConfig:
    """What to compute and with which resources.

    ``stopwords`` set means stop words are dropped before matching.
    ``use_stems`` is ignored by weighted metrics, which always match on the
    weight table's key mode so that weight lookups hit the matched keys.
    """

    metric_id: str = R_WTD
    weight_table: WeightTable | None = None
    stopwords: frozenset[str] | None = None
    use_stems: bool = True
    component: str = "f1"
    matchers: tuple[str, ...] = ("exact", "stem")
    synonyms: Mapping[str, frozenset[str]] | None = None
    vectors: "SegmentVectors | None" = None

    def __post_init__(self):
        if self.metric_id not in METRIC_IDS:
            raise InvalidArg(f"unknown metric {self.metric_id!r}")
        if self.component not in COMPONENTS:
            raise InvalidArg(f"unknown score component {self.component!r}")
        if self.metric_id in WEIGHTED_METRICS and self.weight_table is None:
            raise InvalidArg(f"{self.metric_id} needs a weight table")
        if self.metric_id == COSINE and self.vectors is None:
            raise InvalidArg("COSINE needs segment vectors")

    @property
    def match_on_stems(self) -> bool:
        if self.weight_table is not None:
            return self.weight_table.key_mode == STEM
        return self.use_stems


def default_config(metric_id: str, weight_table: WeightTable | None = None, **kw) -> MetricConfig:
    """Configuration for each named metric as used in alignment.

    Plain R-1/R-2/R-L match surface forms; the stop/stem baseline drops stop
    words and stems; the composites stem.
    """
    from .textcore import default_stopwords

    if metric_id in (R1, R2, RL):
        kw.setdefault("use_stems", False)
    elif metric_id == R1_STOPSTEM:
        kw.setdefault("stopwords", default_stopwords())
        kw.setdefault("use_stems", True)
    return MetricConfig(metric_id=metric_id,
                        weight_table=weight_table if metric_id in WEIGHTED_METRICS else None,
                        **kw)


# ---------------------------------------------------------------------------
# ROUGE


def eligible(tokens: Iterable[Token], stopwords: frozenset[str] | None = None) -> list[Token]:
    return [t for t in tokens if not t.is_punct and not (stopwords and t.norm in stopwords)]


def _keys(seg: Segment, cfg: MetricConfig) -> list[str]:
    stems = cfg.match_on_stems
    return [t.key(stems) for t in eligible(seg.tokens, cfg.stopwords)]


def _grams(keys: Sequence[str], n: int) -> Counter:
    return Counter(tuple(keys[i : i + n]) for i in range(len(keys) - n + 1))


def rouge_n(cand: Segment, ref: Segment, n: int, cfg: MetricConfig | None = None,
            weighted: bool | None = None) -> ScoreTriple:
    """Clipped n-gram overlap; weighted when the config carries a table."""
    cfg = cfg or MetricConfig(metric_id=R1, use_stems=False)
    if n not in (1, 2):
        raise InvalidArg(f"rouge_n supports n in {{1, 2}}, got {n}")
    table = cfg.weight_table if weighted is not False else None
    c_grams = _grams(_keys(cand, cfg), n)
    r_grams = _grams(_keys(ref, cfg), n)
    if not c_grams or not r_grams:
        return ScoreTriple.zero()
    if table is None:
        overlap = sum(min(c, r_grams[g]) for g, c in c_grams.items())
        return ScoreTriple.from_pr(overlap / sum(c_grams.values()), overlap / sum(r_grams.values()))
    gw = {g: gram_weight(g, table) for g in c_grams.keys() | r_grams.keys()}
    overlap = sum(min(c, r_grams[g]) * gw[g] for g, c in c_grams.items())
    c_total = sum(c * gw[g] for g, c in c_grams.items())
    r_total = sum(c * gw[g] for g, c in r_grams.items())
    return ScoreTriple.from_pr(overlap / c_total, overlap / r_total)


def rouge_l(cand: Segment, ref: Segment, cfg: MetricConfig | None = None,
            weighted: bool | None = None) -> ScoreTriple:
    cfg = cfg or MetricConfig(metric_id=RL, use_stems=False)
    table = cfg.weight_table if weighted is not False else None
    c_keys = _keys(cand, cfg)
    r_keys = _keys(ref, cfg)
    if not c_keys or not r_keys:
        return ScoreTriple.zero()
    pairs = lcs_pairs(c_keys, r_keys)
    if table is None:
        m = len(pairs)
        return ScoreTriple.from_pr(m / len(c_keys), m / len(r_keys))
    if not pairs:
        return ScoreTriple.from_pr(0.0, 0.0)
    m = gram_weight([c_keys[i] for i, _ in pairs], table)
    c_total = gram_weight(c_keys, table)
    r_total = gram_weight(r_keys, table)
    return ScoreTriple.from_pr(m / c_total, m / r_total)


def rouge_triples(cand: Segment, ref: Segment, cfg: MetricConfig) -> tuple[ScoreTriple, ...]:
    return (rouge_n(cand, ref, 1, cfg), rouge_n(cand, ref, 2, cfg), rouge_l(cand, ref, cfg))


def r_wtd(cand: Segment, ref: Segment, table: WeightTable, component: str = "f1") -> float:
    """Mean of weighted ROUGE-1, ROUGE-2 and ROUGE-L."""
    cfg = MetricConfig(metric_id=R_WTD, weight_table=table, component=component)
    return fmean(t.get(component) for t in rouge_triples(cand, ref, cfg))


# ---------------------------------------------------------------------------
# METEOR (exact / stem / optional synonym matchers)

EXHAUSTIVE_MAX_MATCHES = 12
_SEARCH_NODE_BUDGET = 200_000


@dataclass(frozen=True)
class MeteorResult:
    score: float
    precision: float
    recall: float
    fmean: float
    penalty: float
    matches: int
    chunks: int
    exhaustive: bool = True
    alignment: tuple[tuple[int, int], ...] = ()


def count_chunks(alignment: Iterable[tuple[int, int]]) -> int:
    """Runs of alignments contiguous and in the same order on both sides."""
    pairs = sorted(alignment)
    chunks = 0
    prev = None
    for c, r in pairs:
        if prev is None or c != prev[0] + 1 or r != prev[1] + 1:
            chunks += 1
        prev = (c, r)
    return chunks


def load_synonyms(path: str | Path) -> dict[str, frozenset[str]]:
    """Read ``word<TAB>synonym`` lines into a symmetric lookup."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IoError(f"cannot read synonym file {path}: {exc}") from exc
    table: dict[str, set[str]] = {}
    for line in lines:
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.rstrip("\n").split("\t")
        if len(parts) != 2:
            raise InvalidArg(f"bad synonym line: {line!r}")
        a, b = (p.strip().lower() for p in parts)
        table.setdefault(a, set()).add(b)
        table.setdefault(b, set()).add(a)
    return {k: frozenset(v) for k, v in table.items()}


def _compatible(stage: str, c: Token, r: Token, synonyms) -> bool:
    if stage == "exact":
        return c.norm == r.norm
    if stage == "stem":
        return c.stem == r.stem
    if stage == "synonym":
        return bool(synonyms) and r.norm in synonyms.get(c.norm, ())
    raise InvalidArg(f"unknown METEOR matcher {stage!r}")


def _search_stage(edges: dict[int, list[int]], fixed: list[tuple[int, int]],
                  taken_refs: set[int]) -> list[tuple[int, int]] | None:
    """Max-cardinality, then min-chunk, set of new pairs; None if over budget."""
    cands = sorted(edges)
    best: list = [None, None, None]  # size, chunks, pairs
    nodes = 0
    chosen: list[tuple[int, int]] = []
    used = set(taken_refs)

    def visit(k: int) -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > _SEARCH_NODE_BUDGET:
            return False
        remaining = len(cands) - k
        if best[0] is not None and len(chosen) + remaining < best[0]:
            return True
        if k == len(cands):
            size = len(chosen)
            chunks = count_chunks(fixed + chosen)
            if best[0] is None or size > best[0] or (size == best[0] and chunks < best[1]):
                best[:] = [size, chunks, list(chosen)]
            return True
        c = cands[k]
        for r in edges[c]:
            if r in used:
                continue
            used.add(r)
            chosen.append((c, r))
            ok = visit(k + 1)
            chosen.pop()
            used.discard(r)
            if not ok:
                return False
        return visit(k + 1)

    if not visit(0):
        return None
    return best[2] or []


def _greedy_stage(edges: dict[int, list[int]], fixed: list[tuple[int, int]],
                  taken_refs: set[int]) -> list[tuple[int, int]]:
    ref_of = dict(fixed)
    used = set(taken_refs)
    out = []
    for c in sorted(edges):
        free = [r for r in edges[c] if r not in used]
        if not free:
            continue
        prev = ref_of.get(c - 1)
        r = prev + 1 if prev is not None and prev + 1 in free else free[0]
        used.add(r)
        ref_of[c] = r
        out.append((c, r))
    return out


def meteor_details(cand: Segment, ref: Segment, matchers: Sequence[str] = ("exact", "stem"),
                   synonyms: Mapping[str, frozenset[str]] | None = None) -> MeteorResult:
    c_toks = eligible(cand.tokens)
    r_toks = eligible(ref.tokens)
    alignment: list[tuple[int, int]] = []
    exhaustive = True
    for stage in matchers:
        done_c = {c for c, _ in alignment}
        done_r = {r for _, r in alignment}
        edges = {}
        for i, ct in enumerate(c_toks):
            if i in done_c:
                continue
            rs = [j for j, rt in enumerate(r_toks)
                  if j not in done_r and _compatible(stage, ct, rt, synonyms)]
            if rs:
                edges[i] = rs
        if not edges:
            continue
        bound = min(len(edges), len({r for rs in edges.values() for r in rs}))
        new = None
        if len(alignment) + bound <= EXHAUSTIVE_MAX_MATCHES:
            new = _search_stage(edges, alignment, done_r)
        if new is None:
            exhaustive = False
            new = _greedy_stage(edges, alignment, done_r)
        alignment.extend(new)
    m = len(alignment)
    if m == 0:
        return MeteorResult(0.0, 0.0, 0.0, 0.0, 0.0, 0, 0, exhaustive)
    p = m / len(c_toks)
    r = m / len(r_toks)
    f_mean = 10 * p * r / (r + 9 * p)
    chunks = count_chunks(alignment)
    penalty = 0.5 * (chunks / m) ** 3
    return MeteorResult(f_mean * (1 - penalty), p, r, f_mean, penalty, m, chunks, exhaustive,
                        tuple(sorted(alignment)))


def meteor(cand: Segment, ref: Segment, matchers: Sequence[str] = ("exact", "stem"),
           synonyms: Mapping[str, frozenset[str]] | None = None) -> float:
    return meteor_details(cand, ref, matchers, synonyms).score


def rm(cand: Segment, ref: Segment, table: WeightTable | None = None, component: str = "f1",
       matchers: Sequence[str] = ("exact", "stem"), synonyms=None) -> float:
    """Mean of ROUGE-1/2/L (weighted when a table is given) and METEOR."""
    metric = RM_WTD if table is not None else RM
    cfg = MetricConfig(metric_id=metric, weight_table=table, component=component)
    parts = [t.get(component) for t in rouge_triples(cand, ref, cfg)]
    parts.append(meteor(cand, ref, matchers, synonyms))
    return fmean(parts)


# ---------------------------------------------------------------------------
# embedding cosine


class SegmentVectors:
    """Precomputed fixed-dimension vectors keyed by segment id."""

    def __init__(self, vectors: Mapping[str, Sequence[float]]):
        self._vecs: dict[str, np.ndarray] = {}
        dim = None
        for key, v in vectors.items():
            arr = np.asarray(v, dtype=float)
            if arr.ndim != 1:
                raise InvalidArg(f"vector for {key!r} is not one-dimensional")
            if dim is None:
                dim = arr.shape[0]
            elif arr.shape[0] != dim:
                raise InvalidArg(f"vector for {key!r} has dimension {arr.shape[0]}, expected {dim}")
            if not np.all(np.isfinite(arr)):
                raise InvalidArg(f"vector for {key!r} has non-finite components")
            self._vecs[key] = arr
        self.dim = dim

    def __contains__(self, key: str) -> bool:
        return key in self._vecs

    def __len__(self) -> int:
        return len(self._vecs)

    def __getitem__(self, key: str) -> np.ndarray:
        try:
            return self._vecs[key]
        except KeyError:
            raise MissingVector(key) from None

    @classmethod
    def load(cls, path: str | Path) -> "SegmentVectors":
        vectors = {}
        try:
            lines = Path(path).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise IoError(f"cannot read vectors from {path}: {exc}") from exc
        for lineno, line in enumerate(lines, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                vectors[str(rec["segment_id"])] = rec["vector"]
            except (json.JSONDecodeError, KeyError) as exc:
                raise InvalidArg(f"{path}:{lineno}: bad vector record") from exc
        return cls(vectors)


def _cos(u: np.ndarray, v: np.ndarray) -> float:
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("cosine undefined for a zero vector")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def cosine(a: str, b: str, vecs: SegmentVectors) -> float:
    return _cos(vecs[a], vecs[b])


# ---------------------------------------------------------------------------
# scorers: one scalar per (chapter side, summary side)


class Scorer:
    """Callable giving the alignment scalar for a chapter/summary segment pair.

    The chapter side plays the candidate and the summary side the reference.
    """

    def __init__(self, cfg: MetricConfig):
        self.cfg = cfg

    def triple(self, cand: Segment, ref: Segment) -> ScoreTriple | None:
        m = self.cfg.metric_id
        if m == R1 or m == R1_STOPSTEM:
            return rouge_n(cand, ref, 1, self.cfg)
        if m == R2:
            return rouge_n(cand, ref, 2, self.cfg)
        if m == RL:
            return rouge_l(cand, ref, self.cfg)
        return None

    def __call__(self, cand: Segment, ref: Segment) -> float:
        cfg = self.cfg
        triple = self.triple(cand, ref)
        if triple is not None:
            return triple.get(cfg.component)
        m = cfg.metric_id
        if m == R_WTD:
            return fmean(t.get(cfg.component) for t in rouge_triples(cand, ref, cfg))
        if m in (RM, RM_WTD):
            parts = [t.get(cfg.component) for t in rouge_triples(cand, ref, cfg)]
            parts.append(meteor(cand, ref, cfg.matchers, cfg.synonyms))
            return fmean(parts)
        if m == METEOR:
            return meteor(cand, ref, cfg.matchers, cfg.synonyms)
        if m == COSINE:
            return cosine(cand.id, ref.id, cfg.vectors)
        raise InvalidArg(f"unknown metric {m!r}")

    def score_sets(self, cands: Sequence[Segment], refs: Sequence[Segment]) -> float:
        """Score a selection of chapter segments against a set of summary segments."""
        if self.cfg.metric_id == COSINE:
            return _cos(self._pooled(cands), self._pooled(refs))
        return self(concat_segments(cands, "cand"), concat_segments(refs, "ref"))

    def _pooled(self, segs: Sequence[Segment]) -> np.ndarray:
        # averaged token vectors pool exactly by token-count weighting
        vecs = self.cfg.vectors
        weights = np.array([max(s.word_count, 1) for s in segs], dtype=float)
        stacked = np.stack([vecs[s.id] for s in segs])
        return weights @ stacked / weights.sum()


# ---------------------------------------------------------------------------
# whole-summary evaluation against several references

EVAL_METRICS = (R1, R2, RL, METEOR)


@dataclass(frozen=True)
class MultiReferenceScores:
    per_reference: tuple[tuple[str, str, ScoreTriple], ...]  # (metric, reference id, score)
    mean: dict[str, ScoreTriple]
    best: dict[str, ScoreTriple]

    def rows(self) -> list[tuple[str, str, float, float, float]]:
        out = [(m, rid, t.precision, t.recall, t.f1) for m, rid, t in self.per_reference]
        for label, agg in (("mean", self.mean), ("max", self.best)):
            for m, t in agg.items():
                out.append((m, label, t.precision, t.recall, t.f1))
        return out


def summary_triple(metric_id: str, generated: Segment, reference: Segment,
                   cfg: MetricConfig) -> ScoreTriple:
    """Whole-summary score; for METEOR the f1 slot holds the penalised score."""
    if metric_id in (R1, R1_STOPSTEM):
        return rouge_n(generated, reference, 1, cfg)
    if metric_id == R2:
        return rouge_n(generated, reference, 2, cfg)
    if metric_id == RL:
        return rouge_l(generated, reference, cfg)
    if metric_id == METEOR:
        d = meteor_details(generated, reference, cfg.matchers, cfg.synonyms)
        return ScoreTriple(d.precision, d.recall, d.score, degenerate=d.matches == 0)
    raise InvalidArg(f"metric {metric_id!r} is not a summary evaluation metric")


def score_multi_reference(generated: Document, references: Sequence[Document],
                          metric_ids: Sequence[str] = EVAL_METRICS,
                          cfg: MetricConfig | None = None) -> MultiReferenceScores:
    if not references:
        raise InvalidArg("need at least one reference summary")
    cfg = cfg or MetricConfig(metric_id=R1, use_stems=True)
    gen = concat_segments(generated.segments, generated.doc_id) if generated.segments else None
    per_ref = []
    mean: dict[str, ScoreTriple] = {}
    best: dict[str, ScoreTriple] = {}
    for metric_id in metric_ids:
        triples = []
        for ref_doc in references:
            ref = concat_segments(ref_doc.segments, ref_doc.doc_id)
            t = summary_triple(metric_id, gen, ref, cfg) if gen is not None else ScoreTriple.zero()
            triples.append(t)
            per_ref.append((metric_id, ref_doc.doc_id, t))
        mean[metric_id] = ScoreTriple(
            fmean(t.precision for t in triples),
            fmean(t.recall for t in triples),
            fmean(t.f1 for t in triples),
        )
        best[metric_id] = max(triples, key=lambda t: t.f1)
    return MultiReferenceScores(tuple(per_ref), mean, best)
