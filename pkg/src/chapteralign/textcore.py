"""Tokens, segments, documents and the string primitives every metric shares."""

from __future__ import annotations

import json
import string
import unicodedata
from collections import Counter
from dataclasses import dataclass, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .errors import EmptyText, InvalidArg, IoError
from .porter import stem

SENTENCE = "sentence"
CONSTITUENT = "constituent"
CHAPTER = "chapter"
REFERENCE = "reference_summary"
GENERATED = "generated_summary"
ROLES = (CHAPTER, REFERENCE, GENERATED)


def _is_punct_char(ch: str) -> bool:
    return ch in string.punctuation or unicodedata.category(ch).startswith("P")


def is_punct(text: str) -> bool:
    return bool(text) and all(_is_punct_char(c) for c in text)


@dataclass(frozen=True, slots=True)
class Token:
    surface: str
    norm: str
    stem: str
    index: int
    is_stopword: bool = False
    is_punct: bool = False

    def key(self, use_stems: bool) -> str:
        return self.stem if use_stems else self.norm


@dataclass(frozen=True)
class Segment:
    """A sentence or constituent: the unit that gets aligned.

    ``marks`` holds half-open token ranges highlighted inside the segment; it is
    only filled in when constituents are shown in their sentence context.
    """

    id: str
    tokens: tuple[Token, ...]
    kind: str = SENTENCE
    source_sentence_id: str | None = None
    char_span: tuple[int, int] | None = None
    # half-open token range inside the source sentence (constituents only)
    token_span: tuple[int, int] | None = None
    marks: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if not self.tokens:
            raise InvalidArg(f"segment {self.id!r} has no tokens")
        if self.source_sentence_id is None:
            object.__setattr__(self, "source_sentence_id", self.id)

    @property
    def words(self) -> list[Token]:
        return [t for t in self.tokens if not t.is_punct]

    @property
    def word_count(self) -> int:
        return sum(1 for t in self.tokens if not t.is_punct)

    @property
    def text(self) -> str:
        return " ".join(t.surface for t in self.tokens)


@dataclass(frozen=True)
class Document:
    doc_id: str
    role: str
    segments: tuple[Segment, ...]
    source: str | None = None

    def __post_init__(self):
        ids = [s.id for s in self.segments]
        if len(set(ids)) != len(ids):
            raise InvalidArg(f"duplicate segment ids in document {self.doc_id!r}")

    def __len__(self) -> int:
        return len(self.segments)

    @property
    def word_count(self) -> int:
        return sum(s.word_count for s in self.segments)

    def segment(self, segment_id: str) -> Segment:
        for s in self.segments:
            if s.id == segment_id:
                return s
        raise KeyError(segment_id)

    def index_of(self) -> dict[str, int]:
        return {s.id: i for i, s in enumerate(self.segments)}

    def with_segments(self, segments: Iterable[Segment]) -> "Document":
        return replace(self, segments=tuple(segments))


# ---------------------------------------------------------------------------
# stop words


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Read a one-word-per-line list; ``#`` lines and blanks are skipped."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IoError(f"cannot read stop-word file {path}: {exc}") from exc
    words = set()
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        words.add(line.lower())
    return frozenset(words)


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    with resources.as_file(resources.files("chapteralign") / "data" / "stopwords_en.txt") as p:
        return load_stopwords(p)


# ---------------------------------------------------------------------------
# tokenization


def _split_fallback(chunk: str) -> list[str]:
    if is_punct(chunk):
        return [chunk]
    start, end = 0, len(chunk)
    while start < end and _is_punct_char(chunk[start]):
        start += 1
    while end > start and _is_punct_char(chunk[end - 1]):
        end -= 1
    return list(chunk[:start]) + [chunk[start:end]] + list(chunk[end:])


def make_token(surface: str, index: int, stopwords: frozenset[str] | None = None) -> Token:
    norm = surface.lower()
    punct = is_punct(surface)
    sw = default_stopwords() if stopwords is None else stopwords
    return Token(
        surface=surface,
        norm=norm,
        stem=norm if punct else stem(norm),
        index=index,
        is_stopword=norm in sw,
        is_punct=punct,
    )


def tokenize(
    text: str,
    pretokenized: bool = True,
    stopwords: frozenset[str] | None = None,
) -> list[Token]:
    """Split text into tokens.

    Pretokenized input is split on single spaces. Otherwise whitespace
    splitting is followed by detaching leading and trailing punctuation
    characters, one token per character.
    """
    if text is None or not text.strip():
        raise EmptyText("cannot tokenize empty text")
    if pretokenized:
        surfaces = [s for s in text.strip().split(" ") if s]
    else:
        surfaces = [piece for chunk in text.split() for piece in _split_fallback(chunk)]
    return [make_token(s, i, stopwords) for i, s in enumerate(surfaces)]


# ---------------------------------------------------------------------------
# n-grams and LCS


def ngrams(tokens: Sequence[Token], n: int, use_stems: bool = True) -> Counter:
    if n < 1:
        raise InvalidArg(f"n must be >= 1, got {n}")
    keys = [t.key(use_stems) for t in tokens]
    return Counter(tuple(keys[i : i + n]) for i in range(len(keys) - n + 1))


def lcs_table(a: Sequence, b: Sequence) -> list[list[int]]:
    """Suffix DP: ``table[i][j]`` is the LCS length of ``a[i:]`` and ``b[j:]``."""
    n, m = len(a), len(b)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row, below = table[i], table[i + 1]
        ai = a[i]
        for j in range(m - 1, -1, -1):
            if ai == b[j]:
                row[j] = below[j + 1] + 1
            else:
                row[j] = below[j] if below[j] >= row[j + 1] else row[j + 1]
    return table


def lcs_pairs(a: Sequence, b: Sequence) -> list[tuple[int, int]]:
    """Index pairs of one longest common subsequence, leftmost in ``a``."""
    table = lcs_table(a, b)
    i = j = 0
    out = []
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            out.append((i, j))
            i += 1
            j += 1
        elif table[i + 1][j] >= table[i][j + 1]:
            i += 1
        else:
            j += 1
    return out


def lcs(a: Sequence, b: Sequence) -> list:
    return [a[i] for i, _ in lcs_pairs(a, b)]


# ---------------------------------------------------------------------------
# documents


def segment_from_text(
    segment_id: str,
    text: str,
    pretokenized: bool = True,
    stopwords: frozenset[str] | None = None,
) -> Segment:
    return Segment(id=segment_id, tokens=tuple(tokenize(text, pretokenized, stopwords)))


def document_from_sentences(
    doc_id: str,
    sentences: Sequence[str],
    role: str = CHAPTER,
    source: str | None = None,
    pretokenized: bool = True,
    stopwords: frozenset[str] | None = None,
) -> Document:
    segments = [
        segment_from_text(f"{doc_id}:{i}", s, pretokenized, stopwords)
        for i, s in enumerate(sentences)
    ]
    return Document(doc_id=doc_id, role=role, segments=tuple(segments), source=source)


def concat_segments(segments: Sequence[Segment], segment_id: str = "concat") -> Segment:
    """Join segments into one pseudo-segment, re-indexing tokens."""
    tokens = [replace(t, index=i) for i, t in enumerate(t for s in segments for t in s.tokens)]
    return Segment(id=segment_id, tokens=tuple(tokens))


def document_from_record(record: dict, pretokenized: bool = True,
                         stopwords: frozenset[str] | None = None) -> Document:
    try:
        doc_id = str(record["doc_id"])
        sentences = record["sentences"]
    except KeyError as exc:
        raise InvalidArg(f"document record missing field {exc}") from exc
    role = record.get("role", CHAPTER)
    if role not in ROLES:
        raise InvalidArg(f"unknown document role {role!r}")
    if not sentences:
        raise InvalidArg(f"document {doc_id!r} has no sentences")
    return document_from_sentences(
        doc_id, sentences, role=role, source=record.get("source"),
        pretokenized=pretokenized, stopwords=stopwords,
    )


def read_documents(path: str | Path, pretokenized: bool = True,
                   stopwords: frozenset[str] | None = None) -> list[Document]:
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IoError(f"cannot read documents from {path}: {exc}") from exc
    docs = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InvalidArg(f"{path}:{lineno}: bad JSON ({exc.msg})") from exc
        docs.append(document_from_record(record, pretokenized, stopwords))
    return docs


def document_to_record(doc: Document) -> dict:
    return {
        "doc_id": doc.doc_id,
        "role": doc.role,
        "source": doc.source,
        "sentences": [s.text for s in doc.segments],
    }
