from __future__ import annotations

from pathlib import Path

import pytest

from chapteralign.textcore import Document, Segment, document_from_sentences, make_token, read_documents
from chapteralign.trees import read_trees

FIXTURES = Path(__file__).parent / "fixtures"


def seg(text: str, seg_id: str = "s") -> Segment:
    """Segment from space-separated tokens."""
    return Segment(id=seg_id, tokens=tuple(make_token(w, i) for i, w in enumerate(text.split())))


def doc(doc_id: str, sentences: list[str], role: str = "chapter") -> Document:
    return document_from_sentences(doc_id, sentences, role=role)


@pytest.fixture(scope="session")
def chapter11() -> Document:
    return read_documents(FIXTURES / "chapter11.jsonl")[0]


@pytest.fixture(scope="session")
def refs11() -> list[Document]:
    return read_documents(FIXTURES / "chapter11_refs.jsonl")


@pytest.fixture(scope="session")
def trees11():
    return read_trees(FIXTURES / "chapter11.trees")
