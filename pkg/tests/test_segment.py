from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from chapteralign.errors import InconsistentInput, MissingParse
from chapteralign.segment import (
    constituent_segments,
    is_relative_clause,
    segment_document,
    segment_sentence,
    spans_record,
)
from chapteralign.textcore import CONSTITUENT
from chapteralign.trees import Node, ParseTree, parse_bracketed

from conftest import doc

WORKED_SPANS = [
    "I thought I should find you in bed , ''",
    "said her husband ,",
    "when he discovered her",
    "lying there .",
]


def test_worked_first_sentence(trees11):
    spans = constituent_segments(trees11[1], min_len=2)
    assert [s.text for s in spans] == WORKED_SPANS


def test_default_min_len_merges_short_pieces(trees11):
    spans = constituent_segments(trees11[1])
    assert all(sum(1 for w in s.text.split() if w.isalnum()) >= 5 for s in spans[1:]) or len(spans) == 1
    assert " ".join(s.text for s in spans) == " ".join(trees11[1].words())


def test_quote_clause_split(trees11):
    texts = [s.text for s in constituent_segments(trees11[26], min_len=2)]
    assert texts == ["`` This is more than folly , ''", "he blurted out ."]


def test_simple_clause_is_one_piece():
    t = parse_bracketed("(ROOT (S (NP (PRP He)) (VP (VBD smoked) (NP (CD two) (NNS cigars))) (. .)))")
    assert [s.text for s in constituent_segments(t, 1)] == ["He smoked two cigars ."]


def test_relative_clause_collected():
    t = parse_bracketed(
        "(S (NP (NP (DT the) (NN man)) (SBAR (WHNP (WP who)) (S (VP (VBD left))))) (VP (VBD smiled)))")
    assert is_relative_clause(t.root.children[0].children[1])
    assert [s.text for s in constituent_segments(t, 1)] == ["the man", "who left", "smiled"]


def test_conjunction_becomes_own_piece():
    t = parse_bracketed(
        "(S (S (NP (PRP I)) (VP (VBD ran))) (CC and) (S (NP (PRP she)) (VP (VBD hid))))")
    assert [s.text for s in constituent_segments(t, 1)] == ["I ran", "and", "she hid"]


def _covers_exactly(spans, n):
    idx = [i for s in spans for i in s.indices]
    return sorted(idx) == list(range(n)) and len(idx) == n


@pytest.mark.parametrize("min_len", [1, 2, 5, 12])
def test_fixture_coverage(chapter11, trees11, min_len):
    for tree, sent in zip(trees11, chapter11.segments):
        spans = constituent_segments(tree, min_len, sent.id)
        assert _covers_exactly(spans, len(sent.tokens)), sent.text
        assert [s.start for s in spans] == sorted(s.start for s in spans)


# random trees: internal labels drawn from clause-ish tags, leaves words or punctuation
LABELS = ["S", "SBAR", "VP", "NP", "PP", "ADVP", "WHNP", "CC"]
LEAVES = ["a", "b", "c", ",", ".", "and", "''"]


@st.composite
def trees(draw, depth=0):
    if depth >= 3 or draw(st.booleans()):
        return Node("W", word=draw(st.sampled_from(LEAVES)))
    label = draw(st.sampled_from(LABELS))
    kids = draw(st.lists(trees(depth=depth + 1), min_size=1, max_size=3))
    return Node(label, kids)


def _index(root: Node) -> ParseTree:
    for k, leaf in enumerate(root.leaves()):
        leaf.index = k
    return ParseTree(root)


@settings(max_examples=200, deadline=None)
@given(trees(), st.integers(1, 6))
def test_random_tree_coverage(root, min_len):
    tree = _index(Node("ROOT", [Node("S", [root])]))
    spans = constituent_segments(tree, min_len)
    assert _covers_exactly(spans, len(tree))


def test_segment_document(chapter11, trees11):
    d = segment_document(chapter11, trees11, min_len=2)
    assert all(s.kind == CONSTITUENT for s in d.segments)
    first = [s for s in d.segments if s.source_sentence_id == "awakening-ch11:1"]
    assert [s.text for s in first] == WORKED_SPANS
    assert [s.id for s in first] == [f"awakening-ch11:1.{k}" for k in range(4)]
    assert first[2].token_span == (14, 18)
    assert sum(len(s.tokens) for s in d.segments) == sum(len(s.tokens) for s in chapter11.segments)


def test_segment_errors(trees11):
    d = doc("c", ["a b ."])
    with pytest.raises(MissingParse):
        segment_document(d, {})
    with pytest.raises(InconsistentInput):
        segment_sentence(d.segments[0], trees11[0])


def test_spans_record():
    t = parse_bracketed("(S (NP (PRP He)) (VP (VBD ran)))")
    assert spans_record("x", constituent_segments(t, 1)) == \
        '{"sentence_id": "x", "spans": [{"start": 0, "end": 2, "text": "He ran"}]}'
