"""Split parsed sentences into clause-like constituents.

Collected constituents are relative clauses and the highest S/SBAR/VP node
reachable upward from any node with both NP and VP children; the climb stops
below the sentence's top clause, which is never collected itself. Conjunctions left of a collected node
become their own pieces; words not covered by any collected node form the
remainder. Pieces are then split at gaps, ordered, given back their
punctuation and short pieces are merged into a neighbour.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .errors import InconsistentInput, MissingParse
from .textcore import CONSTITUENT, Document, Segment, is_punct
from .trees import Node, ParseTree

DEFAULT_MIN_LEN = 5
CLIMB_LABELS = frozenset({"SBAR", "S", "VP"})
CLAUSE_LABELS = frozenset({"S", "SBAR"})
WH_LABELS = frozenset({"WHNP", "WHADVP", "WHPP"})


@dataclass(frozen=True)
class ConstituentSpan:
    indices: tuple[int, ...]
    text: str
    source_sentence_id: str | None = None

    @property
    def start(self) -> int:
        return self.indices[0]

    @property
    def end(self) -> int:
        return self.indices[-1] + 1


def is_relative_clause(node: Node) -> bool:
    return (
        not node.is_leaf
        and node.base_label == "SBAR"
        and bool(node.children)
        and node.children[0].base_label in WH_LABELS
    )


def _remove_punct(root: Node) -> list[int]:
    removed = []
    for leaf in root.leaves():
        if is_punct(leaf.word):
            removed.append(leaf.index)
            node = leaf
            # prune ancestors left empty
            while node.parent is not None and len(node.parent.children) == 1:
                node = node.parent
            if node.parent is None:
                node.children = []  # the sentence was punctuation only
            else:
                node.detach()
    return sorted(removed)


def _climb(node: Node, root: Node) -> Node:
    stag = node
    while (stag.parent is not None and stag.parent is not root
           and stag.parent.base_label in CLIMB_LABELS):
        stag = stag.parent
        if stag.base_label in CLAUSE_LABELS and not (stag.child_labels() & {"NP", "VP"}):
            break
    return stag


def collect_subtrees(root: Node) -> list[Node]:
    collected = []
    for st in list(root.preorder()):
        if st.is_leaf:
            continue
        if {"NP", "VP"} <= st.child_labels():
            node = _climb(st, root)
        elif is_relative_clause(st):
            node = st
        else:
            continue
        # the sentence's own top clause is never a constituent
        if node is not root:
            collected.append(node)
    return collected


def _attached(node: Node, root: Node) -> bool:
    while node is not root:
        if node.parent is None:
            return False
        node = node.parent
    return True


def _word_lists(root: Node, collected: Sequence[Node]) -> list[list[int]]:
    lists = []
    for st in collected:
        if not _attached(st, root):
            continue
        for left in st.left_siblings():
            if left.base_label == "CC":
                lists.append([n.index for n in left.leaves()])
                left.detach()
        words = [n.index for n in st.leaves()]
        if words:
            lists.append(words)
        st.detach()
    rest = [n.index for n in root.leaves()]
    if rest:
        lists.append(rest)
    return lists


def _split_noncontiguous(lists: list[list[int]], punct: set[int]) -> list[list[int]]:
    out = []
    for words in lists:
        words = sorted(words)
        run = [words[0]]
        for a, b in zip(words, words[1:]):
            if all(k in punct for k in range(a + 1, b)):
                run.append(b)
            else:
                out.append(run)
                run = [b]
        out.append(run)
    return out


def _insert_punctuation(lists: list[list[int]], punct: Sequence[int]) -> list[list[int]]:
    owner = {}
    for k, words in enumerate(lists):
        for i in words:
            owner[i] = k
    for p in punct:
        preceding = [i for i in owner if i < p]
        k = owner[max(preceding)] if preceding else 0
        lists[k].append(p)
    for words in lists:
        words.sort()
    return lists


def _concatenate_short(lists: list[list[int]], n_words, min_len: int) -> list[list[int]]:
    out: list[list[int]] = []
    carry: list[int] = []
    for words in lists:
        words = carry + words
        carry = []
        if n_words(words) < min_len:
            if out:
                out[-1] = out[-1] + words
            else:
                carry = words
        else:
            out.append(words)
    if carry:
        out.append(carry)
    return out


def constituent_segments(tree: ParseTree, min_len: int = DEFAULT_MIN_LEN,
                         sentence_id: str | None = None) -> list[ConstituentSpan]:
    work = ParseTree(tree.root.copy())
    surfaces = {n.index: n.word for n in work.leaves()}
    if not surfaces:
        return []
    punct = _remove_punct(work.root)
    root = work.clause_root if work.root.children else work.root
    if not root.leaves():
        lists = []
    else:
        lists = _word_lists(root, collect_subtrees(root))
    if not lists:
        lists = [sorted(punct)]
        punct = []
    else:
        lists = _split_noncontiguous(lists, set(punct))
        lists.sort(key=lambda w: w[0])
        lists = _insert_punctuation(lists, punct)
    punct_set = {i for i, w in surfaces.items() if is_punct(w)}
    lists = _concatenate_short(lists, lambda ws: sum(1 for i in ws if i not in punct_set), min_len)
    return [
        ConstituentSpan(tuple(ws), " ".join(surfaces[i] for i in ws), sentence_id)
        for ws in lists
    ]


def segment_sentence(sentence: Segment, tree: ParseTree,
                     min_len: int = DEFAULT_MIN_LEN) -> list[Segment]:
    if len(tree) != len(sentence.tokens):
        raise InconsistentInput(
            f"tree for sentence {sentence.id!r} has {len(tree)} leaves, "
            f"sentence has {len(sentence.tokens)} tokens"
        )
    spans = constituent_segments(tree, min_len, sentence.id)
    out = []
    for k, span in enumerate(spans):
        toks = tuple(replace(sentence.tokens[j], index=i) for i, j in enumerate(span.indices))
        out.append(Segment(id=f"{sentence.id}.{k}", tokens=toks, kind=CONSTITUENT,
                           source_sentence_id=sentence.id,
                           token_span=(span.start, span.end)))
    return out


def segment_document(chapter: Document, trees: Mapping[str, ParseTree] | Sequence[ParseTree],
                     min_len: int = DEFAULT_MIN_LEN) -> Document:
    """Replace every sentence of ``chapter`` by its constituents.

    ``trees`` maps sentence id to tree, or is a sequence aligned with the
    sentence order.
    """
    if not isinstance(trees, Mapping):
        trees = {s.id: t for s, t in zip(chapter.segments, trees)}
    segments = []
    for sent in chapter.segments:
        tree = trees.get(sent.id)
        if tree is None:
            raise MissingParse(sent.id)
        segments.extend(segment_sentence(sent, tree, min_len))
    return chapter.with_segments(segments)


def spans_record(sentence_id: str, spans: Sequence[ConstituentSpan]) -> str:
    return json.dumps({
        "sentence_id": sentence_id,
        "spans": [{"start": s.start, "end": s.end, "text": s.text} for s in spans],
    }, ensure_ascii=False)
