"""Bracketed constituency trees (Penn Treebank notation)."""

from __future__ import annotations

import re
from pathlib import Path
from typing import Iterator

from .errors import IoError, ParseError

WRAPPER_LABELS = frozenset({"", "ROOT", "TOP"})

_TOKEN = re.compile(r"\(|\)|[^\s()]+")


class Node:
    """Tree node. Preterminals carry ``word`` and ``index`` and have no children."""

    __slots__ = ("label", "children", "parent", "word", "index")

    def __init__(self, label: str, children: list["Node"] | None = None,
                 word: str | None = None, index: int | None = None):
        self.label = label
        self.children = children or []
        self.parent: Node | None = None
        self.word = word
        self.index = index
        for c in self.children:
            c.parent = self

    @property
    def is_leaf(self) -> bool:
        return self.word is not None

    @property
    def base_label(self) -> str:
        """Label without function tags or indices (``NP-SBJ-1`` -> ``NP``)."""
        if self.label.startswith("-"):
            return self.label
        return re.split(r"[-=]", self.label, maxsplit=1)[0]

    def child_labels(self) -> set[str]:
        return {c.base_label for c in self.children}

    def preorder(self) -> Iterator["Node"]:
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def leaves(self) -> list["Node"]:
        return [n for n in self.preorder() if n.is_leaf]

    def left_siblings(self) -> list["Node"]:
        if self.parent is None:
            return []
        sibs = self.parent.children
        return sibs[: sibs.index(self)]

    def detach(self) -> None:
        if self.parent is not None:
            self.parent.children.remove(self)
            self.parent = None

    def copy(self) -> "Node":
        if self.is_leaf:
            return Node(self.label, word=self.word, index=self.index)
        return Node(self.label, [c.copy() for c in self.children])

    def to_bracketed(self) -> str:
        if self.is_leaf:
            return f"({self.label} {self.word})"
        inner = " ".join(c.to_bracketed() for c in self.children)
        return f"({self.label} {inner})" if self.label else f"({inner})"

    def __repr__(self) -> str:
        return f"Node({self.to_bracketed()})"


class ParseTree:
    """A sentence parse; ``root`` is the outermost node as written."""

    def __init__(self, root: Node):
        self.root = root

    @property
    def clause_root(self) -> Node:
        """Top node below any unary ROOT/TOP wrapper."""
        node = self.root
        while node.label in WRAPPER_LABELS and len(node.children) == 1 and not node.children[0].is_leaf:
            node = node.children[0]
        return node

    def leaves(self) -> list[Node]:
        return self.root.leaves()

    def words(self) -> list[str]:
        return [n.word for n in self.leaves()]

    def to_bracketed(self) -> str:
        return self.root.to_bracketed()

    def __len__(self) -> int:
        return len(self.leaves())


def parse_bracketed(text: str) -> ParseTree:
    """Parse one tree such as ``(S (NP (PRP I)) (VP (VBD ran)))``."""
    tokens = [(m.group(), m.start()) for m in _TOKEN.finditer(text)]
    if not tokens:
        raise ParseError("empty tree", 0)
    pos = 0
    counter = 0

    def parse_node() -> Node:
        nonlocal pos, counter
        tok, off = tokens[pos]
        if tok != "(":
            raise ParseError(f"expected '(' but found {tok!r}", off)
        pos += 1
        if pos >= len(tokens):
            raise ParseError("unexpected end of input", len(text))
        label = ""
        tok, off = tokens[pos]
        if tok not in "()":
            label = tok
            pos += 1
        if pos >= len(tokens):
            raise ParseError("unexpected end of input", len(text))
        tok, off = tokens[pos]
        if tok not in "()":
            # preterminal: (TAG word)
            word = tok
            pos += 1
            if pos >= len(tokens) or tokens[pos][0] != ")":
                where = tokens[pos][1] if pos < len(tokens) else len(text)
                raise ParseError("expected ')' after leaf", where)
            pos += 1
            node = Node(label, word=word, index=counter)
            counter += 1
            return node
        children = []
        while True:
            if pos >= len(tokens):
                raise ParseError("unbalanced parentheses", len(text))
            tok, off = tokens[pos]
            if tok == ")":
                pos += 1
                break
            children.append(parse_node())
        if not children:
            raise ParseError("node without children", off)
        return Node(label, children)

    root = parse_node()
    if pos != len(tokens):
        raise ParseError("trailing input after tree", tokens[pos][1])
    return ParseTree(root)


def read_trees(path: str | Path) -> list[ParseTree]:
    """One tree per line; blank and ``#`` lines are skipped."""
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IoError(f"cannot read trees from {path}: {exc}") from exc
    trees = []
    for lineno, line in enumerate(lines, 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            trees.append(parse_bracketed(line))
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc.message}", exc.offset) from exc
    return trees
