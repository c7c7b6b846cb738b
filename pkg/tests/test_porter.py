from __future__ import annotations

import csv

import pytest
from hypothesis import given, strategies as st

from chapteralign import porter
from chapteralign.porter import stem

from conftest import FIXTURES


def _vectors():
    with open(FIXTURES / "porter_vectors.tsv", encoding="utf-8") as fh:
        return [(r["word"], r["stem"]) for r in csv.DictReader(fh, delimiter="\t")]


def test_frozen_vectors():
    rows = _vectors()
    assert len(rows) > 150
    bad = [(w, s, stem(w)) for w, s in rows if stem(w) != s]
    assert bad == []


@pytest.mark.parametrize("fn, word, expected", [
    (porter._step1a, "caresses", "caress"),
    (porter._step1a, "ponies", "poni"),
    (porter._step1a, "ties", "ti"),
    (porter._step1a, "caress", "caress"),
    (porter._step1a, "cats", "cat"),
    (porter._step1b, "feed", "feed"),
    (porter._step1b, "agreed", "agree"),
    (porter._step1b, "plastered", "plaster"),
    (porter._step1b, "bled", "bled"),
    (porter._step1b, "motoring", "motor"),
    (porter._step1b, "sing", "sing"),
    (porter._step1b, "conflated", "conflate"),
    (porter._step1b, "troubled", "trouble"),
    (porter._step1b, "sized", "size"),
    (porter._step1b, "hopping", "hop"),
    (porter._step1b, "falling", "fall"),
    (porter._step1b, "hissing", "hiss"),
    (porter._step1b, "failing", "fail"),
    (porter._step1b, "filing", "file"),
    (porter._step1c, "happy", "happi"),
    (porter._step1c, "sky", "sky"),
    (porter._step4, "revival", "reviv"),
    (porter._step4, "allowance", "allow"),
    (porter._step4, "adoption", "adopt"),
    (porter._step4, "homologou", "homolog"),
    (porter._step5, "probate", "probat"),
    (porter._step5, "rate", "rate"),
    (porter._step5, "cease", "ceas"),
    (porter._step5, "controll", "control"),
    (porter._step5, "roll", "roll"),
])
def test_article_step_examples(fn, word, expected):
    assert fn(word) == expected


@pytest.mark.parametrize("word, expected", [
    ("relational", "relate"), ("conditional", "condition"), ("rational", "rational"),
    ("valenci", "valence"), ("digitizer", "digitize"), ("vietnamization", "vietnamize"),
    ("sensibiliti", "sensible"),
])
def test_step2_examples(word, expected):
    assert porter._replace_if_measure(word, porter._STEP2, 0) == expected


@pytest.mark.parametrize("word, expected", [
    ("triplicate", "triplic"), ("formative", "form"), ("formalize", "formal"),
    ("electriciti", "electric"), ("hopeful", "hope"), ("goodness", "good"),
])
def test_step3_examples(word, expected):
    assert porter._replace_if_measure(word, porter._STEP3, 0) == expected


def test_short_and_non_alpha_unchanged():
    for w in ("a", "as", "is", "'s", "n't", "1980", "water-oaks"):
        assert stem(w) == w


@given(st.text(alphabet="abcdefghijklmnopqrstuvwxyz", min_size=1, max_size=15))
def test_stem_never_longer(word):
    out = stem(word)
    assert len(out) <= len(word)
    assert out == stem(word)
