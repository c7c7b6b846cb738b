"""Regenerate tests/fixtures/porter_vectors.tsv.

Words come from the per-step examples of Porter's 1980 article plus a seeded
sample of the Chapter 11 fixture vocabulary. Full stems are produced by NLTK's
PorterStemmer in ORIGINAL_ALGORITHM mode (dev-only dependency; the tests read
the frozen file). The article's own per-step outputs are checked separately in
tests/test_porter.py.
"""

from __future__ import annotations

import random
import re
from pathlib import Path

ARTICLE_STEP_EXAMPLES = """
caresses caress
ponies poni
ties ti
caress caress
cats cat
feed feed
agreed agree
plastered plaster
bled bled
motoring motor
sing sing
conflated conflate
troubled trouble
sized size
hopping hop
tanned tan
falling fall
hissing hiss
fizzed fizz
failing fail
filing file
happy happi
sky sky
relational relate
conditional condition
rational rational
valenci valence
hesitanci hesitance
digitizer digitize
conformabli conformable
radicalli radical
differentli different
vileli vile
analogousli analogous
vietnamization vietnamize
predication predicate
operator operate
feudalism feudal
decisiveness decisive
hopefulness hopeful
callousness callous
formaliti formal
sensitiviti sensitive
sensibiliti sensible
triplicate triplic
formative form
formalize formal
electriciti electric
electrical electric
hopeful hope
goodness good
revival reviv
allowance allow
inference infer
airliner airlin
gyroscopic gyroscop
adjustable adjust
defensible defens
irritant irrit
replacement replac
adjustment adjust
dependent depend
adoption adopt
homologou homolog
communism commun
activate activ
angulariti angular
homologous homolog
effective effect
bowdlerize bowdler
probate probat
rate rate
cease ceas
controll control
roll roll
generalizations gener
oscillators oscil
"""


def main() -> None:
    from nltk.stem.porter import PorterStemmer

    ps = PorterStemmer(mode=PorterStemmer.ORIGINAL_ALGORITHM)
    rows = []
    seen = set()
    for line in ARTICLE_STEP_EXAMPLES.strip().splitlines():
        word = line.split()[0]
        rows.append((word, ps.stem(word), "porter1980-vocab"))
        seen.add(word)
    root = Path(__file__).resolve().parents[1]
    text = (root / "tests" / "fixtures" / "chapter11.jsonl").read_text().lower()
    vocab = sorted({w for w in re.findall(r"[a-z]+", text) if len(w) > 2} - seen)
    rng = random.Random(1980)
    for word in sorted(rng.sample(vocab, min(120, len(vocab)))):
        rows.append((word, ps.stem(word), "nltk-original"))
    out = root / "tests" / "fixtures" / "porter_vectors.tsv"
    with out.open("w") as fh:
        fh.write("word\tstem\tsource\n")
        for row in rows:
            fh.write("\t".join(row) + "\n")
    print(f"wrote {len(rows)} rows to {out}")


if __name__ == "__main__":
    main()
