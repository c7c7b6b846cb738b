"""Regenerate tests/fixtures/rouge_oracle.tsv.

Unweighted ROUGE-1/2/L precision, recall and F1 on 20 (chapter sentence,
summary sentence) pairs from the Chapter 11 fixtures, computed with Google's
``rouge-score`` package (dev-only; the tests read the frozen file).

rouge-score's default tokenizer strips non-alphanumerics, which would split
PTB tokens such as "n't". A tokenizer object is passed instead that splits on
spaces, lowercases and drops tokens with no letter or digit, with stemming
off. That mirrors the package's plain R-1/R-2/R-L configuration.
"""

from __future__ import annotations

import argparse
import json
import random
from pathlib import Path

from rouge_score import rouge_scorer

ROOT = Path(__file__).resolve().parents[1]
FIX = ROOT / "tests" / "fixtures"


class SpaceTokenizer:
    def tokenize(self, text: str) -> list[str]:
        return [t.lower() for t in text.split(" ") if any(ch.isalnum() for ch in t)]


def pick_pairs(chapter: list[str], summaries: list[str], n_best: int, n_random: int, seed: int):
    def words(s):
        return set(SpaceTokenizer().tokenize(s))

    pairs = []
    for ref in summaries[:n_best]:
        best = max(range(len(chapter)), key=lambda j: (len(words(chapter[j]) & words(ref)), -j))
        pairs.append((chapter[best], ref))
    rng = random.Random(seed)
    for _ in range(n_random):
        pairs.append((rng.choice(chapter), rng.choice(summaries)))
    return pairs


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=FIX / "rouge_oracle.tsv")
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()

    chapter = json.loads((FIX / "chapter11.jsonl").read_text().splitlines()[0])["sentences"]
    summaries = [s for line in (FIX / "chapter11_refs.jsonl").read_text().splitlines()
                 for s in json.loads(line)["sentences"]]
    pairs = pick_pairs(chapter, summaries, 14, 6, args.seed)

    scorer = rouge_scorer.RougeScorer(["rouge1", "rouge2", "rougeL"], use_stemmer=False,
                                      tokenizer=SpaceTokenizer())
    cols = ["cand", "ref"] + [f"{m}_{c}" for m in ("r1", "r2", "rl") for c in ("p", "r", "f")]
    with args.out.open("w", encoding="utf-8") as fh:
        fh.write("# oracle: rouge-score 0.1.2, use_stemmer=False, space tokenizer without punctuation\n")
        fh.write(f"# regenerate: python3 scripts/freeze_rouge_oracle.py --seed {args.seed}\n")
        fh.write("\t".join(cols) + "\n")
        for cand, ref in pairs:
            # rouge-score takes (target, prediction); the reference is the target
            s = scorer.score(ref, cand)
            vals = []
            for key in ("rouge1", "rouge2", "rougeL"):
                vals += [s[key].precision, s[key].recall, s[key].fmeasure]
            fh.write("\t".join([cand, ref] + [f"{v:.10f}" for v in vals]) + "\n")
    print(f"wrote {len(pairs)} pairs to {args.out}")


if __name__ == "__main__":
    main()
