"""Acceptance criteria, one test each.

Every test prints a single ``PASS criterion N: ...`` or ``FAIL criterion N: ...``
line straight to the terminal, even under capture, and then asserts.
"""

from __future__ import annotations

import csv
import filecmp
import itertools
import random
import time

from chapteralign.align import (
    blocking_pairs,
    gale_shapley,
    greedy_sentence_align,
    stable_align,
    summary_level_align,
)
from chapteralign.budget import default_quantiles, target_length
from chapteralign.cli import main
from chapteralign.metrics import R1, R_WTD, RL, MetricConfig, Scorer, default_config, meteor, rouge_l, rouge_n
from chapteralign.segment import constituent_segments
from chapteralign.weighting import chapter_weight_table, constant_table, sif_weight

from conftest import FIXTURES, doc, seg


def verdict(n: int, ok: bool, detail: str, capsys) -> None:
    line = f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}"
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


# 1 -------------------------------------------------------------------------


def test_criterion_1_sif(capsys):
    t0 = time.perf_counter()
    a = 1e-3
    expected = {0.0: 1.0, 1e-3: 0.5, 9e-3: 0.1, 1.0: a / (a + 1.0)}
    worst = max(abs(sif_weight(p, a) - w) for p, w in expected.items())
    rnd = random.Random(1)
    mono = True
    for _ in range(1000):
        p, q = sorted((rnd.random(), rnd.random()))
        wp, wq = sif_weight(p, a), sif_weight(q, a)
        if wp < wq or (q - p > 1e-9 and not wp > wq):
            mono = False
    dt = time.perf_counter() - t0
    ok = worst <= 1e-12 and abs(sif_weight(1.0, a) - 9.99e-4) < 1e-6 and mono and dt < 1
    verdict(1, ok, f"SIF max error {worst:.1e}, monotone on 1000 pairs={mono}, {dt:.3f}s", capsys)


# 2 -------------------------------------------------------------------------


def test_criterion_2_rouge_oracle(capsys):
    t0 = time.perf_counter()
    with open(FIXTURES / "rouge_oracle.tsv", encoding="utf-8") as fh:
        rows = list(csv.DictReader((l for l in fh if not l.startswith("#")), delimiter="\t",
                                   quoting=csv.QUOTE_NONE))
    worst = 0.0
    for row in rows:
        c, r = seg(row["cand"]), seg(row["ref"])
        got = {"r1": rouge_n(c, r, 1, default_config(R1)), "r2": rouge_n(c, r, 2, default_config("R2")),
               "rl": rouge_l(c, r, default_config(RL))}
        for name, t in got.items():
            for comp, v in (("p", t.precision), ("r", t.recall), ("f", t.f1)):
                worst = max(worst, abs(v - float(row[f"{name}_{comp}"])))
    dt = time.perf_counter() - t0
    ok = len(rows) == 20 and worst < 1e-4 and dt < 5
    verdict(2, ok, f"{len(rows)} oracle pairs, max |diff| {worst:.1e}, {dt:.3f}s", capsys)


# 3 -------------------------------------------------------------------------


def test_criterion_3_constant_weights(chapter11, refs11, capsys):
    wcfg = MetricConfig(metric_id=R_WTD, weight_table=constant_table(0.5))
    ucfg = MetricConfig(metric_id=R1, use_stems=True)
    n = bad = 0
    for ref in refs11:
        for r in ref.segments:
            for c in chapter11.segments:
                pairs = [(rouge_n(c, r, 1, wcfg), rouge_n(c, r, 1, ucfg)),
                         (rouge_n(c, r, 2, wcfg), rouge_n(c, r, 2, ucfg)),
                         (rouge_l(c, r, wcfg), rouge_l(c, r, ucfg))]
                for x, y in pairs:
                    n += 1
                    for a, b in ((x.precision, y.precision), (x.recall, y.recall), (x.f1, y.f1)):
                        if round(a, 12) != round(b, 12):
                            bad += 1
    verdict(3, bad == 0, f"{n} weighted/unweighted comparisons, {bad} mismatches", capsys)


# 4 -------------------------------------------------------------------------


def _proposer_optimal(scores):
    n, m = len(scores), len(scores[0])
    rows = [sorted(range(m), key=lambda j, r=r: (-r[j], j)) for r in scores]
    cols = [sorted(range(n), key=lambda i: (-scores[i][j], i)) for j in range(m)]

    def stable(match):
        owner = {j: i for i, j in enumerate(match)}
        for i in range(n):
            for j in rows[i]:
                if j == match[i]:
                    break
                h = owner.get(j)
                if h is None or cols[j].index(i) < cols[j].index(h):
                    return False
        return True

    found = [p for p in itertools.permutations(range(m), n) if stable(p)]
    return [min((s[i] for s in found), key=rows[i].index) for i in range(n)]


def test_criterion_4_stable_matching(capsys):
    t0 = time.perf_counter()
    rnd = random.Random(4)
    blocking = mismatched = brute = 0
    for k in range(200):
        n, m = rnd.randint(1, 7), rnd.randint(1, 9)
        # coarse values on half the instances so ties occur
        draw = (lambda: rnd.randint(0, 4) / 4) if k % 2 else rnd.random
        scores = [[draw() for _ in range(m)] for _ in range(n)]
        match = gale_shapley(scores)
        blocking += len(blocking_pairs(scores, match))
        if n <= m <= 6:
            brute += 1
            mismatched += match != _proposer_optimal(scores)
    dt = time.perf_counter() - t0
    ok = blocking == 0 and mismatched == 0 and dt < 30
    verdict(4, ok, f"200 matrices, {blocking} blocking pairs, {brute} brute-force checks with "
                   f"{mismatched} mismatches, {dt:.2f}s", capsys)


# 5 -------------------------------------------------------------------------


def test_criterion_5_cigar_alignment(chapter11, refs11, capsys):
    t0 = time.perf_counter()
    ng = next(d for d in refs11 if d.doc_id.endswith("-NG"))
    anchor = next(s for s in ng.segments if "as soon as he has finished his last cigar" in s.text)
    target = next(c for c in chapter11.segments if c.text.startswith("`` Just as soon as I have finished my cigar"))

    wtd = stable_align(ng, chapter11, Scorer(default_config(R_WTD, chapter_weight_table(chapter11))), R_WTD)
    greedy = greedy_sentence_align(ng, chapter11, Scorer(default_config(RL)), RL)
    got_wtd = next(p.chapter_segment_id for p in wtd.pairs if p.summary_segment_id == anchor.id)
    got_greedy = next(p.chapter_segment_id for p in greedy.pairs if p.summary_segment_id == anchor.id)
    dt = time.perf_counter() - t0
    ok = got_wtd == target.id and got_greedy != got_wtd and dt < 10
    verdict(5, ok, f"R-wtd+stable -> {got_wtd} (want {target.id}); R-L+greedy -> {got_greedy} "
                   f"(want a different sentence), {dt:.2f}s", capsys)


# 6 -------------------------------------------------------------------------

WORKED_SPANS = [
    "I thought I should find you in bed , ''",
    "said her husband ,",
    "when he discovered her",
    "lying there .",
]


def test_criterion_6_constituents(chapter11, trees11, capsys):
    t0 = time.perf_counter()
    spans = [s.text for s in constituent_segments(trees11[1], min_len=2)]
    covered = True
    for tree, sent in zip(trees11, chapter11.segments):
        for min_len in (1, 2, 5):
            idx = [i for s in constituent_segments(tree, min_len) for i in s.indices]
            if sorted(idx) != list(range(len(sent.tokens))):
                covered = False
    dt = time.perf_counter() - t0
    ok = spans == WORKED_SPANS and covered and len(trees11) == len(chapter11.segments) and dt < 5
    verdict(6, ok, f"first sentence spans {spans}, coverage on {len(trees11)} sentences={covered}, "
                   f"{dt:.2f}s", capsys)


# 7 -------------------------------------------------------------------------


def test_criterion_7_budget(capsys):
    model = default_quantiles()
    got = {wc: target_length(wc, model).target_words for wc in (847, 4122)}
    verdict(7, got == {847: 127, 4122: 330}, f"targets {got}", capsys)


# 8 -------------------------------------------------------------------------


def test_criterion_8_summary_level(capsys):
    rnd = random.Random(8)
    vocab = "alpha beta gamma delta eps zeta eta theta iota kappa lambda mu".split()

    def sent():
        return " ".join(rnd.choice(vocab) for _ in range(rnd.randint(1, 8))) + " ."

    ws_bad = wl_bad = 0
    for _ in range(100):
        chapter = doc("c", [sent() for _ in range(rnd.randint(1, 15))])
        summary = doc("s", [sent() for _ in range(rnd.randint(1, 5))], role="reference_summary")
        scorer = Scorer(default_config(R_WTD, chapter_weight_table(chapter)))
        ws = summary_level_align(summary, chapter, scorer, "WS")
        if any(b <= a for a, b in zip(ws.trace, ws.trace[1:])) or len(ws.selected_ids) > len(chapter):
            ws_bad += 1
        wl = summary_level_align(summary, chapter, scorer, "WL")
        words = [chapter.segment(i).word_count for i in wl.selected_ids]
        if words and sum(words) > summary.word_count + words[-1]:
            wl_bad += 1
    ok = ws_bad == 0 and wl_bad == 0
    verdict(8, ok, f"100 instances, WS non-increasing traces {ws_bad}, WL overshoot violations {wl_bad}",
            capsys)


# 9 -------------------------------------------------------------------------


def test_criterion_9_meteor(capsys):
    four = meteor(seg("he smoked his cigar"), seg("he smoked his cigar"))
    one = meteor(seg("cigar"), seg("cigar"))
    zero = meteor(seg("he smoked"), seg("she slept"))
    ok = abs(four - 0.9921875) <= 1e-9 and one == 0.5 and zero == 0
    verdict(9, ok, f"4-token {four!r}, 1-token {one!r}, no match {zero!r}", capsys)


# 10 ------------------------------------------------------------------------

OUTPUTS = ("alignments.jsonl", "extracts.jsonl", "extracts.txt", "scores.tsv")


def test_criterion_10_determinism(tmp_path, capsys):
    t0 = time.perf_counter()
    manifest = FIXTURES / "corpus_manifest.jsonl"
    dirs, codes = [], []
    for jobs in (1, 8):
        for k in range(3):
            out = tmp_path / f"j{jobs}_{k}"
            codes.append(main(["pipeline", "--manifest", str(manifest), "--out-dir", str(out),
                               "--jobs", str(jobs)]))
            dirs.append(out)
    ref = dirs[0]
    same = all(filecmp.cmp(ref / f, d / f, shallow=False) for d in dirs[1:] for f in OUTPUTS)
    nonempty = all((ref / f).stat().st_size > 0 for f in OUTPUTS)
    dt = time.perf_counter() - t0
    ok = codes == [0] * 6 and same and nonempty and dt < 60
    verdict(10, ok, f"6 pipeline runs (--jobs 1 and 8, 3 each), exit codes {codes}, "
                    f"byte-identical={same}, {dt:.1f}s", capsys)
