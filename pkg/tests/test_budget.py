from __future__ import annotations

import logging

import pytest
from hypothesis import given, strategies as st

from chapteralign.align import AlignmentPair, AlignmentResult, GREEDY, STABLE, SUMMARY_WL
from chapteralign.budget import (
    ExtractBudget,
    QuantileBin,
    QuantileModel,
    assemble_extract,
    context_expand,
    default_quantiles,
    dumps_quantiles,
    fit_quantiles,
    parse_quantiles,
    render_extract,
    target_length,
)
from chapteralign.errors import (
    EmptyRanking,
    InconsistentInput,
    InsufficientData,
    InvalidArg,
    WrongAlignmentKind,
)
from chapteralign.budget import oracle_extract
from chapteralign.segment import segment_document

from conftest import doc

REFERENCE_ROWS = [(44, 1232, 6.67), (1233, 1711, 9.09), (1712, 2174, 9.09), (2175, 2758, 10.0),
              (2579, 3361, 11.11), (3362, 4165, 12.5), (4166, 5374, 14.29), (5375, 7762, 14.29),
              (7763, 13028, 16.67), (13029, 70436, 20.0)]


def test_bundled_table_rows():
    m = default_quantiles()
    assert [(b.min_wc, b.max_wc, b.mean_cr) for b in m.bins] == REFERENCE_ROWS
    assert m.warnings() == ["bins 3 and 4 overlap (2175-2758 vs 2579-3361)"]


@pytest.mark.parametrize("wc, target, k", [(847, 127, 0), (4122, 330, 5), (10, 1, 0),
                                           (100000, 5000, 9), (2600, 260, 3)])
def test_target_length(wc, target, k):
    b = target_length(wc, default_quantiles())
    assert (b.target_words, b.bin_index) == (target, k)


def test_unit_ratio_model():
    m = QuantileModel(tuple(QuantileBin(k * 10, k * 10 + 9, 1.0) for k in range(10)))
    assert target_length(57, m).target_words == 57


def test_half_rounds_up():
    m = QuantileModel(tuple(QuantileBin(k * 10, k * 10 + 9, 2.0) for k in range(10)))
    assert target_length(5, m).target_words == 3


@given(st.integers(1, 80000), st.integers(0, 500))
def test_monotone_within_bin(wc, step):
    m = default_quantiles()
    a, b = target_length(wc, m), target_length(wc + step, m)
    if a.bin_index == b.bin_index:
        assert b.target_words >= a.target_words


def test_fit_constant_ratio():
    m = fit_quantiles([(4 * k, k) for k in range(1, 11)])
    assert all(b.mean_cr == 4 for b in m.bins)


def test_fit_hand_means():
    # 23 pairs: bins 0-2 get 3 pairs, the rest 2; chapter wc = 12*i, CR cycling 4, 6, 2
    pairs = [(12 * i, 12 * i // [2, 4, 6][i % 3]) for i in range(1, 24)]
    m = fit_quantiles(pairs)
    sizes = [3, 3, 3] + [2] * 7
    start = 0
    for b, n in zip(m.bins, sizes):
        chunk = sorted(pairs)[start : start + n]
        start += n
        assert b.min_wc == chunk[0][0] and b.max_wc == chunk[-1][0]
        assert b.mean_cr == pytest.approx(sum(c / s for c, s in chunk) / n)
    assert m.bins[0].mean_cr == pytest.approx((4 + 6 + 2) / 3)


def test_fit_errors():
    with pytest.raises(InsufficientData):
        fit_quantiles([(10, 1)] * 9)
    with pytest.raises(InvalidArg):
        fit_quantiles([(10, 1)] * 9 + [(0, 1)])


@given(st.lists(st.tuples(st.integers(1, 5000), st.integers(1, 500)), min_size=10, max_size=40),
       st.randoms(use_true_random=False))
def test_fit_permutation_invariant(pairs, rnd):
    shuffled = list(pairs)
    rnd.shuffle(shuffled)
    assert fit_quantiles(pairs) == fit_quantiles(shuffled)


def test_quantile_tsv_roundtrip(caplog):
    m = fit_quantiles([(10 * k, k) for k in range(1, 21)], fitted_on="toy")
    assert parse_quantiles(dumps_quantiles(m)).bins == m.bins
    with caplog.at_level(logging.WARNING):
        parse_quantiles(dumps_quantiles(default_quantiles()))
    assert "overlap" in caplog.text
    with pytest.raises(InvalidArg):
        parse_quantiles("bin_index min_wc max_wc mean_cr\n2 1 5 3.0\n")


def _fifty_word_chapter(n=5):
    return doc("c", [" ".join(f"w{i}x{j}" for j in range(50)) for i in range(n)])


def test_assemble_keeps_threshold_crossing_segment():
    ch = _fifty_word_chapter()
    out = assemble_extract(ch, ["c:4", "c:0", "c:2", "c:1"], ExtractBudget(120, 0, 250))
    assert [s.id for s in out.segments] == ["c:0", "c:2", "c:4"]
    allin = assemble_extract(ch, ["c:1", "c:3"], ExtractBudget(10000, 9, 250))
    assert [s.id for s in allin.segments] == ["c:1", "c:3"]


@given(st.permutations([f"c:{i}" for i in range(6)]), st.integers(1, 60))
def test_assemble_minimal_crossing(ranking, target):
    ch = doc("c", ["a " * (i + 1) for i in range(6)])
    out = assemble_extract(ch, ranking, ExtractBudget(target, 0, ch.word_count))
    taken = [sid for sid in ranking if sid in {s.id for s in out.segments}]
    assert taken == ranking[: len(taken)]
    words = [ch.segment(sid).word_count for sid in taken]
    if sum(words) >= target:
        assert sum(words[:-1]) < target
    else:
        assert len(taken) == len(ranking)


def test_assemble_prefix_sums(chapter11):
    ranking = [s.id for s in chapter11.segments][::-1]
    out = assemble_extract(chapter11, ranking, ExtractBudget(40, 0, chapter11.word_count))
    prefix, total = [], 0
    for sid in ranking:
        total += chapter11.segment(sid).word_count
        prefix.append(total)
    n = next(k for k, v in enumerate(prefix, 1) if v >= 40)
    assert len(out.segments) == n
    assert out.word_count == prefix[n - 1]


def test_assemble_errors():
    ch = _fifty_word_chapter(2)
    b = ExtractBudget(10, 0, 100)
    with pytest.raises(EmptyRanking):
        assemble_extract(ch, [], b)
    with pytest.raises(InconsistentInput):
        assemble_extract(ch, ["zz"], b)
    with pytest.raises(InvalidArg):
        assemble_extract(ch, ["c:0", "c:0"], b)
    with pytest.raises(InvalidArg):
        ExtractBudget(0, 0, 1)


def test_oracle_extract():
    ch = _fifty_word_chapter()
    summ = doc("s", ["x", "y", "z"], role="reference_summary")
    two = AlignmentResult(STABLE, "R_wtd", pairs=[AlignmentPair("s:0", "c:3", 0.2),
                                                  AlignmentPair("s:1", "c:1", 0.9)])
    big = ExtractBudget(10000, 9, 250)
    assert [s.id for s in oracle_extract(ch, summ, two, big).segments] == ["c:1", "c:3"]
    # tight budget: the best-scored pick survives
    assert [s.id for s in oracle_extract(ch, summ, two, ExtractBudget(10, 0, 250)).segments] == ["c:1"]
    dup = AlignmentResult(GREEDY, "RL", pairs=[AlignmentPair("s:0", "c:2", 0.5),
                                               AlignmentPair("s:1", "c:2", 0.7),
                                               AlignmentPair("s:2", "c:0", 0.1)])
    out = oracle_extract(ch, summ, dup, big)
    assert [s.id for s in out.segments] == ["c:0", "c:2"]
    assert len(out.segments) <= len(summ.segments)
    empty = AlignmentResult(STABLE, "RL")
    assert oracle_extract(ch, summ, empty, big).segments == ()
    with pytest.raises(WrongAlignmentKind):
        oracle_extract(ch, summ, AlignmentResult(SUMMARY_WL, "RL", selected_ids=["c:0"]), big)


def test_context_expand_render(chapter11, trees11):
    cons = segment_document(chapter11, trees11, min_len=2)
    wanted = ["awakening-ch11:1.0", "awakening-ch11:1.1", "awakening-ch11:1.2",
              "awakening-ch11:2.0", "awakening-ch11:20.0"]
    extract = cons.with_segments(s for s in cons.segments if s.id in wanted)
    shown = context_expand(extract, chapter11)
    assert [s.id for s in shown.segments] == ["awakening-ch11:1", "awakening-ch11:2", "awakening-ch11:20"]
    assert shown.segments[0].marks == ((0, 10), (10, 14), (14, 18))
    assert render_extract(shown).splitlines() == [
        "| [I thought I should find you in bed , ''] | [said her husband ,] | "
        "[when he discovered her] | lying there . |",
        "| [He had walked up with Madame Lebrun and left her at the house .] |",
        "| [She heard him moving about the room ;] | every sound indicating impatience and irritation . |",
    ]


def test_context_expand_errors(chapter11, trees11):
    cons = segment_document(chapter11, trees11)
    with pytest.raises(InconsistentInput):
        context_expand(cons.with_segments(cons.segments[:1]), doc("other", ["a b"]))
