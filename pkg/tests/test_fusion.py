from __future__ import annotations

import json
import random
import sys

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantofuse.fusion import (
    FusionResult,
    Hypothesis,
    HypothesisSet,
    align,
    apply_corrector,
    edit_distance,
    filter_candidates,
    fuse,
    jyutping_confidence,
    normalized_edit_distance,
    romanize,
    vote,
)
from oracles import exact_three_way_cost, reference_levenshtein

H = Hypothesis
HS = HypothesisSet

_tokens = st.lists(st.sampled_from(list("ABCDEFab我哋好食")), max_size=10).map(tuple)


# --- edit distance ---------------------------------------------------------


def test_edit_distance_examples():
    assert edit_distance(("我", "哋", "好"), ("我", "哋", "好")) == 0
    assert edit_distance(("我", "哋", "好"), ("我", "地", "好")) == 1
    assert edit_distance((), ("A", "B")) == 2


def test_edit_distance_case_insensitive():
    assert edit_distance(("KFC",), ("kfc",)) == 0
    assert normalized_edit_distance(("OK", "啦"), ("ok", "啦")) == 0.0


def test_normalized_edit_distance_bounds():
    assert normalized_edit_distance((), ()) == 0.0
    assert normalized_edit_distance((), ("A",)) == 1.0
    assert normalized_edit_distance(("A", "B"), ("C", "D")) == 1.0


@settings(max_examples=300, deadline=None)
@given(_tokens, _tokens, _tokens)
def test_edit_distance_metric_properties(a, b, c):
    assert edit_distance(a, a) == 0
    dab = edit_distance(a, b)
    assert dab == edit_distance(b, a)
    assert dab == reference_levenshtein(a, b)
    assert dab <= edit_distance(a, c) + edit_distance(c, b)
    assert 0.0 <= normalized_edit_distance(a, b) <= 1.0


# --- candidate filtering ---------------------------------------------------


def test_filter_identical_all_kept():
    hs = HS("u", (H("s1", ("食", "飯")), H("s2", ("食", "飯")), H("s3", ("食", "飯"))))
    result = filter_candidates(hs, 0.5)
    assert result.excluded == ()
    assert all(score == 0.0 for score in result.scores.values())
    assert not result.no_vote


def test_filter_outlier_excluded():
    hs = HS(
        "u",
        (
            H("s1", ("食", "飯")),
            H("s2", ("食", "飯")),
            H("s3", ("完", "全", "唔", "同")),
        ),
    )
    result = filter_candidates(hs, 0.5)
    assert result.excluded == ("s3",)
    assert result.scores["s3"] == pytest.approx(1.0)
    assert result.kept.systems == ("s1", "s2")


def test_filter_two_distant_hypotheses_kept_by_fallback():
    a = tuple("ABCDEFGHIJ")
    b = ("A",) + tuple("KLMNOPQRS")
    assert normalized_edit_distance(a, b) == pytest.approx(0.9)
    result = filter_candidates(HS("u", (H("s1", a), H("s2", b))), 0.5)
    assert result.kept.systems == ("s1", "s2")
    assert result.excluded == ()


def test_filter_single_hypothesis_flagged_no_vote():
    hs = HS("u", (H("s1", ("好",)),))
    result = filter_candidates(hs, 0.5)
    assert result.no_vote
    assert result.kept is hs


def test_filter_never_leaves_single_voter():
    # all three mutually distant: every score above threshold
    hs = HS(
        "u",
        (
            H("s1", tuple("ABCD")),
            H("s2", tuple("EFGH")),
            H("s3", tuple("IJKL")),
        ),
    )
    result = filter_candidates(hs, 0.5)
    assert len(result.kept.hypotheses) == 2


def test_filter_threshold_validation():
    hs = HS("u", (H("s1", ("A",)), H("s2", ("B",))))
    with pytest.raises(ValueError):
        filter_candidates(hs, 0.0)


def test_filter_scores_permutation_stable():
    hyps = [H("s1", ("A", "B")), H("s2", ("A", "C")), H("s3", ("D",))]
    base = filter_candidates(HS("u", tuple(hyps)), 0.9).scores
    rng = random.Random(3)
    for _ in range(5):
        rng.shuffle(hyps)
        scores = filter_candidates(HS("u", tuple(hyps)), 0.9).scores
        assert scores == base


# --- alignment -------------------------------------------------------------


def test_align_single_hypothesis():
    wtn = align(HS("u", (H("s1", ("A", "B")),)))
    assert len(wtn.columns) == 2
    assert all(len(col) == 1 for col in wtn.columns)
    assert wtn.total_cost == 0


def test_align_gap_column():
    wtn = align(HS("u", (H("s1", ("A", "B", "C")), H("s2", ("A", "C")))))
    assert len(wtn.columns) == 3
    assert wtn.columns[1]["s2"] is None
    assert wtn.step_costs["s2"] == 1


def test_align_identical_hypotheses_keep_length():
    hs = HS("u", tuple(H(f"s{i}", ("一", "二", "三", "四")) for i in range(3)))
    wtn = align(hs)
    assert len(wtn.columns) == 4
    assert wtn.total_cost == 0


def test_align_column_invariants():
    rng = random.Random(11)
    vocab = list("ABCDE")
    for _ in range(100):
        hyps = tuple(
            H(f"s{i}", tuple(rng.choice(vocab) for _ in range(rng.randint(0, 7))))
            for i in range(3)
        )
        hs = HS("u", hyps)
        wtn = align(hs)
        max_len = max(len(h.tokens) for h in hyps)
        total_len = sum(len(h.tokens) for h in hyps)
        assert max_len <= len(wtn.columns) <= max(total_len, max_len)
        for col in wtn.columns:
            assert set(col) == set(hs.systems)
        # every hypothesis is recoverable from its column entries
        for hyp in hyps:
            entries = tuple(col[hyp.system] for col in wtn.columns if col[hyp.system] is not None)
            assert entries == hyp.tokens


def test_pairwise_alignment_cost_equals_edit_distance():
    rng = random.Random(7)
    vocab = list("ABCDEF我哋好")
    for _ in range(500):
        a = tuple(rng.choice(vocab) for _ in range(rng.randint(0, 12)))
        b = tuple(rng.choice(vocab) for _ in range(rng.randint(0, 12)))
        wtn = align(HS("u", (H("s1", a), H("s2", b))))
        assert wtn.total_cost == edit_distance(a, b)


def test_progressive_within_two_of_exact_oracle():
    rng = random.Random(42)
    vocab = list("ABCDEFGHJK")
    for trial in range(100):
        if trial % 2 == 0:
            hyps = [
                tuple(rng.choice(vocab) for _ in range(rng.randint(0, 8)))
                for _ in range(3)
            ]
        else:
            base = [rng.choice(vocab) for _ in range(rng.randint(1, 8))]
            hyps = []
            for _ in range(3):
                out = []
                for tok in base:
                    if rng.random() < 0.15:
                        op = rng.choice(("sub", "del", "ins"))
                        if op == "sub":
                            out.append(rng.choice(vocab))
                        elif op == "ins":
                            out.extend((rng.choice(vocab), tok))
                    else:
                        out.append(tok)
                hyps.append(tuple(out))
        hs = HS("u", tuple(H(f"s{i}", h) for i, h in enumerate(hyps)))
        progressive = align(hs).total_cost
        oracle = exact_three_way_cost(*hyps)
        assert oracle <= progressive <= oracle + 2


# --- voting ----------------------------------------------------------------


def test_vote_unanimous():
    hs = HS("u", tuple(H(f"s{i}", ("食", "飯")) for i in range(3)))
    result = vote(align(hs), "u")
    assert result.fused_tokens == ("食", "飯")
    assert result.text_confidence == pytest.approx(1.0)


def test_vote_majority_fraction():
    hs = HS(
        "u",
        (H("s1", ("A", "B", "C")), H("s2", ("A", "B", "C")), H("s3", ("A", "B", "D"))),
    )
    result = vote(align(hs), "u")
    assert result.fused_tokens == ("A", "B", "C")
    assert result.text_confidence == pytest.approx(8 / 9, abs=1e-12)


def test_vote_tie_break_prefers_token_over_gap():
    hs = HS("u", (H("s1", ("A",)), H("s2", ("A", "B"))))
    result = vote(align(hs), "u")
    assert result.fused_tokens == ("A", "B")
    assert result.text_confidence == pytest.approx(0.75)
    assert [c.fraction for c in result.per_column] == [1.0, 0.5]


def test_vote_gap_majority_emits_nothing():
    hs = HS(
        "u",
        (H("s1", ("A",)), H("s2", ("A",)), H("s3", ("A", "B"))),
    )
    result = vote(align(hs), "u")
    assert result.fused_tokens == ("A",)
    # second column: gap wins 2/3 and still contributes to the mean
    assert result.text_confidence == pytest.approx((1.0 + 2 / 3) / 2)


def test_vote_tie_between_tokens_uses_priority():
    hs = HS("u", (H("s1", ("X",)), H("s2", ("Y",))))
    result = vote(align(hs), "u")
    assert result.fused_tokens == ("X",)


def test_vote_case_insensitive_keeps_winner_casing():
    hs = HS("u", (H("s1", ("KFC",)), H("s2", ("kfc",)), H("s3", ("kfc",))))
    result = vote(align(hs), "u")
    assert result.text_confidence == pytest.approx(1.0)
    assert result.fused_tokens == ("KFC",)  # highest-priority contributor's casing


def test_vote_empty_network_degenerate():
    wtn = align(HS("u", (H("s1", ()),)))
    result = vote(wtn, "u")
    assert result.fused_tokens == ()
    assert result.text_confidence == 1.0
    assert "degenerate_empty" in result.flags


def test_no_token_invention_property():
    rng = random.Random(23)
    vocab = list("ABCDE我哋")
    for _ in range(200):
        hyps = tuple(
            H(f"s{i}", tuple(rng.choice(vocab) for _ in range(rng.randint(0, 8))))
            for i in range(3)
        )
        hs = HS("u", hyps)
        result = vote(align(hs), "u")
        pool = {t for h in hyps for t in h.tokens}
        assert set(result.fused_tokens) <= pool
        v = len(hyps)
        for col in result.per_column:
            assert 0 < col.fraction <= 1.0
            assert abs(col.fraction * v - round(col.fraction * v)) < 1e-9


# --- jyutping confidence ---------------------------------------------------


def test_romanize_drops_unmapped_and_folds_latin(jyutping_table):
    out = romanize(("我", "iPhone", "\U00020b9f"), jyutping_table)
    assert out == ["ngo5", "iphone"]


def test_jyutping_identical_inputs(jyutping_table):
    hs = HS("u", tuple(H(f"s{i}", ("我", "哋")) for i in range(3)))
    conf, flags = jyutping_confidence(hs, jyutping_table)
    assert conf == pytest.approx(1.0)
    assert flags == ()


def test_jyutping_homophone_forgiveness(jyutping_table):
    hs = HS("u", (H("s1", ("我", "地")), H("s2", ("我", "哋"))))
    text_conf = vote(align(hs), "u").text_confidence
    jy_conf, _ = jyutping_confidence(hs, jyutping_table)
    assert jy_conf == pytest.approx(1.0)
    assert text_conf < 1.0


def test_jyutping_disagreement_fraction(jyutping_table):
    # three voters, two agree on the second position, readings disjoint
    hs = HS(
        "u",
        (H("s1", ("我", "地")), H("s2", ("我", "哋")), H("s3", ("我", "天"))),
    )
    conf, _ = jyutping_confidence(hs, jyutping_table)
    assert conf == pytest.approx((1.0 + 2 / 3) / 2)


def test_jyutping_all_unmapped_degenerate(jyutping_table):
    hs = HS("u", (H("s1", ("\U00020b9f",)), H("s2", ("\U00020b9f",))))
    conf, flags = jyutping_confidence(hs, jyutping_table)
    assert conf == 1.0
    assert "degenerate_jyutping" in flags


# --- corrector hook --------------------------------------------------------


def _result_for(hs: HypothesisSet) -> FusionResult:
    return vote(align(hs), hs.utt_id)


def _hook_script(tmp_path, body: str) -> list[str]:
    script = tmp_path / "hook.py"
    script.write_text(
        "#!/usr/bin/env python3\nimport json, sys\n"
        "req = json.load(sys.stdin)\n" + body,
        encoding="utf-8",
    )
    return [sys.executable, str(script)]


def test_corrector_identity_accepted(tmp_path, tables):
    hs = HS("u", (H("s1", ("我", "哋", "好")), H("s2", ("我", "哋", "好"))))
    result = _result_for(hs)
    cmd = _hook_script(
        tmp_path,
        "print(json.dumps({'corrected_text': req['voted_text'], 'confidence': 90, 'analysis': 'ok'}, ensure_ascii=False))\n",
    )
    out = apply_corrector(result, hs, cmd, tables)
    assert out.corrector["status"] == "accepted"
    assert out.fused_tokens == result.fused_tokens


def test_corrector_large_rewrite_rejected(tmp_path, tables):
    hs = HS("u", tuple(H(f"s{i}", ("我", "哋", "好", "食", "饭")) for i in range(2)))
    result = _result_for(hs)
    cmd = _hook_script(
        tmp_path,
        "print(json.dumps({'corrected_text': '完全唔同嘅嘢', 'confidence': 90}, ensure_ascii=False))\n",
    )
    out = apply_corrector(result, hs, cmd, tables, guard=0.3)
    assert out.corrector["status"] == "rejected"
    assert out.fused_tokens == result.fused_tokens


def test_corrector_small_edit_accepted_and_renormalized(tmp_path, tables):
    hs = HS("u", tuple(H(f"s{i}", ("我", "哋", "好", "食", "饭")) for i in range(2)))
    result = _result_for(hs)
    # one substituted character, and traditional script from the hook
    cmd = _hook_script(
        tmp_path,
        "print(json.dumps({'corrected_text': '我哋好食麵', 'confidence': 80}, ensure_ascii=False))\n",
    )
    out = apply_corrector(result, hs, cmd, tables, guard=0.3)
    assert out.corrector["status"] == "accepted"
    assert out.fused_tokens == ("我", "哋", "好", "食", "面")


def test_corrector_hook_failure_skipped(tmp_path, tables):
    hs = HS("u", (H("s1", ("好",)), H("s2", ("好",))))
    result = _result_for(hs)
    cmd = _hook_script(tmp_path, "sys.exit(3)\n")
    out = apply_corrector(result, hs, cmd, tables)
    assert out.corrector["status"] == "skipped"
    assert out.fused_tokens == result.fused_tokens


def test_corrector_bad_json_skipped(tmp_path, tables):
    hs = HS("u", (H("s1", ("好",)), H("s2", ("好",))))
    result = _result_for(hs)
    cmd = _hook_script(tmp_path, "print('not json')\n")
    out = apply_corrector(result, hs, cmd, tables)
    assert out.corrector["status"] == "skipped"


def test_corrector_invalid_confidence_skipped(tmp_path, tables):
    hs = HS("u", (H("s1", ("好",)), H("s2", ("好",))))
    result = _result_for(hs)
    cmd = _hook_script(
        tmp_path,
        "print(json.dumps({'corrected_text': req['voted_text'], 'confidence': 150}))\n",
    )
    out = apply_corrector(result, hs, cmd, tables)
    assert out.corrector["status"] == "skipped"


def test_corrector_no_hook_passthrough(tables):
    hs = HS("u", (H("s1", ("好",)), H("s2", ("好",))))
    result = _result_for(hs)
    out = apply_corrector(result, hs, None, tables)
    assert out.corrector["status"] == "skipped"
    assert out.corrector["reason"] == "no hook configured"


def test_corrector_replay_bypasses_subprocess(tables):
    hs = HS("u", (H("s1", ("我", "哋")), H("s2", ("我", "哋"))))
    result = _result_for(hs)
    reply = {"corrected_text": "我哋", "confidence": 77, "analysis": ""}
    out = apply_corrector(result, hs, None, tables, reply=reply)
    assert out.corrector["status"] == "accepted"
    assert out.corrector["response"]["confidence"] == 77


def test_corrector_request_shape(tmp_path, tables):
    hs = HS("u", (H("s1", ("我", "哋")), H("s2", ("我", "地"))))
    result = _result_for(hs)
    dump = tmp_path / "req.json"
    cmd = _hook_script(
        tmp_path,
        f"open({str(dump)!r}, 'w', encoding='utf-8').write(json.dumps(req, ensure_ascii=False))\n"
        "print(json.dumps({'corrected_text': req['voted_text'], 'confidence': 50}, ensure_ascii=False))\n",
    )
    apply_corrector(result, hs, cmd, tables)
    req = json.loads(dump.read_text(encoding="utf-8"))
    assert req["voted_text"] == "我哋"
    assert req["hypotheses"] == [
        {"system": "s1", "text": "我哋"},
        {"system": "s2", "text": "我地"},
    ]


# --- end-to-end fuse -------------------------------------------------------


def test_fuse_unanimity(jyutping_table):
    hs = HS("u", tuple(H(f"s{i}", ("我", "哋", "好")) for i in range(3)))
    result = fuse(hs, jyutping_table)
    assert result.fused_tokens == ("我", "哋", "好")
    assert result.text_confidence == 1.0
    assert result.jyutping_confidence == 1.0
    assert result.excluded_systems == ()


def test_fuse_single_hypothesis_flags_no_vote(jyutping_table):
    hs = HS("u", (H("s1", ("好",)),))
    result = fuse(hs, jyutping_table)
    assert "no_vote" in result.flags
    assert result.fused_tokens == ("好",)
