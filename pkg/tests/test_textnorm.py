from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantofuse import textnorm
from cantofuse.textnorm import (
    EmptyTranscriptError,
    RawTranscript,
    Token,
    TokenKind,
    TokenizeError,
    detokenize,
    normalize,
    normalize_text,
    read_digits,
    read_integer,
    tokenize,
)

# --- worked examples -------------------------------------------------------


def test_punctuation_strip(tables):
    assert normalize_text("係呀!", tables) == "係呀"


def test_trad_to_simplified(tables):
    # oracle: apply the shipped table directly, character by character
    expected = "".join(tables.trad_to_simp.get(c, c) for c in "廣東話")
    assert expected == "广东话"
    assert normalize_text("廣東話", tables) == expected


def test_cjk_latin_spacing(tables):
    assert normalize_text("我哋用iPhone啦", tables) == "我哋用 iPhone 啦"


def test_year_digit_by_digit(tables):
    # oracle: digit map applied by hand
    digit_map = dict(zip("0123456789", "零一二三四五六七八九"))
    expected = "".join(digit_map[d] for d in "2023") + "年"
    assert expected == "二零二三年"
    assert normalize_text("2023年", tables) == expected


def test_bracketed_tags_removed(tables):
    assert normalize_text("[laughter]好好笑", tables) == "好好笑"
    assert normalize_text("好[noise]笑", tables) == "好笑"


def test_percent_and_ordinal_rules(tables):
    assert normalize_text("50%", tables) == "百分之五十"
    assert normalize_text("3.5%", tables) == "百分之三点五"
    assert normalize_text("第3名", tables) == "第三名"
    assert normalize_text("第21", tables) == "第二十一"


def test_decimal_and_plain_digits(tables):
    assert normalize_text("3.5", tables) == "三点五"
    assert normalize_text("手机号码123", tables) == "手机号码一二三"
    # digits embedded in Latin words stay verbatim
    assert normalize_text("A380起飛", tables) == "A380 起飞"


def test_fullwidth_symbols_dropped(tables):
    assert normalize_text("好！？", tables) == "好"
    assert normalize_text("emoji😀都冇", tables) == "emoji 都冇"


def test_empty_after_normalization_raises(tables):
    with pytest.raises(EmptyTranscriptError):
        normalize(RawTranscript("sysA", "!!!"), tables)


def test_invalid_unicode_rejected(tables):
    with pytest.raises(textnorm.InvalidTextError):
        normalize_text("bad\ud800text", tables)


def test_empty_system_id_rejected():
    with pytest.raises(ValueError):
        RawTranscript("", "text")


# --- tokenizer -------------------------------------------------------------


def test_tokenize_mixed(tables):
    toks = tokenize("我哋用 iPhone 啦")
    assert [t.surface for t in toks] == ["我", "哋", "用", "iPhone", "啦"]
    assert [t.kind for t in toks] == [
        TokenKind.CJK_CHAR,
        TokenKind.CJK_CHAR,
        TokenKind.CJK_CHAR,
        TokenKind.LATIN_WORD,
        TokenKind.CJK_CHAR,
    ]


def test_tokenize_empty_and_single():
    assert tokenize("") == []
    assert [t.surface for t in tokenize("OK")] == ["OK"]


def test_tokenize_rejects_unclassifiable():
    with pytest.raises(TokenizeError) as err:
        tokenize("好☂")
    assert "U+2602" in str(err.value)


def test_detokenize_spacing_rule():
    toks = [
        Token(TokenKind.LATIN_WORD, "ok"),
        Token(TokenKind.LATIN_WORD, "la"),
        Token(TokenKind.CJK_CHAR, "我"),
        Token(TokenKind.CJK_CHAR, "哋"),
        Token(TokenKind.LATIN_WORD, "app"),
    ]
    assert detokenize(toks) == "ok la 我哋 app"


# --- numeral readings ------------------------------------------------------


@pytest.mark.parametrize(
    "digits,expected",
    [
        ("0", "零"),
        ("7", "七"),
        ("10", "十"),
        ("15", "十五"),
        ("21", "二十一"),
        ("100", "一百"),
        ("105", "一百零五"),
        ("110", "一百一十"),
        ("1005", "一千零五"),
        ("10000", "一万"),
        ("10005", "一万零五"),
        ("210015", "二十一万零一十五"),
        ("100005000", "一亿零五千"),
    ],
)
def test_read_integer(digits, expected):
    assert read_integer(digits) == expected


def test_read_digits():
    assert read_digits("2023") == "二零二三"
    assert read_digits("007") == "零零七"


# --- invariants ------------------------------------------------------------

_FUZZ_POOL = (
    list("我哋係唔好嘅喇廣東話學問題點樣個個都係香港人雲吞麵飯店")
    + list("，。！？：；「」『』（）【】…—·~!?,.;:()[]{}<>\"'%$#@&*")
    + ["hello", "OK", "iPhone", "don't", "e-mail", "WiFi", "X"]
    + list("0123456789")
    + ["😀", "☂", "▇", "　", " ", "\t", "[laughter]", "[music]", "50%", "2023年", "第1"]
)


def _fuzz_line(rng: random.Random) -> str:
    return "".join(rng.choice(_FUZZ_POOL) for _ in range(rng.randint(0, 24)))


def test_idempotence_and_roundtrip_fuzz(tables):
    rng = random.Random(1234)
    for _ in range(1000):
        line = _fuzz_line(rng)
        once = normalize_text(line, tables)
        assert normalize_text(once, tables) == once
        assert detokenize(tokenize(once)) == once


def test_pass_isolation_fuzz(tables):
    rng = random.Random(99)
    for _ in range(300):
        out = normalize_text(_fuzz_line(rng), tables)
        assert not set(out) & tables.punct_class
        assert not set(out) & set(tables.trad_to_simp)


def test_order_stability_no_digits(tables):
    # for digit-free inputs the retained codepoints keep their relative order
    rng = random.Random(5)
    pool = [x for x in _FUZZ_POOL if not any(c.isdigit() for c in x)]
    for _ in range(200):
        line = "".join(rng.choice(pool) for _ in range(rng.randint(0, 20)))
        out = normalize_text(line, tables).replace(" ", "")
        expected = []
        for ch in textnorm._BRACKET_TAG.sub("", line):
            if ch in tables.punct_class or ch.isspace():
                continue
            if textnorm.is_cjk(ch) or (ch.isascii() and (ch.isalnum() or ch in "'-")):
                expected.append(tables.trad_to_simp.get(ch, ch))
        # normalization may additionally drop hyphen-only runs; compare the
        # subsequence with hyphens removed on both sides
        assert out.replace("-", "") == "".join(expected).replace("-", "")


_TABLES = textnorm.load_tables()


@settings(max_examples=200, deadline=None)
@given(st.text(max_size=40))
def test_idempotence_hypothesis(text):
    try:
        once = normalize_text(text, _TABLES)
    except textnorm.InvalidTextError:
        return  # lone surrogates are rejected, which is the contract
    assert normalize_text(once, _TABLES) == once
    assert detokenize(tokenize(once)) == once
