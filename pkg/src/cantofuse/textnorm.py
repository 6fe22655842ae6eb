"""Canonical text normalization and tokenization for mixed Cantonese/English
ASR transcripts.

Normalization applies four passes in a fixed order: symbol removal,
traditional-to-simplified conversion, numeral/date rewriting, and
CJK/Latin spacing. All passes are pure functions over immutable rule
tables, so one loaded table set can be shared across worker threads.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

__all__ = [
    "TableError",
    "InvalidTextError",
    "EmptyTranscriptError",
    "TokenizeError",
    "TokenKind",
    "Token",
    "RawTranscript",
    "NormalizedTranscript",
    "NumeralRule",
    "NormalizationTables",
    "load_tables",
    "is_cjk",
    "normalize",
    "normalize_text",
    "tokenize",
    "detokenize",
    "join_surfaces",
    "read_digits",
    "read_integer",
]


class TableError(ValueError):
    """A rule table file is malformed or internally inconsistent."""


class InvalidTextError(ValueError):
    """Input text is not valid unicode (contains lone surrogates)."""


class EmptyTranscriptError(ValueError):
    """Normalization removed every codepoint; caller decides whether to drop."""

    def __init__(self, system_id: str):
        super().__init__(f"transcript from {system_id!r} is empty after normalization")
        self.system_id = system_id


class TokenizeError(ValueError):
    """A codepoint falls outside the CJK/Latin/digit/space classes."""


# Ideograph blocks, plus U+3007 (ideographic zero) which the numeral pass
# can legitimately leave in text.
_CJK_RANGES = (
    (0x3007, 0x3007),
    (0x3400, 0x4DBF),
    (0x4E00, 0x9FFF),
    (0xF900, 0xFAFF),
    (0x20000, 0x3134F),
)

# Word-internal characters allowed inside a Latin token besides [A-Za-z0-9].
_LATIN_EXTRA = "'-"

# Characters spared by the symbol pass because the numeral rules consume
# them; whatever the rules leave behind is deleted at the end of that pass.
_NUMERIC_MARKS = frozenset("%％‰.")


def is_cjk(ch: str) -> bool:
    cp = ord(ch)
    return any(lo <= cp <= hi for lo, hi in _CJK_RANGES)


def _is_latin_char(ch: str) -> bool:
    return ch.isascii() and (ch.isalnum() or ch in _LATIN_EXTRA)


class TokenKind(Enum):
    CJK_CHAR = "cjk_char"
    LATIN_WORD = "latin_word"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    surface: str


@dataclass(frozen=True)
class RawTranscript:
    system_id: str
    text: str

    def __post_init__(self) -> None:
        if not self.system_id:
            raise ValueError("system_id must be non-empty")


@dataclass(frozen=True)
class NormalizedTranscript:
    system_id: str
    text: str
    tokens: tuple[Token, ...]


@dataclass(frozen=True)
class NumeralRule:
    name: str
    pattern: re.Pattern[str]
    # Segments are ("lit", text) or ("digits"|"int", group_number).
    template: tuple[tuple[str, object], ...]


@dataclass(frozen=True)
class NormalizationTables:
    trad_to_simp: Mapping[str, str]
    punct_class: frozenset[str]
    numeral_rules: tuple[NumeralRule, ...]


# ---------------------------------------------------------------------------
# Table loading
# ---------------------------------------------------------------------------

_TRAD2SIMP_FILE = "trad2simp.tsv"
_PUNCT_FILE = "punctuation.tsv"
_NUMERAL_FILE = "numeral_rules.tsv"


def _data_lines(tables_dir: str | Path | None, name: str) -> list[str]:
    if tables_dir is not None:
        path = Path(tables_dir) / name
        raw = path.read_text(encoding="utf-8")
    else:
        raw = (resources.files("cantofuse") / "data" / name).read_text(encoding="utf-8")
    lines = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        lines.append((lineno, line.rstrip("\n")))
    return lines


def _load_trad2simp(tables_dir) -> dict[str, str]:
    table: dict[str, str] = {}
    for lineno, line in _data_lines(tables_dir, _TRAD2SIMP_FILE):
        parts = line.split("\t")
        if len(parts) != 2 or len(parts[0]) != 1 or len(parts[1]) != 1:
            raise TableError(f"{_TRAD2SIMP_FILE}:{lineno}: expected <char>\\t<char>")
        trad, simp = parts
        if trad in table and table[trad] != simp:
            raise TableError(f"{_TRAD2SIMP_FILE}:{lineno}: conflicting mapping for {trad!r}")
        table[trad] = simp
    overlap = set(table) & set(table.values())
    if overlap:
        raise TableError(f"{_TRAD2SIMP_FILE}: characters mapped and also used as targets: {sorted(overlap)}")
    return table


def _load_punct(tables_dir) -> frozenset[str]:
    chars: set[str] = set()
    for lineno, line in _data_lines(tables_dir, _PUNCT_FILE):
        spec = line.strip().removeprefix("U+").replace("..U+", "..")
        lo_s, _, hi_s = spec.partition("..")
        try:
            lo = int(lo_s, 16)
            hi = int(hi_s, 16) if hi_s else lo
        except ValueError as exc:
            raise TableError(f"{_PUNCT_FILE}:{lineno}: bad codepoint spec {line!r}") from exc
        if hi < lo:
            raise TableError(f"{_PUNCT_FILE}:{lineno}: inverted range {line!r}")
        chars.update(chr(cp) for cp in range(lo, hi + 1))
    return frozenset(chars)


_PLACEHOLDER = re.compile(r"\{(digits|int):\\(\d+)\}")


def _parse_template(raw: str, lineno: int) -> tuple[tuple[str, object], ...]:
    segments: list[tuple[str, object]] = []
    pos = 0
    for m in _PLACEHOLDER.finditer(raw):
        if m.start() > pos:
            segments.append(("lit", raw[pos:m.start()]))
        segments.append((m.group(1), int(m.group(2))))
        pos = m.end()
    if pos < len(raw):
        segments.append(("lit", raw[pos:]))
    if not segments:
        raise TableError(f"{_NUMERAL_FILE}:{lineno}: empty template")
    return tuple(segments)


def _load_numeral_rules(tables_dir) -> tuple[NumeralRule, ...]:
    rules: list[NumeralRule] = []
    for lineno, line in _data_lines(tables_dir, _NUMERAL_FILE):
        parts = line.split("\t")
        if len(parts) != 3:
            raise TableError(f"{_NUMERAL_FILE}:{lineno}: expected name\\tregex\\ttemplate")
        name, pattern, template = parts
        try:
            compiled = re.compile(pattern)
        except re.error as exc:
            raise TableError(f"{_NUMERAL_FILE}:{lineno}: bad regex: {exc}") from exc
        rules.append(NumeralRule(name, compiled, _parse_template(template, lineno)))
    return tuple(rules)


def load_tables(tables_dir: str | Path | None = None) -> NormalizationTables:
    """Load normalization tables from ``tables_dir``, or the packaged defaults."""
    return NormalizationTables(
        trad_to_simp=_load_trad2simp(tables_dir),
        punct_class=_load_punct(tables_dir),
        numeral_rules=_load_numeral_rules(tables_dir),
    )


# ---------------------------------------------------------------------------
# Numeral readings
# ---------------------------------------------------------------------------

_DIGIT_NAMES = "零一二三四五六七八九"
_SMALL_UNITS = ("", "十", "百", "千")
_GROUP_UNITS = ("", "万", "亿", "兆")


def read_digits(digits: str) -> str:
    """Read a digit string digit by digit (telephone style)."""
    return "".join(_DIGIT_NAMES[int(d)] for d in digits)


def _read_group(chunk: str) -> str:
    chunk = chunk.lstrip("0")
    if not chunk:
        return ""
    out: list[str] = []
    zero_pending = False
    n = len(chunk)
    for i, ch in enumerate(chunk):
        d = int(ch)
        if d == 0:
            zero_pending = True
            continue
        if zero_pending and out:
            out.append("零")
        zero_pending = False
        out.append(_DIGIT_NAMES[d] + _SMALL_UNITS[n - 1 - i])
    return "".join(out)


def read_integer(digits: str) -> str:
    """Read a digit string as a positional integer, e.g. 105 -> 一百零五.

    Strings longer than 16 digits fall back to digit-by-digit reading.
    """
    digits = digits.lstrip("0")
    if not digits:
        return "零"
    if len(digits) > 16:
        return read_digits(digits)
    chunks: list[str] = []
    for end in range(len(digits), 0, -4):
        chunks.append(digits[max(0, end - 4):end])
    chunks.reverse()
    parts: list[str] = []
    need_zero = False
    for idx, chunk in enumerate(chunks):
        value = int(chunk)
        unit = _GROUP_UNITS[len(chunks) - 1 - idx]
        if value == 0:
            if parts:
                need_zero = True
            continue
        if parts and (need_zero or value < 1000):
            parts.append("零")
        parts.append(_read_group(chunk) + unit)
        need_zero = False
    out = "".join(parts)
    if out.startswith("一十"):
        out = out[1:]
    return out


_READERS = {"digits": read_digits, "int": read_integer}


# ---------------------------------------------------------------------------
# Normalization passes
# ---------------------------------------------------------------------------

_BRACKET_TAG = re.compile(r"\[[^\[\]]*\]")


def _ensure_valid_unicode(text: str) -> None:
    try:
        text.encode("utf-8")
    except UnicodeEncodeError as exc:
        raise InvalidTextError(f"text is not valid unicode: {exc}") from exc


def _remove_symbols(text: str, punct: frozenset[str]) -> str:
    out: list[str] = []
    for ch in text:
        if ch in punct:
            continue
        if ch.isspace() or is_cjk(ch) or _is_latin_char(ch) or ch in _NUMERIC_MARKS:
            out.append(ch)
        # everything else (emoji, box drawings, full-width alnum...) is dropped
    return "".join(out)


def _to_simplified(text: str, table: Mapping[str, str]) -> str:
    return "".join(table.get(ch, ch) for ch in text)


def _rewrite_numerals(text: str, rules: Sequence[NumeralRule]) -> str:
    for rule in rules:
        def expand(m: re.Match[str], rule: NumeralRule = rule) -> str:
            pieces: list[str] = []
            for kind, arg in rule.template:
                if kind == "lit":
                    pieces.append(arg)  # type: ignore[arg-type]
                else:
                    group = m.group(arg)  # type: ignore[arg-type]
                    if group:
                        pieces.append(_READERS[kind](group))
            return "".join(pieces)

        text = rule.pattern.sub(expand, text)
    # leftover numeric punctuation carries no meaning outside a matched span
    return "".join(ch for ch in text if ch not in _NUMERIC_MARKS)


def _scan(text: str) -> list[Token]:
    tokens: list[Token] = []
    run: list[str] = []

    def flush() -> None:
        if not run:
            return
        surface = "".join(run).lstrip("-")
        run.clear()
        if surface and any(ch.isalnum() or ch == "'" for ch in surface):
            tokens.append(Token(TokenKind.LATIN_WORD, surface))

    for ch in text:
        if ch.isspace():
            flush()
        elif _is_latin_char(ch):
            run.append(ch)
        elif is_cjk(ch):
            flush()
            tokens.append(Token(TokenKind.CJK_CHAR, ch))
        else:
            raise TokenizeError(f"unclassifiable codepoint {ch!r} (U+{ord(ch):04X})")
    flush()
    return tokens


def tokenize(text: str) -> list[Token]:
    """Split normalized text into single-codepoint CJK tokens and Latin words."""
    return _scan(text)


def detokenize(tokens: Iterable[Token]) -> str:
    """Rebuild canonical text: spaces everywhere except between adjacent CJK."""
    out: list[str] = []
    prev: Token | None = None
    for tok in tokens:
        if prev is not None and not (
            prev.kind is TokenKind.CJK_CHAR and tok.kind is TokenKind.CJK_CHAR
        ):
            out.append(" ")
        out.append(tok.surface)
        prev = tok
    return "".join(out)


def join_surfaces(surfaces: Iterable[str]) -> str:
    """Detokenize plain token strings, classifying each surface on the fly."""
    tokens = [
        Token(TokenKind.CJK_CHAR if len(s) == 1 and is_cjk(s) else TokenKind.LATIN_WORD, s)
        for s in surfaces
    ]
    return detokenize(tokens)


def normalize_text(text: str, tables: NormalizationTables) -> str:
    """Run all four passes and return the canonical string (may be empty)."""
    _ensure_valid_unicode(text)
    t = _BRACKET_TAG.sub("", text)
    t = _remove_symbols(t, tables.punct_class)
    t = _to_simplified(t, tables.trad_to_simp)
    t = _rewrite_numerals(t, tables.numeral_rules)
    return detokenize(_scan(t))


def normalize(raw: RawTranscript, tables: NormalizationTables) -> NormalizedTranscript:
    """Normalize a raw transcript; raises :class:`EmptyTranscriptError` if
    nothing survives so the caller can decide whether to drop the utterance."""
    text = normalize_text(raw.text, tables)
    if not text:
        raise EmptyTranscriptError(raw.system_id)
    return NormalizedTranscript(raw.system_id, text, tuple(_scan(text)))
