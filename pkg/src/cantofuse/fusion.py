"""Multi-system hypothesis fusion: outlier filtering, progressive alignment
into a word transition network, position-wise voting, pronunciation-level
consensus, and the external corrector hook.

Tokens are compared case-insensitively throughout; the emitted surface keeps
the winner's original casing. A ``None`` entry marks an alignment gap.
"""
from __future__ import annotations

import json
import logging
import subprocess
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

from . import textnorm

log = logging.getLogger(__name__)

__all__ = [
    "Hypothesis",
    "HypothesisSet",
    "FilterResult",
    "WordTransitionNetwork",
    "ColumnVote",
    "FusionResult",
    "edit_distance",
    "normalized_edit_distance",
    "filter_candidates",
    "align",
    "vote",
    "load_jyutping_table",
    "romanize",
    "jyutping_confidence",
    "apply_corrector",
    "fuse",
    "DEFAULT_FILTER_THRESHOLD",
    "DEFAULT_CORRECTOR_GUARD",
    "DEFAULT_CORRECTOR_TIMEOUT",
]

DEFAULT_FILTER_THRESHOLD = 0.5
DEFAULT_CORRECTOR_GUARD = 0.3
DEFAULT_CORRECTOR_TIMEOUT = 30.0


def _key(token: str) -> str:
    return token.casefold()


def edit_distance(a: Sequence[str], b: Sequence[str]) -> int:
    """Levenshtein distance over token sequences with unit costs."""
    if len(a) < len(b):
        a, b = b, a
    bk = [_key(t) for t in b]
    prev = list(range(len(b) + 1))
    for i, ta in enumerate(a, start=1):
        ka = _key(ta)
        cur = [i]
        for j, kb in enumerate(bk, start=1):
            if ka == kb:
                cur.append(prev[j - 1])
            else:
                cur.append(1 + min(prev[j - 1], prev[j], cur[-1]))
        prev = cur
    return prev[-1]


def normalized_edit_distance(a: Sequence[str], b: Sequence[str]) -> float:
    """Edit distance divided by max(len(a), len(b)); 0.0 for two empties."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 0.0
    return edit_distance(a, b) / longest


@dataclass(frozen=True)
class Hypothesis:
    system: str
    tokens: tuple[str, ...]


@dataclass(frozen=True)
class HypothesisSet:
    """Hypotheses for one utterance, ordered by system priority."""

    utt_id: str
    hypotheses: tuple[Hypothesis, ...]

    def __post_init__(self) -> None:
        if not self.hypotheses:
            raise ValueError("a hypothesis set needs at least one hypothesis")
        systems = [h.system for h in self.hypotheses]
        if len(set(systems)) != len(systems):
            raise ValueError(f"duplicate system ids in {systems}")

    @property
    def systems(self) -> tuple[str, ...]:
        return tuple(h.system for h in self.hypotheses)


@dataclass(frozen=True)
class FilterResult:
    kept: HypothesisSet
    excluded: tuple[str, ...]
    scores: Mapping[str, float]
    no_vote: bool = False


def filter_candidates(
    hset: HypothesisSet, threshold: float = DEFAULT_FILTER_THRESHOLD
) -> FilterResult:
    """Drop outlier hypotheses whose mean normalized distance to the others
    exceeds ``threshold``; never leaves fewer than two voters when two exist."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    hyps = hset.hypotheses
    if len(hyps) == 1:
        return FilterResult(hset, (), {hyps[0].system: 0.0}, no_vote=True)

    n = len(hyps)
    dist = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d = normalized_edit_distance(hyps[i].tokens, hyps[j].tokens)
            dist[i][j] = dist[j][i] = d
    scores = {
        hyps[i].system: sum(dist[i][j] for j in range(n) if j != i) / (n - 1)
        for i in range(n)
    }

    kept_idx = [i for i in range(n) if scores[hyps[i].system] <= threshold]
    if len(kept_idx) < 2:
        # keep the best-agreeing hypothesis plus its nearest neighbor
        best = min(range(n), key=lambda i: (scores[hyps[i].system], i))
        neighbor = min(
            (j for j in range(n) if j != best), key=lambda j: (dist[best][j], j)
        )
        kept_idx = sorted({best, neighbor})

    kept = HypothesisSet(hset.utt_id, tuple(hyps[i] for i in kept_idx))
    excluded = tuple(hyps[i].system for i in range(n) if i not in kept_idx)
    return FilterResult(kept, excluded, scores)


@dataclass
class WordTransitionNetwork:
    """Column-aligned token lattice; every system has one entry per column."""

    systems: list[str]
    columns: list[dict[str, str | None]]
    step_costs: dict[str, int] = field(default_factory=dict)

    @property
    def total_cost(self) -> int:
        return sum(self.step_costs.values())


def align(hset: HypothesisSet) -> WordTransitionNetwork:
    """Progressive alignment in system priority order.

    The network starts from the first hypothesis; each next one is aligned by
    dynamic programming (substitution costs 1 unless the token matches any
    token already in the column; insertions and deletions cost 1).
    """
    first, *rest = hset.hypotheses
    wtn = WordTransitionNetwork(
        systems=[first.system],
        columns=[{first.system: tok} for tok in first.tokens],
        step_costs={first.system: 0},
    )
    for hyp in rest:
        _merge(wtn, hyp)
    return wtn


def _merge(wtn: WordTransitionNetwork, hyp: Hypothesis) -> None:
    cols = wtn.columns
    toks = hyp.tokens
    m, n = len(cols), len(toks)
    col_keys = [
        {_key(t) for t in col.values() if t is not None} for col in cols
    ]
    tok_keys = [_key(t) for t in toks]

    dp = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(1, m + 1):
        dp[i][0] = i
    for j in range(1, n + 1):
        dp[0][j] = j
    for i in range(1, m + 1):
        row = dp[i]
        prev = dp[i - 1]
        keys = col_keys[i - 1]
        for j in range(1, n + 1):
            sub = prev[j - 1] + (0 if tok_keys[j - 1] in keys else 1)
            row[j] = min(sub, prev[j] + 1, row[j - 1] + 1)

    # backtrace, preferring substitution/match, then column skip, then insertion
    merged: list[dict[str, str | None]] = []
    i, j = m, n
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dp[i][j] == dp[i - 1][j - 1] + (
            0 if tok_keys[j - 1] in col_keys[i - 1] else 1
        ):
            col = dict(cols[i - 1])
            col[hyp.system] = toks[j - 1]
            merged.append(col)
            i, j = i - 1, j - 1
        elif i > 0 and dp[i][j] == dp[i - 1][j] + 1:
            col = dict(cols[i - 1])
            col[hyp.system] = None
            merged.append(col)
            i -= 1
        else:
            col = {sys: None for sys in wtn.systems}
            col[hyp.system] = toks[j - 1]
            merged.append(col)
            j -= 1
    merged.reverse()

    wtn.columns = merged
    wtn.systems.append(hyp.system)
    wtn.step_costs[hyp.system] = dp[m][n]


@dataclass(frozen=True)
class ColumnVote:
    token: str | None
    fraction: float


@dataclass
class FusionResult:
    utt_id: str
    fused_tokens: tuple[str, ...]
    text_confidence: float
    jyutping_confidence: float | None
    per_column: tuple[ColumnVote, ...]
    excluded_systems: tuple[str, ...]
    flags: tuple[str, ...] = ()
    corrector: dict | None = None

    @property
    def fused_text(self) -> str:
        return textnorm.join_surfaces(self.fused_tokens)


def vote(
    wtn: WordTransitionNetwork,
    utt_id: str = "",
    excluded: Sequence[str] = (),
) -> FusionResult:
    """Select the most frequent entry per column; ties prefer non-gap entries,
    then earlier systems in priority order. The utterance confidence is the
    mean winning fraction over all columns, gap-winning columns included."""
    voters = wtn.systems
    v = len(voters)
    if not wtn.columns:
        return FusionResult(
            utt_id, (), 1.0, None, (), tuple(excluded), flags=("degenerate_empty",)
        )
    priority = {sys: rank for rank, sys in enumerate(voters)}

    fused: list[str] = []
    per_column: list[ColumnVote] = []
    for col in wtn.columns:
        counts: dict[str | None, int] = {}
        best_rank: dict[str | None, int] = {}
        surface: dict[str | None, str | None] = {}
        for sys in voters:
            entry = col[sys]
            key = None if entry is None else _key(entry)
            counts[key] = counts.get(key, 0) + 1
            rank = priority[sys]
            if key not in best_rank or rank < best_rank[key]:
                best_rank[key] = rank
                surface[key] = entry
        winner = min(
            counts,
            key=lambda k: (-counts[k], 1 if k is None else 0, best_rank[k]),
        )
        token = surface[winner]
        if token is not None:
            fused.append(token)
        per_column.append(ColumnVote(token, counts[winner] / v))

    confidence = sum(c.fraction for c in per_column) / len(per_column)
    return FusionResult(
        utt_id,
        tuple(fused),
        confidence,
        None,
        tuple(per_column),
        tuple(excluded),
    )


# ---------------------------------------------------------------------------
# Pronunciation-level consensus
# ---------------------------------------------------------------------------

_JYUTPING_FILE = "jyutping.tsv"


def load_jyutping_table(tables_dir: str | Path | None = None) -> dict[str, tuple[str, ...]]:
    """Load the romanization table; first reading per entry is the default."""
    if tables_dir is not None:
        raw = (Path(tables_dir) / _JYUTPING_FILE).read_text(encoding="utf-8")
    else:
        raw = (resources.files("cantofuse") / "data" / _JYUTPING_FILE).read_text(encoding="utf-8")
    table: dict[str, tuple[str, ...]] = {}
    for lineno, line in enumerate(raw.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        parts = stripped.split("\t")
        if len(parts) != 2 or len(parts[0]) != 1 or not parts[1]:
            raise textnorm.TableError(
                f"{_JYUTPING_FILE}:{lineno}: expected <char>\\t<reading>[,...]"
            )
        readings = tuple(r for r in parts[1].split(",") if r)
        if not readings:
            raise textnorm.TableError(f"{_JYUTPING_FILE}:{lineno}: no readings")
        table[parts[0]] = readings
    return table


def romanize(tokens: Sequence[str], table: Mapping[str, tuple[str, ...]]) -> list[str]:
    """Map CJK tokens to their default reading; Latin tokens pass through
    case-folded; CJK tokens with no table entry are dropped."""
    out: list[str] = []
    for tok in tokens:
        if len(tok) == 1 and textnorm.is_cjk(tok):
            readings = table.get(tok)
            if readings:
                out.append(readings[0])
        else:
            out.append(tok.casefold())
    return out


def jyutping_confidence(
    hset: HypothesisSet, table: Mapping[str, tuple[str, ...]]
) -> tuple[float, tuple[str, ...]]:
    """Align and vote over romanized hypotheses; returns (confidence, flags)."""
    romanized = [
        Hypothesis(h.system, tuple(romanize(h.tokens, table))) for h in hset.hypotheses
    ]
    if all(not h.tokens for h in romanized):
        return 1.0, ("degenerate_jyutping",)
    result = vote(align(HypothesisSet(hset.utt_id, tuple(romanized))))
    return result.text_confidence, result.flags


# ---------------------------------------------------------------------------
# External corrector hook
# ---------------------------------------------------------------------------


class CorrectorError(RuntimeError):
    """The corrector hook failed; the voted result is kept."""


def _invoke_hook(cmd: Sequence[str], request: dict, timeout: float) -> dict:
    proc = subprocess.run(
        list(cmd),
        input=json.dumps(request, ensure_ascii=False),
        capture_output=True,
        text=True,
        timeout=timeout,
    )
    if proc.returncode != 0:
        raise CorrectorError(f"hook exited {proc.returncode}: {proc.stderr.strip()[:200]}")
    try:
        reply = json.loads(proc.stdout)
    except json.JSONDecodeError as exc:
        raise CorrectorError(f"hook produced invalid JSON: {exc}") from exc
    if not isinstance(reply, dict):
        raise CorrectorError("hook reply is not a JSON object")
    return reply


def _validate_reply(reply: dict) -> tuple[str, int, str]:
    corrected = reply.get("corrected_text")
    confidence = reply.get("confidence")
    if not isinstance(corrected, str):
        raise CorrectorError("reply missing string 'corrected_text'")
    if not isinstance(confidence, int) or isinstance(confidence, bool) or not 0 <= confidence <= 100:
        raise CorrectorError("reply 'confidence' must be an integer in 0..100")
    analysis = reply.get("analysis", "")
    return corrected, confidence, str(analysis)


def apply_corrector(
    result: FusionResult,
    hset: HypothesisSet,
    hook_cmd: Sequence[str] | None,
    tables: textnorm.NormalizationTables,
    guard: float = DEFAULT_CORRECTOR_GUARD,
    timeout: float = DEFAULT_CORRECTOR_TIMEOUT,
    reply: dict | None = None,
) -> FusionResult:
    """Offer the voted text to the correction hook and take the reply only if
    it stays within ``guard`` normalized edit distance of the voted tokens.

    ``reply`` short-circuits the subprocess (replay of a recorded response).
    Hook failures never fail the utterance; the result passes through with
    ``corrector["status"] == "skipped"``.
    """
    if not 0.0 < guard <= 1.0:
        raise ValueError(f"guard must be in (0, 1], got {guard}")
    request = {
        "voted_text": result.fused_text,
        "hypotheses": [
            {"system": h.system, "text": textnorm.join_surfaces(h.tokens)}
            for h in hset.hypotheses
        ],
    }
    if reply is None:
        if not hook_cmd:
            return replace(result, corrector={"status": "skipped", "reason": "no hook configured"})
        try:
            reply = _invoke_hook(hook_cmd, request, timeout)
        except (CorrectorError, subprocess.TimeoutExpired, OSError) as exc:
            log.warning("corrector hook failed for %s: %s", result.utt_id, exc)
            return replace(result, corrector={"status": "skipped", "reason": str(exc)})

    try:
        corrected_text, hook_confidence, analysis = _validate_reply(reply)
    except CorrectorError as exc:
        log.warning("corrector reply invalid for %s: %s", result.utt_id, exc)
        return replace(result, corrector={"status": "skipped", "reason": str(exc), "response": reply})

    normalized = textnorm.normalize_text(corrected_text, tables)
    corrected_tokens = tuple(t.surface for t in textnorm.tokenize(normalized))
    distance = normalized_edit_distance(result.fused_tokens, corrected_tokens)
    record = {
        "response": {"corrected_text": corrected_text, "confidence": hook_confidence, "analysis": analysis},
        "distance": round(distance, 6),
    }
    if distance > guard:
        record["status"] = "rejected"
        return replace(result, corrector=record)
    record["status"] = "accepted"
    return replace(result, fused_tokens=corrected_tokens, corrector=record)


def fuse(
    hset: HypothesisSet,
    jyutping_table: Mapping[str, tuple[str, ...]],
    threshold: float = DEFAULT_FILTER_THRESHOLD,
) -> FusionResult:
    """Filter, align, vote, and score one utterance end to end."""
    filtered = filter_candidates(hset, threshold)
    result = vote(align(filtered.kept), hset.utt_id, filtered.excluded)
    jy_conf, jy_flags = jyutping_confidence(filtered.kept, jyutping_table)
    result.jyutping_confidence = jy_conf
    flags = result.flags + jy_flags
    if filtered.no_vote:
        flags = flags + ("no_vote",)
    result.flags = flags
    return result
