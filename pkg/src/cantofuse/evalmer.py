"""Mixed error rate scoring: character-level errors for CJK, word-level for
Latin, pooled over the corpus as total errors over total reference tokens.

Reference and hypothesis text go through the shared normalizer and tokenizer
exactly once, so the metric cannot drift from the fusion pipeline's own
segmentation. Latin tokens compare case-insensitively.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import textnorm

log = logging.getLogger(__name__)

__all__ = ["UtteranceScore", "CorpusScore", "MerReport", "mer", "mer_text", "score_manifest"]


@dataclass(frozen=True)
class UtteranceScore:
    utt_id: str
    substitutions: int
    deletions: int
    insertions: int
    ref_len: int
    mer_percent: float
    degenerate: bool = False

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions


def _align_counts(ref: Sequence[str], hyp: Sequence[str]) -> tuple[int, int]:
    """Minimal edit cost and, among minimal paths, the maximal match count.

    Substitutions/deletions/insertions follow from (cost, matches) alone:
    S = |ref| + |hyp| - 2M - cost, D = |ref| - M - S, I = |hyp| - M - S,
    which makes the split unique and symmetric under ref/hyp exchange.
    """
    rk = [t.casefold() for t in ref]
    hk = [t.casefold() for t in hyp]
    # cell = (cost, -matches), minimized lexicographically
    prev = [(j, 0) for j in range(len(hk) + 1)]
    for i, r in enumerate(rk, start=1):
        cur = [(i, 0)]
        for j, h in enumerate(hk, start=1):
            cands = [
                (prev[j][0] + 1, prev[j][1]),        # deletion
                (cur[j - 1][0] + 1, cur[j - 1][1]),  # insertion
            ]
            if r == h:
                cands.append((prev[j - 1][0], prev[j - 1][1] - 1))  # match
            else:
                cands.append((prev[j - 1][0] + 1, prev[j - 1][1]))  # substitution
            cur.append(min(cands))
        prev = cur
    cost, neg_matches = prev[-1]
    return cost, -neg_matches


def mer(ref: Sequence[str], hyp: Sequence[str], utt_id: str = "") -> UtteranceScore:
    """Score one utterance; emptiness of the reference is flagged, not fatal.

    With an empty reference and a non-empty hypothesis the rate uses a
    denominator of one (pure insertion count), flagged degenerate.
    """
    cost, matches = _align_counts(ref, hyp)
    subs = len(ref) + len(hyp) - 2 * matches - cost
    dels = len(ref) - matches - subs
    ins = len(hyp) - matches - subs
    if len(ref) == 0:
        return UtteranceScore(utt_id, 0, 0, ins, 0, float(ins) * 100.0, degenerate=True)
    return UtteranceScore(utt_id, subs, dels, ins, len(ref), cost / len(ref) * 100.0)


def mer_text(
    ref_text: str, hyp_text: str, tables: textnorm.NormalizationTables, utt_id: str = ""
) -> UtteranceScore:
    """Normalize both sides, tokenize, and score."""
    ref = [t.surface for t in textnorm.tokenize(textnorm.normalize_text(ref_text, tables))]
    hyp = [t.surface for t in textnorm.tokenize(textnorm.normalize_text(hyp_text, tables))]
    return mer(ref, hyp, utt_id)


@dataclass(frozen=True)
class CorpusScore:
    substitutions: int
    deletions: int
    insertions: int
    ref_len: int

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def mer_percent(self) -> float:
        if self.ref_len == 0:
            return 0.0
        return self.errors / self.ref_len * 100.0


@dataclass
class MerReport:
    utterances: list[UtteranceScore] = field(default_factory=list)
    corpus: CorpusScore = CorpusScore(0, 0, 0, 0)
    by_tag: dict[str, CorpusScore] = field(default_factory=dict)
    missing_refs: list[str] = field(default_factory=list)
    missing_hyps: list[str] = field(default_factory=list)

    @property
    def warnings(self) -> int:
        return len(self.missing_refs) + len(self.missing_hyps)

    def to_json_obj(self) -> dict:
        return {
            "corpus": {
                "mer_percent": round(self.corpus.mer_percent, 4),
                "substitutions": self.corpus.substitutions,
                "deletions": self.corpus.deletions,
                "insertions": self.corpus.insertions,
                "ref_tokens": self.corpus.ref_len,
            },
            "by_tag": {
                tag: {
                    "mer_percent": round(score.mer_percent, 4),
                    "errors": score.errors,
                    "ref_tokens": score.ref_len,
                }
                for tag, score in sorted(self.by_tag.items())
            },
            "utterances": len(self.utterances),
            "missing_refs": self.missing_refs,
            "missing_hyps": self.missing_hyps,
        }


def _read_text_manifest(path: str | Path) -> tuple[dict[str, str], dict[str, list[str]]]:
    texts: dict[str, str] = {}
    tags: dict[str, list[str]] = {}
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                utt_id = str(obj["utt_id"])
                text = str(obj.get("text", obj.get("rover_result", "")))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad manifest line: {exc}") from exc
            texts[utt_id] = text
            raw_tags = obj.get("tags", [])
            tags[utt_id] = [str(t) for t in raw_tags] if isinstance(raw_tags, list) else []
    return texts, tags


def score_manifest(
    ref_path: str | Path,
    hyp_path: str | Path,
    tables: textnorm.NormalizationTables | None = None,
) -> MerReport:
    """Score a hypothesis manifest against a reference manifest.

    Hypotheses without a reference are listed and excluded from the totals;
    references without a hypothesis are scored against an empty hypothesis
    (all deletions) and listed as missing.
    """
    if tables is None:
        tables = textnorm.load_tables()
    refs, ref_tags = _read_text_manifest(ref_path)
    hyps, _ = _read_text_manifest(hyp_path)

    report = MerReport()
    for utt_id in hyps:
        if utt_id not in refs:
            report.missing_refs.append(utt_id)
            log.warning("hypothesis %r has no reference; excluded", utt_id)

    totals = {"S": 0, "D": 0, "I": 0, "N": 0}
    tag_totals: dict[str, dict[str, int]] = {}
    for utt_id in sorted(refs):
        hyp_text = hyps.get(utt_id)
        if hyp_text is None:
            report.missing_hyps.append(utt_id)
            hyp_text = ""
        score = mer_text(refs[utt_id], hyp_text, tables, utt_id)
        report.utterances.append(score)
        totals["S"] += score.substitutions
        totals["D"] += score.deletions
        totals["I"] += score.insertions
        totals["N"] += score.ref_len
        for tag in ref_tags.get(utt_id, []):
            bucket = tag_totals.setdefault(tag, {"S": 0, "D": 0, "I": 0, "N": 0})
            bucket["S"] += score.substitutions
            bucket["D"] += score.deletions
            bucket["I"] += score.insertions
            bucket["N"] += score.ref_len

    report.corpus = CorpusScore(totals["S"], totals["D"], totals["I"], totals["N"])
    report.by_tag = {
        tag: CorpusScore(t["S"], t["D"], t["I"], t["N"]) for tag, t in tag_totals.items()
    }
    return report
