"""Canonical per-utterance metadata records, confidence partitioning,
speaker sidecar ingestion, manifest emission, and corpus statistics.

Manifest lines are canonical JSON: fixed key order, compact separators,
reals rounded to six significant digits, so parse/emit is a fixpoint.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

log = logging.getLogger(__name__)

__all__ = [
    "GENDERS",
    "AGES",
    "DOMAINS",
    "BUCKETS",
    "STRONG_MIN",
    "MODERATE_MIN",
    "RETAIN_MIN",
    "assign_bucket",
    "TimestampEntry",
    "MetaInfo",
    "MetadataRecord",
    "SpeakerInfo",
    "ingest_speaker_sidecar",
    "canonical_line",
    "EmitReport",
    "emit_manifest",
    "parse_manifest",
    "corpus_stats",
]

GENDERS = ("male", "female", "unknown")
AGES = ("Child", "Youth", "Middle_age", "Elderly", "unknown")
DOMAINS = (
    "Storytelling",
    "Entertainment",
    "Drama",
    "Culture",
    "Vlog",
    "Commentary",
    "Education",
    "Podcast",
    "News",
    "Others",
)
BUCKETS = ("strong", "moderate", "weak", "dropped")

STRONG_MIN = 0.9   # strong: confidence > 0.9
MODERATE_MIN = 0.8  # moderate: 0.8 < confidence <= 0.9
RETAIN_MIN = 0.6   # weak: 0.6 < confidence <= 0.8; at or below 0.6 is dropped


def assign_bucket(confidence: float) -> str:
    """Partition a text confidence into strong/moderate/weak/dropped.

    Lower bounds are strict, upper bounds inclusive.
    """
    if not 0.0 <= confidence <= 1.0:
        raise ValueError(f"confidence out of range: {confidence}")
    if confidence > STRONG_MIN:
        return "strong"
    if confidence > MODERATE_MIN:
        return "moderate"
    if confidence > RETAIN_MIN:
        return "weak"
    return "dropped"


@dataclass(frozen=True)
class TimestampEntry:
    token: str
    start_s: float
    end_s: float


@dataclass(frozen=True)
class MetaInfo:
    program: str = ""
    region: str = ""
    link: str = ""
    domain: str = "Others"


@dataclass
class MetadataRecord:
    utt_id: str
    rover_result: str
    confidence: float
    jyutping_confidence: float | None = None
    duration: float = 0.0
    speaker_id: str | None = None
    gender: str = "unknown"
    age: str = "unknown"
    sample_rate: int | None = None
    effective_bandwidth: float | None = None
    dnsmos: float | None = None
    snr: float | None = None
    timestamp: tuple[TimestampEntry, ...] | None = None
    meta_info: MetaInfo = field(default_factory=MetaInfo)

    def violations(self) -> list[str]:
        """Invariant violations; an empty list means the record is valid."""
        problems: list[str] = []
        if not self.utt_id:
            problems.append("utt_id is empty")
        if not 0.0 <= self.confidence <= 1.0:
            problems.append(f"confidence out of [0,1]: {self.confidence}")
        if self.jyutping_confidence is not None and not 0.0 <= self.jyutping_confidence <= 1.0:
            problems.append(f"jyutping_confidence out of [0,1]: {self.jyutping_confidence}")
        if self.duration < 0:
            problems.append(f"negative duration: {self.duration}")
        if self.gender not in GENDERS:
            problems.append(f"unknown gender label: {self.gender!r}")
        if self.age not in AGES:
            problems.append(f"unknown age label: {self.age!r}")
        if self.meta_info.domain not in DOMAINS:
            problems.append(f"unknown domain: {self.meta_info.domain!r}")
        if self.sample_rate is not None and self.sample_rate <= 0:
            problems.append(f"bad sample_rate: {self.sample_rate}")
        if (
            self.effective_bandwidth is not None
            and self.sample_rate is not None
            and self.effective_bandwidth > self.sample_rate / 2
        ):
            problems.append("effective_bandwidth above Nyquist")
        if self.dnsmos is not None and not 1.0 <= self.dnsmos <= 5.0:
            problems.append(f"dnsmos out of [1,5]: {self.dnsmos}")
        if self.timestamp is not None:
            prev_end = 0.0
            for idx, ts in enumerate(self.timestamp):
                if ts.start_s < prev_end:
                    problems.append(f"timestamp {idx} overlaps or not non-decreasing")
                    break
                if ts.end_s < ts.start_s:
                    problems.append(f"timestamp {idx} ends before it starts")
                    break
                prev_end = ts.end_s
            if self.timestamp and not problems and self.timestamp[-1].end_s > self.duration:
                problems.append("timestamps extend past duration")
        return problems


# ---------------------------------------------------------------------------
# Speaker sidecar
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpeakerInfo:
    speaker_id: str | None
    gender: str
    age: str


def ingest_speaker_sidecar(path: str | Path) -> dict[str, SpeakerInfo]:
    """Read a JSONL sidecar of ``{"utt_id", "speaker", "gender", "age"}`` rows.

    Speaker labels are local to a source recording and stored as
    ``<source>#<label>``; rows may carry an explicit ``source`` field,
    otherwise the generic source id ``src`` is used. Labels outside the
    gender/age vocabularies map to ``unknown`` with a warning.
    """
    path = Path(path)
    result: dict[str, SpeakerInfo] = {}
    if not path.exists():
        return result
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                utt_id = str(obj["utt_id"])
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                log.warning("%s:%d: skipped malformed line (%s)", path, lineno, exc)
                continue
            label = obj.get("speaker")
            source = str(obj.get("source", "src"))
            speaker_id = f"{source}#{label}" if label is not None else None
            gender = obj.get("gender", "unknown")
            if gender not in GENDERS:
                log.warning("%s:%d: gender %r not recognized, using unknown", path, lineno, gender)
                gender = "unknown"
            age = obj.get("age", "unknown")
            if age not in AGES:
                if age != "unknown":
                    log.warning("%s:%d: age %r not recognized, using unknown", path, lineno, age)
                age = "unknown"
            result[utt_id] = SpeakerInfo(speaker_id, gender, age)
    return result


# ---------------------------------------------------------------------------
# Canonical manifest
# ---------------------------------------------------------------------------


def _round6(value: float) -> float:
    return float(f"{float(value):.6g}")


def _record_to_obj(record: MetadataRecord) -> dict:
    obj: dict = {
        "utt_id": record.utt_id,
        "rover_result": record.rover_result,
        "confidence": _round6(record.confidence),
    }
    if record.jyutping_confidence is not None:
        obj["jyutping_confidence"] = _round6(record.jyutping_confidence)
    obj["duration"] = _round6(record.duration)
    if record.speaker_id is not None:
        obj["speaker_id"] = record.speaker_id
    obj["gender"] = record.gender
    obj["age"] = record.age
    if record.sample_rate is not None:
        obj["sample_rate"] = int(record.sample_rate)
    if record.effective_bandwidth is not None:
        obj["effective_bandwidth"] = _round6(record.effective_bandwidth)
    if record.dnsmos is not None:
        obj["DNSMOS"] = _round6(record.dnsmos)
    if record.snr is not None:
        obj["SNR"] = _round6(record.snr)
    if record.timestamp is not None:
        obj["timestamp"] = [
            {"token": ts.token, "start": _round6(ts.start_s), "end": _round6(ts.end_s)}
            for ts in record.timestamp
        ]
    obj["meta_info"] = {
        "program": record.meta_info.program,
        "region": record.meta_info.region,
        "link": record.meta_info.link,
        "domain": record.meta_info.domain,
    }
    return obj


def canonical_line(record: MetadataRecord) -> str:
    return json.dumps(_record_to_obj(record), ensure_ascii=False, separators=(",", ":"))


@dataclass
class EmitReport:
    accepted: int = 0
    rejected: list[tuple[str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.rejected


def emit_manifest(records: Iterable[MetadataRecord], out_path: str | Path) -> EmitReport:
    """Write one canonical JSON object per record; invalid records are
    rejected with a reason and the run continues."""
    report = EmitReport()
    with Path(out_path).open("w", encoding="utf-8") as fh:
        for record in records:
            problems = record.violations()
            if problems:
                report.rejected.append((record.utt_id, "; ".join(problems)))
                log.warning("rejected record %r: %s", record.utt_id, "; ".join(problems))
                continue
            fh.write(canonical_line(record) + "\n")
            report.accepted += 1
    return report


def _record_from_obj(obj: dict) -> MetadataRecord:
    meta = obj.get("meta_info", {})
    timestamps = obj.get("timestamp")
    return MetadataRecord(
        utt_id=str(obj["utt_id"]),
        rover_result=str(obj.get("rover_result", "")),
        confidence=float(obj["confidence"]),
        jyutping_confidence=(
            float(obj["jyutping_confidence"]) if "jyutping_confidence" in obj else None
        ),
        duration=float(obj.get("duration", 0.0)),
        speaker_id=obj.get("speaker_id"),
        gender=obj.get("gender", "unknown"),
        age=obj.get("age", "unknown"),
        sample_rate=int(obj["sample_rate"]) if "sample_rate" in obj else None,
        effective_bandwidth=(
            float(obj["effective_bandwidth"]) if "effective_bandwidth" in obj else None
        ),
        dnsmos=float(obj["DNSMOS"]) if "DNSMOS" in obj else None,
        snr=float(obj["SNR"]) if "SNR" in obj else None,
        timestamp=(
            tuple(
                TimestampEntry(str(t["token"]), float(t["start"]), float(t["end"]))
                for t in timestamps
            )
            if timestamps is not None
            else None
        ),
        meta_info=MetaInfo(
            program=str(meta.get("program", "")),
            region=str(meta.get("region", "")),
            link=str(meta.get("link", "")),
            domain=str(meta.get("domain", "Others")),
        ),
    )


def parse_manifest(path: str | Path) -> list[MetadataRecord]:
    records: list[MetadataRecord] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                records.append(_record_from_obj(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad manifest line: {exc}") from exc
    return records


# ---------------------------------------------------------------------------
# Corpus statistics
# ---------------------------------------------------------------------------

_DURATION_BINS = ((0.0, 5.0), (5.0, 10.0), (10.0, 20.0), (20.0, 30.0))
_CONFIDENCE_BINS = ((0.0, 0.6), (0.6, 0.8), (0.8, 0.9), (0.9, 1.0))


def corpus_stats(records: Sequence[MetadataRecord]) -> dict:
    """Totals and distributions over a record collection.

    Bucket hours over strong/moderate/weak sum to the retained hours.
    """
    hours_by_bucket = {b: 0.0 for b in BUCKETS}
    utts_by_bucket = {b: 0 for b in BUCKETS}
    hours_by_domain = {d: 0.0 for d in DOMAINS}
    duration_hist = {f"{lo:g}-{hi:g}s": 0 for lo, hi in _DURATION_BINS}
    duration_hist["30s+"] = 0
    confidence_hist = {f"{lo:g}-{hi:g}": 0 for lo, hi in _CONFIDENCE_BINS}
    age_gender = {age: {g: 0 for g in GENDERS} for age in AGES}

    total_s = 0.0
    for rec in records:
        bucket = assign_bucket(rec.confidence)
        hours = rec.duration / 3600.0
        total_s += rec.duration
        hours_by_bucket[bucket] += hours
        utts_by_bucket[bucket] += 1
        hours_by_domain[rec.meta_info.domain] += hours
        for lo, hi in _DURATION_BINS:
            if lo <= rec.duration < hi:
                duration_hist[f"{lo:g}-{hi:g}s"] += 1
                break
        else:
            duration_hist["30s+"] += 1
        for lo, hi in _CONFIDENCE_BINS:
            if lo < rec.confidence <= hi or (rec.confidence == 0.0 and lo == 0.0):
                confidence_hist[f"{lo:g}-{hi:g}"] += 1
                break
        age_gender[rec.age][rec.gender] += 1

    retained_hours = sum(hours_by_bucket[b] for b in ("strong", "moderate", "weak"))
    n = len(records)
    # nine decimals keep bucket/domain sums additive to well under 1e-6 h
    return {
        "utterances": n,
        "total_hours": round(total_s / 3600.0, 9),
        "retained_hours": round(retained_hours, 9),
        "mean_duration_s": round(total_s / n, 9) if n else 0.0,
        "hours_by_bucket": {b: round(h, 9) for b, h in hours_by_bucket.items()},
        "utterances_by_bucket": utts_by_bucket,
        "hours_by_domain": {d: round(h, 9) for d, h in hours_by_domain.items()},
        "duration_hist": duration_hist,
        "confidence_hist": confidence_hist,
        "age_gender": age_gender,
    }
