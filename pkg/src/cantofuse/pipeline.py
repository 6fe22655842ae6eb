"""End-to-end corpus run: ingest per-system hypotheses and sidecars, fuse,
gate, partition, and emit the canonical manifest plus stats and a run ledger.

Utterances are independent work units; shared tables are read-only, output
is written in sorted utterance order, and corrector replies are persisted in
the ledger so a rerun can replay them byte-for-byte.
"""
from __future__ import annotations

import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from . import corpusmeta, fusion, quality, textnorm

log = logging.getLogger(__name__)

__all__ = ["InputError", "SystemSpec", "PipelineConfig", "RunResult", "run", "load_config"]

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_WARNINGS = 2


class InputError(RuntimeError):
    """Unreadable or inconsistent inputs; the run aborts before processing."""


@dataclass(frozen=True)
class SystemSpec:
    system_id: str
    hyp_path: Path


@dataclass
class PipelineConfig:
    systems: list[SystemSpec]
    out_manifest: Path
    stats_report: Path | None = None
    ledger_path: Path | None = None
    tables_dir: Path | None = None
    filter_threshold: float = fusion.DEFAULT_FILTER_THRESHOLD
    drop_threshold: float = corpusmeta.RETAIN_MIN
    corrector_cmd: list[str] | None = None
    corrector_guard: float = fusion.DEFAULT_CORRECTOR_GUARD
    corrector_timeout: float = fusion.DEFAULT_CORRECTOR_TIMEOUT
    corrector_replay: Path | None = None
    quality_sidecar: Path | None = None
    speaker_sidecar: Path | None = None
    timestamp_sidecar: Path | None = None
    utterance_index: Path | None = None
    audio_dir: Path | None = None
    dnsmos_min: float = quality.DEFAULT_DNSMOS_MIN
    snr_min: float = quality.DEFAULT_SNR_MIN
    energy_fraction: float = quality.DEFAULT_ENERGY_FRACTION
    workers: int = 1
    seed: int = 0
    meta_defaults: corpusmeta.MetaInfo = field(default_factory=corpusmeta.MetaInfo)

    def validate(self) -> None:
        if not self.systems:
            raise InputError("no hypothesis systems configured")
        ids = [s.system_id for s in self.systems]
        if len(set(ids)) != len(ids):
            raise InputError(f"duplicate system ids: {ids}")
        if not 0.0 < self.filter_threshold <= 1.0:
            raise InputError(f"filter_threshold out of (0,1]: {self.filter_threshold}")
        if not 0.0 <= self.drop_threshold < 1.0:
            raise InputError(f"drop_threshold out of [0,1): {self.drop_threshold}")
        if not 0.0 < self.corrector_guard <= 1.0:
            raise InputError(f"corrector_guard out of (0,1]: {self.corrector_guard}")
        if not 0.0 < self.energy_fraction < 1.0:
            raise InputError(f"energy_fraction out of (0,1): {self.energy_fraction}")
        if self.workers < 1:
            raise InputError(f"workers must be >= 1, got {self.workers}")

    def config_hash(self) -> str:
        payload = {
            "systems": [[s.system_id, str(s.hyp_path)] for s in self.systems],
            "filter_threshold": self.filter_threshold,
            "drop_threshold": self.drop_threshold,
            "corrector_cmd": self.corrector_cmd,
            "corrector_guard": self.corrector_guard,
            "dnsmos_min": self.dnsmos_min,
            "snr_min": self.snr_min,
            "energy_fraction": self.energy_fraction,
            "seed": self.seed,
            "meta_defaults": vars(self.meta_defaults),
        }
        digest = hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8"))
        return digest.hexdigest()[:16]


def load_config(path: str | Path) -> PipelineConfig:
    """Parse a TOML config file into a :class:`PipelineConfig`."""
    try:
        import tomllib  # Python >= 3.11
    except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
        import tomli as tomllib

    path = Path(path)
    try:
        with path.open("rb") as fh:
            data = tomllib.load(fh)
    except (OSError, tomllib.TOMLDecodeError) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc

    base = path.parent

    def _path(value: str | None) -> Path | None:
        if value is None:
            return None
        p = Path(value)
        return p if p.is_absolute() else base / p

    systems = [
        SystemSpec(str(entry["id"]), _path(str(entry["hyp"])))
        for entry in data.get("system", [])
    ]
    meta = data.get("meta_info", {})
    io = data.get("io", {})
    params = data.get("params", {})
    corrector = data.get("corrector", {})

    cmd = corrector.get("cmd")
    if isinstance(cmd, str):
        cmd = [cmd]

    return PipelineConfig(
        systems=systems,
        out_manifest=_path(io.get("out_manifest", "manifest.jsonl")),
        stats_report=_path(io.get("stats_report")),
        ledger_path=_path(io.get("ledger")),
        tables_dir=_path(io.get("tables_dir")),
        quality_sidecar=_path(io.get("quality_sidecar")),
        speaker_sidecar=_path(io.get("speaker_sidecar")),
        timestamp_sidecar=_path(io.get("timestamp_sidecar")),
        utterance_index=_path(io.get("utterance_index")),
        audio_dir=_path(io.get("audio_dir")),
        filter_threshold=float(params.get("filter_threshold", fusion.DEFAULT_FILTER_THRESHOLD)),
        drop_threshold=float(params.get("drop_threshold", corpusmeta.RETAIN_MIN)),
        dnsmos_min=float(params.get("dnsmos_min", quality.DEFAULT_DNSMOS_MIN)),
        snr_min=float(params.get("snr_min", quality.DEFAULT_SNR_MIN)),
        energy_fraction=float(params.get("energy_fraction", quality.DEFAULT_ENERGY_FRACTION)),
        workers=int(params.get("workers", 1)),
        seed=int(params.get("seed", 0)),
        corrector_cmd=list(cmd) if cmd else None,
        corrector_guard=float(corrector.get("guard", fusion.DEFAULT_CORRECTOR_GUARD)),
        corrector_timeout=float(corrector.get("timeout", fusion.DEFAULT_CORRECTOR_TIMEOUT)),
        corrector_replay=_path(corrector.get("replay")),
        meta_defaults=corpusmeta.MetaInfo(
            program=str(meta.get("program", "")),
            region=str(meta.get("region", "")),
            link=str(meta.get("link", "")),
            domain=str(meta.get("domain", "Others")),
        ),
    )


@dataclass
class RunResult:
    manifest_path: Path
    counters: dict[str, int]
    warnings: list[str]
    exit_code: int
    stats_path: Path | None = None
    ledger_path: Path | None = None


def _read_hypothesis_file(path: Path) -> dict[str, str]:
    texts: dict[str, str] = {}
    try:
        fh = path.open("r", encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read hypothesis file {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                texts[str(obj["utt_id"])] = str(obj["text"])
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise InputError(f"{path}:{lineno}: bad hypothesis line: {exc}") from exc
    return texts


def _read_utterance_index(path: Path | None) -> dict[str, dict]:
    if path is None:
        return {}
    index: dict[str, dict] = {}
    if not path.exists():
        raise InputError(f"utterance index {path} does not exist")
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                index[str(obj["utt_id"])] = obj
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise InputError(f"{path}:{lineno}: bad index line: {exc}") from exc
    return index


def _read_timestamp_sidecar(path: Path | None) -> dict[str, tuple[corpusmeta.TimestampEntry, ...]]:
    if path is None or not path.exists():
        return {}
    out: dict[str, tuple[corpusmeta.TimestampEntry, ...]] = {}
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                entries = tuple(
                    corpusmeta.TimestampEntry(str(t["token"]), float(t["start"]), float(t["end"]))
                    for t in obj["timestamp"]
                )
                out[str(obj["utt_id"])] = entries
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                log.warning("%s:%d: skipped malformed timestamp line (%s)", path, lineno, exc)
    return out


def _load_replay(path: Path | None) -> dict[str, dict]:
    if path is None:
        return {}
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read replay ledger {path}: {exc}") from exc
    replies: dict[str, dict] = {}
    for utt_id, entry in data.get("utterances", {}).items():
        corrector = entry.get("corrector") or {}
        response = corrector.get("response")
        if response is not None:
            replies[utt_id] = response
    return replies


@dataclass
class _UttOutcome:
    utt_id: str
    status: str  # ok | dropped | error
    reason: str = ""
    record: corpusmeta.MetadataRecord | None = None
    ledger: dict = field(default_factory=dict)
    warning: bool = False


def _process_utterance(
    utt_id: str,
    cfg: PipelineConfig,
    tables: textnorm.NormalizationTables,
    jyut_table: dict[str, tuple[str, ...]],
    hyp_texts: dict[str, dict[str, str]],
    quality_map: dict[str, tuple[float | None, float | None]],
    speaker_map: dict[str, corpusmeta.SpeakerInfo],
    timestamp_map: dict[str, tuple[corpusmeta.TimestampEntry, ...]],
    index: dict[str, dict],
    replay: dict[str, dict],
) -> _UttOutcome:
    entry: dict = {}
    notes: list[str] = []

    hypotheses: list[fusion.Hypothesis] = []
    for spec in cfg.systems:
        raw = hyp_texts[spec.system_id].get(utt_id)
        if raw is None:
            notes.append(f"no hypothesis from {spec.system_id}")
            continue
        try:
            norm = textnorm.normalize(textnorm.RawTranscript(spec.system_id, raw), tables)
        except textnorm.EmptyTranscriptError:
            notes.append(f"empty after normalization: {spec.system_id}")
            continue
        except textnorm.InvalidTextError as exc:
            notes.append(f"invalid text from {spec.system_id}: {exc}")
            continue
        hypotheses.append(
            fusion.Hypothesis(spec.system_id, tuple(t.surface for t in norm.tokens))
        )
    entry["notes"] = notes
    if not hypotheses:
        entry["status"] = "error"
        entry["reason"] = "no usable hypotheses"
        return _UttOutcome(utt_id, "error", "no usable hypotheses", ledger=entry, warning=True)

    hset = fusion.HypothesisSet(utt_id, tuple(hypotheses))
    result = fusion.fuse(hset, jyut_table, cfg.filter_threshold)
    warning = False
    if cfg.corrector_cmd or utt_id in replay:
        result = fusion.apply_corrector(
            result,
            hset,
            cfg.corrector_cmd,
            tables,
            guard=cfg.corrector_guard,
            timeout=cfg.corrector_timeout,
            reply=replay.get(utt_id),
        )
        entry["corrector"] = result.corrector
        if result.corrector and result.corrector.get("status") == "skipped":
            warning = True

    entry["confidence"] = round(result.text_confidence, 6)
    entry["excluded_systems"] = list(result.excluded_systems)
    if result.flags:
        entry["flags"] = list(result.flags)

    if result.text_confidence <= cfg.drop_threshold:
        entry["status"] = "dropped"
        entry["reason"] = f"confidence <= {cfg.drop_threshold:g}"
        return _UttOutcome(utt_id, "dropped", entry["reason"], ledger=entry, warning=warning)

    info = index.get(utt_id, {})
    duration = float(info.get("duration", 0.0))
    sample_rate = int(info["sample_rate"]) if "sample_rate" in info else None
    bandwidth: float | None = None
    audio_rel = info.get("audio")
    if audio_rel is not None:
        audio_path = Path(audio_rel)
        if not audio_path.is_absolute() and cfg.audio_dir is not None:
            audio_path = cfg.audio_dir / audio_path
        try:
            segment = quality.read_wav(audio_path)
            duration = segment.duration_s
            sample_rate = segment.sample_rate
            bandwidth = quality.effective_bandwidth(segment, cfg.energy_fraction)
        except (OSError, ValueError) as exc:
            notes.append(f"audio unreadable: {exc}")
            warning = True

    snr, dnsmos = quality_map.get(utt_id, (None, None))
    speaker = speaker_map.get(utt_id, corpusmeta.SpeakerInfo(None, "unknown", "unknown"))

    meta = corpusmeta.MetaInfo(
        program=str(info.get("program", cfg.meta_defaults.program)),
        region=str(info.get("region", cfg.meta_defaults.region)),
        link=str(info.get("link", cfg.meta_defaults.link)),
        domain=str(info.get("domain", cfg.meta_defaults.domain)),
    )
    record = corpusmeta.MetadataRecord(
        utt_id=utt_id,
        rover_result=result.fused_text,
        confidence=result.text_confidence,
        jyutping_confidence=result.jyutping_confidence,
        duration=duration,
        speaker_id=speaker.speaker_id,
        gender=speaker.gender,
        age=speaker.age,
        sample_rate=sample_rate,
        effective_bandwidth=bandwidth,
        dnsmos=dnsmos,
        snr=snr,
        timestamp=timestamp_map.get(utt_id),
        meta_info=meta,
    )
    problems = record.violations()
    if problems:
        reason = "; ".join(problems)
        entry["status"] = "error"
        entry["reason"] = reason
        return _UttOutcome(utt_id, "error", reason, ledger=entry, warning=True)

    entry["status"] = "ok"
    entry["bucket"] = corpusmeta.assign_bucket(result.text_confidence)
    gated = quality.tts_gate(
        quality.QualityAnnotation(snr_db=snr, dnsmos=dnsmos),
        cfg.dnsmos_min,
        cfg.snr_min,
    )
    entry["tts_eligible"] = gated
    return _UttOutcome(utt_id, "ok", record=record, ledger=entry, warning=warning)


def run(cfg: PipelineConfig) -> RunResult:
    """Execute the full pipeline; deterministic given identical inputs and
    recorded corrector replies."""
    cfg.validate()
    tables = textnorm.load_tables(cfg.tables_dir)
    jyut_table = fusion.load_jyutping_table(cfg.tables_dir)

    hyp_texts = {spec.system_id: _read_hypothesis_file(spec.hyp_path) for spec in cfg.systems}
    quality_map = (
        quality.ingest_quality_sidecar(cfg.quality_sidecar) if cfg.quality_sidecar else {}
    )
    speaker_map = (
        corpusmeta.ingest_speaker_sidecar(cfg.speaker_sidecar) if cfg.speaker_sidecar else {}
    )
    timestamp_map = _read_timestamp_sidecar(cfg.timestamp_sidecar)
    index = _read_utterance_index(cfg.utterance_index)
    replay = _load_replay(cfg.corrector_replay)

    utt_ids = sorted(set().union(*(texts.keys() for texts in hyp_texts.values())))

    def work(utt_id: str) -> _UttOutcome:
        try:
            return _process_utterance(
                utt_id, cfg, tables, jyut_table, hyp_texts,
                quality_map, speaker_map, timestamp_map, index, replay,
            )
        except Exception as exc:  # per-utterance failures never abort the run
            log.exception("utterance %r failed", utt_id)
            entry = {"status": "error", "reason": f"{type(exc).__name__}: {exc}"}
            return _UttOutcome(utt_id, "error", entry["reason"], ledger=entry, warning=True)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(work, utt_ids))
    else:
        outcomes = [work(u) for u in utt_ids]

    counters = {"input": len(utt_ids), "ok": 0, "dropped": 0, "error": 0, "tts_eligible": 0}
    warnings: list[str] = []
    records: list[corpusmeta.MetadataRecord] = []
    ledger_utts: dict[str, dict] = {}
    for outcome in outcomes:
        counters[outcome.status] += 1
        if outcome.record is not None:
            records.append(outcome.record)
        if outcome.ledger.get("tts_eligible"):
            counters["tts_eligible"] += 1
        if outcome.warning:
            warnings.append(f"{outcome.utt_id}: {outcome.reason or 'see ledger'}")
        ledger_utts[outcome.utt_id] = outcome.ledger

    cfg.out_manifest.parent.mkdir(parents=True, exist_ok=True)
    emit_report = corpusmeta.emit_manifest(records, cfg.out_manifest)
    for utt_id, reason in emit_report.rejected:
        # record failed canonical validation at write time
        counters["ok"] -= 1
        counters["error"] += 1
        ledger_utts[utt_id]["status"] = "error"
        ledger_utts[utt_id]["reason"] = reason
        warnings.append(f"{utt_id}: {reason}")

    stats_path = None
    if cfg.stats_report is not None:
        stats = corpusmeta.corpus_stats(
            [r for r in records if not any(r.utt_id == rej for rej, _ in emit_report.rejected)]
        )
        stats["counters"] = counters
        cfg.stats_report.parent.mkdir(parents=True, exist_ok=True)
        cfg.stats_report.write_text(
            json.dumps(stats, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        stats_path = cfg.stats_report

    ledger_path = None
    if cfg.ledger_path is not None:
        ledger = {
            "config_hash": cfg.config_hash(),
            "counters": counters,
            "utterances": {u: ledger_utts[u] for u in sorted(ledger_utts)},
        }
        cfg.ledger_path.parent.mkdir(parents=True, exist_ok=True)
        cfg.ledger_path.write_text(
            json.dumps(ledger, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        ledger_path = cfg.ledger_path

    exit_code = EXIT_WARNINGS if warnings else EXIT_OK
    return RunResult(
        manifest_path=cfg.out_manifest,
        counters=counters,
        warnings=warnings,
        exit_code=exit_code,
        stats_path=stats_path,
        ledger_path=ledger_path,
    )
