"""Per-utterance speech quality annotation.

Effective bandwidth is computed natively from the averaged power spectrum.
SNR and DNSMOS come from externally produced sidecar files and are never
fabricated; utterances missing either value simply fail the synthesis gate.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.io import wavfile

log = logging.getLogger(__name__)

__all__ = [
    "AudioSegment",
    "QualityAnnotation",
    "read_wav",
    "effective_bandwidth",
    "ingest_quality_sidecar",
    "tts_gate",
    "DEFAULT_ENERGY_FRACTION",
    "DEFAULT_DNSMOS_MIN",
    "DEFAULT_SNR_MIN",
    "BANDWIDTH_WINDOW",
    "BANDWIDTH_HOP",
]

DEFAULT_ENERGY_FRACTION = 0.99
DEFAULT_DNSMOS_MIN = 2.5
DEFAULT_SNR_MIN = 25.0
BANDWIDTH_WINDOW = 1024
BANDWIDTH_HOP = 512


@dataclass(frozen=True)
class AudioSegment:
    """Mono audio in [-1, 1] at a fixed sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        if self.samples.size == 0:
            raise ValueError("audio segment is empty")
        if self.sample_rate <= 0:
            raise ValueError(f"bad sample rate {self.sample_rate}")

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class QualityAnnotation:
    snr_db: float | None
    dnsmos: float | None
    effective_bandwidth_hz: float | None = None
    sample_rate: int | None = None
    duration_s: float | None = None


def read_wav(path: str | Path) -> AudioSegment:
    """Read a RIFF WAV (integer PCM or float); stereo is downmixed by averaging."""
    rate, data = wavfile.read(str(path))
    samples = np.asarray(data, dtype=np.float64)
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    if data.dtype == np.int16:
        samples /= 32768.0
    elif data.dtype == np.int32:
        samples /= 2147483648.0
    elif data.dtype == np.uint8:
        samples = (samples - 128.0) / 128.0
    return AudioSegment(samples=samples, sample_rate=int(rate))


def effective_bandwidth(
    segment: AudioSegment, energy_fraction: float = DEFAULT_ENERGY_FRACTION
) -> float:
    """Smallest frequency below which ``energy_fraction`` of the averaged
    spectral power lies.

    Frames of :data:`BANDWIDTH_WINDOW` samples at :data:`BANDWIDTH_HOP`
    spacing are Hann-windowed and averaged; segments shorter than one window
    are zero-padded into a single low-reliability frame.
    """
    if not 0.0 < energy_fraction < 1.0:
        raise ValueError(f"energy_fraction must be in (0, 1), got {energy_fraction}")
    x = np.asarray(segment.samples, dtype=np.float64)
    if x.size < BANDWIDTH_WINDOW:
        log.warning(
            "segment shorter than one analysis window (%d < %d); low-reliability estimate",
            x.size,
            BANDWIDTH_WINDOW,
        )
        frames = np.zeros((1, BANDWIDTH_WINDOW))
        frames[0, : x.size] = x
    else:
        n_frames = 1 + (x.size - BANDWIDTH_WINDOW) // BANDWIDTH_HOP
        idx = np.arange(BANDWIDTH_WINDOW)[None, :] + BANDWIDTH_HOP * np.arange(n_frames)[:, None]
        frames = x[idx]
    window = np.hanning(BANDWIDTH_WINDOW)
    spectrum = np.abs(np.fft.rfft(frames * window, axis=1)) ** 2
    power = spectrum.mean(axis=0)
    total = power.sum()
    if total <= 0.0:
        return 0.0
    cumulative = np.cumsum(power)
    k = int(np.searchsorted(cumulative, energy_fraction * total, side="left"))
    k = min(k, power.size - 1)
    return k * segment.sample_rate / BANDWIDTH_WINDOW


def ingest_quality_sidecar(path: str | Path) -> dict[str, tuple[float | None, float | None]]:
    """Read a JSONL sidecar of ``{"utt_id", "snr", "dnsmos"}`` rows.

    Later rows override earlier ones for the same id; rows without at least
    one metric (or malformed rows) are skipped with a warning. A missing file
    yields an empty map.
    """
    path = Path(path)
    result: dict[str, tuple[float | None, float | None]] = {}
    if not path.exists():
        return result
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                utt_id = obj["utt_id"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                log.warning("%s:%d: skipped malformed line (%s)", path, lineno, exc)
                continue
            snr = obj.get("snr")
            dnsmos = obj.get("dnsmos")
            if snr is None and dnsmos is None:
                log.warning("%s:%d: skipped %r, no snr or dnsmos", path, lineno, utt_id)
                continue
            result[str(utt_id)] = (
                float(snr) if snr is not None else None,
                float(dnsmos) if dnsmos is not None else None,
            )
    return result


def tts_gate(
    annotation: QualityAnnotation,
    dnsmos_min: float = DEFAULT_DNSMOS_MIN,
    snr_min: float = DEFAULT_SNR_MIN,
) -> bool:
    """True iff both model scores are present and strictly above the cuts."""
    return (
        annotation.dnsmos is not None
        and annotation.dnsmos > dnsmos_min
        and annotation.snr_db is not None
        and annotation.snr_db > snr_min
    )
