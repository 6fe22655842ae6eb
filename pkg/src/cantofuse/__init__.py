"""cantofuse: multi-system ASR transcript fusion and corpus annotation for
Cantonese speech data.

Submodules:
    textnorm    canonical normalization and the shared CJK/Latin tokenizer
    fusion      hypothesis filtering, alignment, voting, confidences
    quality     effective bandwidth, quality sidecars, the TTS gate
    corpusmeta  metadata records, confidence buckets, manifests, stats
    evalmer     mixed error rate scoring
    synth       seeded synthetic corpus generation
    pipeline    end-to-end orchestration
    cli         command line entry point
"""
from __future__ import annotations

__version__ = "0.1.0"

from . import corpusmeta, evalmer, fusion, pipeline, quality, synth, textnorm  # noqa: F401
