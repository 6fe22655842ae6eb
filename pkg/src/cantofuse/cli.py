"""Command line interface.

Subcommands: ``run`` (full pipeline), ``mer`` (score hypotheses against
references), ``stats`` (report over an existing manifest), ``synth``
(seeded synthetic corpus), ``validate`` (manifest lint).

Exit codes: 0 success, 1 input error, 2 completed with warnings.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import corpusmeta, evalmer, pipeline, synth, textnorm

log = logging.getLogger(__name__)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cantofuse",
        description="Multi-system ASR transcript fusion and corpus annotation toolkit",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the full fusion/annotation pipeline")
    p_run.add_argument("--config", type=Path, help="TOML config file (flags override it)")
    p_run.add_argument(
        "--hyp",
        action="append",
        default=[],
        metavar="SYSTEM=PATH",
        help="hypothesis JSONL for one system; repeat per system, order sets priority",
    )
    p_run.add_argument("--out-manifest", type=Path, help="output manifest JSONL")
    p_run.add_argument("--stats-report", type=Path, help="output stats JSON")
    p_run.add_argument("--ledger", type=Path, help="output run ledger JSON")
    p_run.add_argument("--tables-dir", type=Path, help="directory with rule table files")
    p_run.add_argument("--filter-threshold", type=float, help="outlier filter cutoff")
    p_run.add_argument("--drop-threshold", type=float, help="confidence retention cutoff")
    p_run.add_argument("--quality-sidecar", type=Path, help="JSONL with snr/dnsmos per utt")
    p_run.add_argument("--speaker-sidecar", type=Path, help="JSONL with speaker attributes")
    p_run.add_argument("--timestamp-sidecar", type=Path, help="JSONL with token timestamps")
    p_run.add_argument("--utterance-index", type=Path, help="JSONL with duration/audio/meta per utt")
    p_run.add_argument("--audio-dir", type=Path, help="base directory for relative audio paths")
    p_run.add_argument("--dnsmos-min", type=float, help="TTS gate DNSMOS cutoff")
    p_run.add_argument("--snr-min", type=float, help="TTS gate SNR cutoff (dB)")
    p_run.add_argument("--energy-fraction", type=float, help="bandwidth rolloff fraction")
    p_run.add_argument("--corrector-cmd", help="external corrector executable")
    p_run.add_argument("--corrector-guard", type=float, help="max normalized edit distance accepted")
    p_run.add_argument("--corrector-timeout", type=float, help="hook timeout in seconds")
    p_run.add_argument("--corrector-replay", type=Path, help="replay hook replies from a ledger")
    p_run.add_argument("--workers", type=int, help="worker pool size")

    p_mer = sub.add_parser("mer", help="score a hypothesis manifest against a reference")
    p_mer.add_argument("--ref", type=Path, required=True, help="reference JSONL {utt_id, text, tags?}")
    p_mer.add_argument("--hyp", type=Path, required=True, help="hypothesis JSONL {utt_id, text}")
    p_mer.add_argument("--by-tag", action="store_true", help="print per-tag breakdown")
    p_mer.add_argument("--tables-dir", type=Path, help="directory with rule table files")
    p_mer.add_argument("--report", type=Path, help="write the full report as JSON")

    p_stats = sub.add_parser("stats", help="corpus statistics over a manifest")
    p_stats.add_argument("--manifest", type=Path, required=True)
    p_stats.add_argument("--stats-report", type=Path, help="write report JSON here instead of stdout")

    p_synth = sub.add_parser("synth", help="generate a seeded synthetic corpus")
    p_synth.add_argument("--out", type=Path, required=True, help="output directory")
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--n-utts", type=int, default=500)
    p_synth.add_argument("--error-rate", type=float, default=0.1)

    p_val = sub.add_parser("validate", help="lint a manifest against the canonical schema")
    p_val.add_argument("--manifest", type=Path, required=True)

    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    if args.config is not None:
        cfg = pipeline.load_config(args.config)
    else:
        cfg = pipeline.PipelineConfig(systems=[], out_manifest=Path("manifest.jsonl"))

    for spec in args.hyp:
        system_id, sep, hyp_path = spec.partition("=")
        if not sep or not system_id or not hyp_path:
            raise pipeline.InputError(f"--hyp expects SYSTEM=PATH, got {spec!r}")
        cfg.systems.append(pipeline.SystemSpec(system_id, Path(hyp_path)))

    overrides = {
        "out_manifest": args.out_manifest,
        "stats_report": args.stats_report,
        "ledger_path": args.ledger,
        "tables_dir": args.tables_dir,
        "filter_threshold": args.filter_threshold,
        "drop_threshold": args.drop_threshold,
        "quality_sidecar": args.quality_sidecar,
        "speaker_sidecar": args.speaker_sidecar,
        "timestamp_sidecar": args.timestamp_sidecar,
        "utterance_index": args.utterance_index,
        "audio_dir": args.audio_dir,
        "dnsmos_min": args.dnsmos_min,
        "snr_min": args.snr_min,
        "energy_fraction": args.energy_fraction,
        "corrector_guard": args.corrector_guard,
        "corrector_timeout": args.corrector_timeout,
        "corrector_replay": args.corrector_replay,
        "workers": args.workers,
    }
    for name, value in overrides.items():
        if value is not None:
            setattr(cfg, name, value)
    if args.corrector_cmd is not None:
        cfg.corrector_cmd = args.corrector_cmd.split()

    result = pipeline.run(cfg)
    print(f"manifest: {result.manifest_path} ({result.counters['ok']} records)")
    print(
        "utterances: {input} in, {ok} ok, {dropped} dropped, {error} error".format(
            **result.counters
        )
    )
    if result.stats_path:
        print(f"stats: {result.stats_path}")
    if result.ledger_path:
        print(f"ledger: {result.ledger_path}")
    for warning in result.warnings[:20]:
        print(f"warning: {warning}", file=sys.stderr)
    if len(result.warnings) > 20:
        print(f"... {len(result.warnings) - 20} more warnings", file=sys.stderr)
    return result.exit_code


def _cmd_mer(args: argparse.Namespace) -> int:
    tables = textnorm.load_tables(args.tables_dir)
    report = evalmer.score_manifest(args.ref, args.hyp, tables)
    c = report.corpus
    print(
        f"corpus MER {c.mer_percent:.2f}% "
        f"(S={c.substitutions} D={c.deletions} I={c.insertions} N={c.ref_len})"
    )
    if args.by_tag:
        for tag, score in sorted(report.by_tag.items()):
            print(f"  [{tag}] MER {score.mer_percent:.2f}% (errors={score.errors} N={score.ref_len})")
    if report.missing_refs:
        print(f"hypotheses without reference: {len(report.missing_refs)}", file=sys.stderr)
    if report.missing_hyps:
        print(f"references without hypothesis: {len(report.missing_hyps)}", file=sys.stderr)
    if args.report:
        args.report.parent.mkdir(parents=True, exist_ok=True)
        args.report.write_text(
            json.dumps(report.to_json_obj(), ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8",
        )
    return pipeline.EXIT_WARNINGS if report.warnings else pipeline.EXIT_OK


def _cmd_stats(args: argparse.Namespace) -> int:
    records = corpusmeta.parse_manifest(args.manifest)
    stats = corpusmeta.corpus_stats(records)
    payload = json.dumps(stats, ensure_ascii=False, indent=2, sort_keys=True)
    if args.stats_report:
        args.stats_report.parent.mkdir(parents=True, exist_ok=True)
        args.stats_report.write_text(payload + "\n", encoding="utf-8")
        print(f"stats: {args.stats_report}")
    else:
        print(payload)
    return pipeline.EXIT_OK


def _cmd_synth(args: argparse.Namespace) -> int:
    paths = synth.make_synthetic_corpus(args.out, args.seed, args.n_utts, args.error_rate)
    for name in sorted(paths):
        print(f"{name}: {paths[name]}")
    return pipeline.EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        records = corpusmeta.parse_manifest(args.manifest)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return pipeline.EXIT_INPUT_ERROR
    bad = 0
    for record in records:
        problems = record.violations()
        if problems:
            bad += 1
            print(f"{record.utt_id}: {'; '.join(problems)}", file=sys.stderr)
        else:
            line = corpusmeta.canonical_line(record)
            reparsed = corpusmeta.canonical_line(corpusmeta._record_from_obj(json.loads(line)))
            if line != reparsed:
                bad += 1
                print(f"{record.utt_id}: not in canonical form", file=sys.stderr)
    print(f"validated {len(records)} records, {bad} with problems")
    return pipeline.EXIT_WARNINGS if bad else pipeline.EXIT_OK


_HANDLERS = {
    "run": _cmd_run,
    "mer": _cmd_mer,
    "stats": _cmd_stats,
    "synth": _cmd_synth,
    "validate": _cmd_validate,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _HANDLERS[args.command](args)
    except (pipeline.InputError, textnorm.TableError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return pipeline.EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
