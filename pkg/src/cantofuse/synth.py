"""Seeded synthetic corpus generation for pipeline validation.

Ground-truth token sequences mix common Cantonese characters with Latin
words; each simulated recognizer gets an independently corrupted copy with
per-token substitution/deletion/insertion errors at a configurable rate.
"""
from __future__ import annotations

import json
import random
from pathlib import Path

from . import textnorm

__all__ = ["CJK_VOCAB", "LATIN_VOCAB", "DEFAULT_SYSTEMS", "make_synthetic_corpus"]

# Normalization-stable vocabulary: simplified or Cantonese-specific characters
# only, so generated text is its own canonical form.
CJK_VOCAB = (
    "我你佢哋人大好唔係冇有睇食饭饮茶水去返工放学讲话听写读书"
    "日月年时分钟点半早晚夜今出入行走企坐住买卖钱平贵多少几乜嘢"
    "边度呢嗰个条样嘅咗紧啦喇呀嘛啊咁就都同埋先再又仲最真新旧开"
    "关心想知道识得见屋街市店车电脑手机打玩游戏唱歌跳舞完全地天"
    "用来嚟国家中文英港香上下左右前后里外山海路门台房火灯色白黑"
    "长短高快慢冻热冷暖叫做俾搵帮等啱错对明声音乐爱肥远近深净洗"
    "送拎推拉踢跑波球赢输队组员老师生班考试题答问教练习功名姐妹"
    "婆公仔女男朋友客主病痛身体头面口眼耳肚菜肉鸡鸭猪牛蛋奶糖油"
    "酒果包粉粥汤甜酸苦辣咸淡龙湾岛区省城镇村乡楼层室场园馆局站"
    "铁巴士船单双份件张枝把部架蚊毫纸币卡数计算加减乘除共总约超"
    "过差古华汉典词语言故事闻报纪录片相影画图网线视频风雨云雷雪"
    "冰晴阴阳光暗静嘈气空温爽掂搞办法方向位处间震郁停始终结束直"
    "曲转弯横"
)
LATIN_VOCAB = (
    "ok", "okay", "app", "email", "wifi", "bus", "taxi", "server", "online",
    "offline", "team", "project", "phone", "game", "video", "lunch", "coffee",
    "weekend", "meeting", "deadline", "update", "download", "login", "file",
    "folder", "chat", "group", "post", "card", "menu",
)
DEFAULT_SYSTEMS = ("sysA", "sysB", "sysC")

_LATIN_PROB = 0.15
_MIN_TOKENS = 4
_MAX_TOKENS = 14


def _random_token(rng: random.Random) -> str:
    if rng.random() < _LATIN_PROB:
        return rng.choice(LATIN_VOCAB)
    return rng.choice(CJK_VOCAB)


def _corrupt(truth: list[str], rng: random.Random, error_rate: float) -> list[str]:
    out: list[str] = []
    for tok in truth:
        if rng.random() >= error_rate:
            out.append(tok)
            continue
        op = rng.choice(("sub", "del", "ins"))
        if op == "sub":
            repl = _random_token(rng)
            while repl == tok:
                repl = _random_token(rng)
            out.append(repl)
        elif op == "ins":
            out.append(_random_token(rng))
            out.append(tok)
        # "del": token dropped
    return out


def make_synthetic_corpus(
    out_dir: str | Path,
    seed: int,
    n_utts: int,
    error_rate: float,
    systems: tuple[str, ...] = DEFAULT_SYSTEMS,
) -> dict[str, Path]:
    """Generate truth + per-system hypothesis files, reproducibly from seed.

    Returns a map with the truth path, the utterance index path, and one
    ``hyp_<system>`` path per simulated recognizer.
    """
    if not 0.0 <= error_rate < 1.0:
        raise ValueError(f"error_rate must be in [0, 1), got {error_rate}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rng = random.Random(seed)

    truths: list[tuple[str, list[str]]] = []
    for i in range(n_utts):
        utt_id = f"utt{i:06d}"
        n_tok = rng.randint(_MIN_TOKENS, _MAX_TOKENS)
        truths.append((utt_id, [_random_token(rng) for _ in range(n_tok)]))

    paths: dict[str, Path] = {}

    truth_path = out_dir / "truth.jsonl"
    with truth_path.open("w", encoding="utf-8") as fh:
        for utt_id, tokens in truths:
            line = {"utt_id": utt_id, "text": textnorm.join_surfaces(tokens)}
            fh.write(json.dumps(line, ensure_ascii=False) + "\n")
    paths["truth"] = truth_path

    for system in systems:
        hyp_path = out_dir / f"hyp_{system}.jsonl"
        with hyp_path.open("w", encoding="utf-8") as fh:
            for utt_id, tokens in truths:
                corrupted = _corrupt(tokens, rng, error_rate)
                line = {"utt_id": utt_id, "text": textnorm.join_surfaces(corrupted)}
                fh.write(json.dumps(line, ensure_ascii=False) + "\n")
        paths[f"hyp_{system}"] = hyp_path

    index_path = out_dir / "utterances.jsonl"
    with index_path.open("w", encoding="utf-8") as fh:
        for utt_id, _ in truths:
            line = {"utt_id": utt_id, "duration": round(rng.uniform(2.0, 15.0), 2)}
            fh.write(json.dumps(line, ensure_ascii=False) + "\n")
    paths["utterances"] = index_path

    return paths
