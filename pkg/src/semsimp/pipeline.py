"""Lexical simplification, then splitting, then deletion, on one DRS graph at a time."""

from __future__ import annotations

import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Iterable, Sequence

from .compressor import RelProbTable, compress
from .drs import (
    DRSFormatError, SemanticGraph, lift_modifiers, parse_record, preprocess, substitute,
)
from .lexsimp import DEFAULT_FMIN, DEFAULT_KAPPA, DEFAULT_THETA, LexRuleTable, best_substitutions
from .ngram import NgramModel
from .splitter import DEFAULT_MAX_EVENTS, SplitFeatureTable, best_split, is_word

log = logging.getLogger(__name__)

STAGES = ("lex", "split", "delete")
STAGE_NAMES = {"lex": "LexSimpl", "split": "Split", "delete": "Deletion"}
ABLATIONS = [
    ("lex",), ("split",), ("delete",),
    ("lex", "split"), ("lex", "delete"), ("split", "delete"),
    ("lex", "split", "delete"),
]
MODEL_FILES = {"sft": "sft.tsv", "lm": "lm.counts", "rules": "rules.tsv", "relprobs": "relprobs.tsv"}
STAGE_MODELS = {"lex": ("rules",), "split": ("sft", "lm"), "delete": ("relprobs",)}
TERMINATORS = (".", "!", "?")


class ConfigError(ValueError):
    pass


def ablation_name(stages: Sequence[str]) -> str:
    return "-".join(STAGE_NAMES[s] for s in STAGES if s in stages)


@dataclass
class PipelineConfig:
    sft: str | None = None
    lm: str | None = None
    rules: str | None = None
    relprobs: str | None = None
    stages: tuple = STAGES
    max_events: int = DEFAULT_MAX_EVENTS
    lm_normalize: str = "perword"
    theta: float = DEFAULT_THETA
    fmin: int = DEFAULT_FMIN
    kappa: float = DEFAULT_KAPPA
    min_deleted_tokens: int | None = None
    pronominalize: bool = False
    output_format: str = "text"
    threads: int = 1

    @classmethod
    def from_mapping(cls, values: dict, model_dir: str | None = None) -> "PipelineConfig":
        model_dir = model_dir if model_dir is not None else os.environ.get("SEMSIMP_MODELS")
        kwargs = {}
        types = {f.name: f.type for f in fields(cls)}
        for key, raw in values.items():
            key = key.replace("-", "_")
            if key not in types:
                raise ConfigError(f"unknown config key {key!r}")
            if raw is None:
                continue
            kwargs[key] = _coerce(key, raw)
        cfg = cls(**kwargs)
        if model_dir:
            for name, fname in MODEL_FILES.items():
                if getattr(cfg, name) is None:
                    setattr(cfg, name, os.path.join(model_dir, fname))
        return cfg

    def validate(self) -> None:
        if not self.stages:
            raise ConfigError("at least one stage must be enabled")
        bad = [s for s in self.stages if s not in STAGES]
        if bad:
            raise ConfigError(f"unknown stage(s): {', '.join(bad)}")
        if self.lm_normalize not in ("none", "perword"):
            raise ConfigError("lm_normalize must be 'none' or 'perword'")
        if self.output_format not in ("text", "jsonl"):
            raise ConfigError("output_format must be 'text' or 'jsonl'")
        for stage in self.stages:
            for model in STAGE_MODELS[stage]:
                path = getattr(self, model)
                if not path:
                    raise ConfigError(f"stage {stage!r} needs a {model} model")
                if not os.path.exists(path):
                    raise ConfigError(f"{model} model not found: {path}")


def _coerce(key, raw):
    if not isinstance(raw, str):
        return tuple(raw) if key == "stages" else raw
    raw = raw.strip()
    if key == "stages":
        return tuple(s.strip() for s in raw.split(",") if s.strip())
    if key in ("max_events", "fmin", "threads"):
        return int(raw)
    if key == "min_deleted_tokens":
        return int(raw) if raw.lower() not in ("", "none") else None
    if key in ("theta", "kappa"):
        return float(raw)
    if key == "pronominalize":
        return raw.lower() in ("1", "true", "yes", "on")
    return raw


def read_config_file(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key = value")
            k, v = line.split("=", 1)
            out[k.strip()] = v.strip()
    return out


@dataclass
class Models:
    sft: SplitFeatureTable | None = None
    lm: NgramModel | None = None
    rules: LexRuleTable | None = None
    relprobs: RelProbTable | None = None

    @classmethod
    def load(cls, cfg: PipelineConfig) -> "Models":
        m = cls()
        needed = {name for s in cfg.stages for name in STAGE_MODELS[s]}
        if "sft" in needed:
            m.sft = SplitFeatureTable.load(cfg.sft)
        if "lm" in needed:
            m.lm = NgramModel.load(cfg.lm)
        if "rules" in needed:
            m.rules = LexRuleTable.load(cfg.rules)
        if "relprobs" in needed:
            m.relprobs = RelProbTable.load(cfg.relprobs)
        return m


@dataclass
class Result:
    sentence_id: str
    sentences: list
    s1: str = ""
    s2: list = field(default_factory=list)
    error: str | None = None

    @property
    def text(self) -> str:
        return " ".join(self.sentences)


def _finish(tokens: Sequence[str], terminator: str = ".", capitalize: bool = True) -> str:
    toks = list(tokens)
    while toks and not is_word(toks[-1]):
        toks.pop()
    if not toks:
        return ""
    if capitalize:
        toks[0] = toks[0][:1].upper() + toks[0][1:]
    return " ".join(toks + [terminator])


def lexical_stage(g: SemanticGraph, rules: LexRuleTable, kappa: float) -> SemanticGraph:
    tokens = [t.surface for t in g.tokens]
    _, subs = best_substitutions(tokens, rules, kappa)
    for s in sorted(subs, key=lambda s: s.start, reverse=True):
        repl = list(s.rule.simple)
        if tokens[s.start][:1].isupper():
            repl[0] = repl[0][:1].upper() + repl[0][1:]
        g = substitute(g, s.start, s.length, repl)
    return g


def simplify_graph(raw: SemanticGraph, models: Models, cfg: PipelineConfig) -> Result:
    """Run the enabled stages on one freshly parsed graph."""
    g = lift_modifiers(preprocess(raw))
    if "lex" in cfg.stages:
        g = lexical_stage(g, models.rules, cfg.kappa)
    s1 = g.text()

    blocks = [g]
    split = False
    if "split" in cfg.stages:
        cand = best_split(g, models.lm, models.sft, cfg.max_events, cfg.lm_normalize,
                          cfg.pronominalize)
        if cand is not None and cand.n > 1:
            blocks = [b.graph for b in cand.realized]
            split = True
    if split:
        s2 = [_finish([t.surface for t in b.tokens]) for b in blocks]
    else:
        s2 = [s1]

    if "delete" in cfg.stages:
        blocks = [compress(b, models.relprobs, cfg.min_deleted_tokens) for b in blocks]

    out = []
    if split:
        out = [_finish([t.surface for t in b.tokens]) for b in blocks]
    else:
        b = blocks[0]
        toks = [t.surface for t in b.tokens]
        if toks == [t.surface for t in g.tokens]:
            out = [" ".join(toks)]
        else:
            last = g.tokens[-1].surface if g.tokens else "."
            term = last if last in TERMINATORS else None
            first_lost = bool(b.tokens) and b.tokens[0].index != g.tokens[0].index
            if term:
                out = [_finish(toks, term, capitalize=first_lost)]
            else:
                out = [" ".join(toks)]
    out = [s for s in out if s]
    return Result(raw.sentence_id, out, s1, s2)


def simplify_line(line: str, lineno: int, models: Models, cfg: PipelineConfig) -> Result:
    """Never raises: failures come back with ``error`` set and the input echoed."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        return Result(f"line{lineno}", [line.strip()], error=f"line {lineno}: invalid JSON ({exc.msg})")
    try:
        raw = parse_record(obj, lineno)
    except DRSFormatError as exc:
        echo = obj.get("tokens") if isinstance(obj, dict) else None
        text = " ".join(echo) if isinstance(echo, list) and all(isinstance(t, str) for t in echo) \
            else line.strip()
        sid = obj.get("id", f"line{lineno}") if isinstance(obj, dict) else f"line{lineno}"
        return Result(str(sid), [text], error=str(exc))
    try:
        return simplify_graph(raw, models, cfg)
    except Exception as exc:  # one bad sentence must not stop the batch
        log.debug("sentence %s failed", raw.sentence_id, exc_info=True)
        return Result(raw.sentence_id, [raw.text()], raw.text(), [raw.text()],
                      error=f"line {lineno}: {type(exc).__name__}: {exc}")


def simplify_lines(lines: Iterable[str], models: Models, cfg: PipelineConfig) -> list:
    items = [(i, ln) for i, ln in enumerate(lines, 1) if ln.strip()]

    def one(item):
        return simplify_line(item[1], item[0], models, cfg)

    if cfg.threads > 1:
        with ThreadPoolExecutor(cfg.threads) as pool:
            return list(pool.map(one, items))
    return [one(it) for it in items]


def format_result(res: Result, fmt: str = "text") -> str:
    if fmt == "jsonl":
        rec = {"id": res.sentence_id, "output": res.text, "sentences": res.sentences}
        if res.error:
            rec["error"] = res.error
        return json.dumps(rec, ensure_ascii=False, sort_keys=True)
    return res.text
