"""Command line entry point: ``semsimp train|simplify|evaluate``.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__
from .compressor import train_rel_probs
from .drs import DRSFormatError, lift_modifiers, parse_drs_file, preprocess
from .lexsimp import DEFAULT_WINDOW, build_context_vectors, extract_rules, load_stopwords
from .metrics import evaluate, format_keyvalue, format_table
from .ngram import DEFAULT_K, read_token_lines, train_lm
from .pipeline import (
    ABLATIONS, ConfigError, Models, PipelineConfig, ablation_name, format_result,
    read_config_file, simplify_lines,
)
from .splitter import build_sft

log = logging.getLogger("semsimp")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_pipeline_flags(p):
    p.add_argument("--config", help="flat key = value config file (flags win)")
    p.add_argument("--models", help="model directory (default: $SEMSIMP_MODELS)")
    p.add_argument("--sft")
    p.add_argument("--lm")
    p.add_argument("--rules")
    p.add_argument("--relprobs")
    p.add_argument("--stages", help="comma list from lex,split,delete")
    p.add_argument("--max-events", type=int)
    p.add_argument("--lm-normalize", choices=["none", "perword"])
    p.add_argument("--theta", type=float)
    p.add_argument("--fmin", type=int)
    p.add_argument("--kappa", type=float)
    p.add_argument("--min-deleted-tokens", type=int,
                   help="force at least N deleted tokens instead of one deleted relation")
    p.add_argument("--pronominalize", action="store_true", default=None,
                   help="replace long copied shared phrases by a pronoun")
    p.add_argument("--threads", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="semsimp", description="Unsupervised semantic sentence simplification")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    train = sub.add_parser("train", help="train a model file")
    tsub = train.add_subparsers(dest="model", parser_class=_Parser)

    t = tsub.add_parser("sft", help="split feature table from simple-corpus DRS graphs")
    t.add_argument("--drs", required=True)
    t.add_argument("-o", "--output", required=True)
    t.add_argument("--threads", type=int, default=1)

    t = tsub.add_parser("lm", help="n-gram language model from simple-corpus text")
    t.add_argument("--text", required=True)
    t.add_argument("-n", "--order", type=int, default=3)
    t.add_argument("-k", type=float, default=DEFAULT_K)
    t.add_argument("-o", "--output", required=True)
    t.add_argument("--threads", type=int, default=1)

    t = tsub.add_parser("rules", help="lexical simplification rules from two corpora")
    t.add_argument("--complex", required=True)
    t.add_argument("--simple", required=True)
    t.add_argument("--theta", type=float, default=0.1)
    t.add_argument("--fmin", type=int, default=10)
    t.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    t.add_argument("--stopwords", help="stopword file (default: bundled English list)")
    t.add_argument("-o", "--output", required=True)
    t.add_argument("--threads", type=int, default=1)

    t = tsub.add_parser("relprobs", help="relation and word probabilities for deletion")
    t.add_argument("--drs", required=True)
    t.add_argument("--text", required=True)
    t.add_argument("-o", "--output", required=True)
    t.add_argument("--threads", type=int, default=1)

    s = sub.add_parser("simplify", help="simplify DRS-JSON input")
    s.add_argument("input", nargs="?", help="DRS-JSON lines (default: stdin)")
    s.add_argument("-o", "--output")
    s.add_argument("--format", dest="output_format", choices=["text", "jsonl"])
    s.add_argument("--trace", action="store_true", help="dump S1/S2/S stages to stderr")
    _add_pipeline_flags(s)

    e = sub.add_parser("evaluate", help="automatic metrics against complex and simple references")
    e.add_argument("--system", help="system output, one item per line")
    e.add_argument("--complex", required=True)
    e.add_argument("--simple", required=True)
    e.add_argument("-o", "--output", help="report prefix: writes .txt, .tsv and .png")
    e.add_argument("--char-level", action="store_true")
    e.add_argument("--lowercase", action="store_true", help="compare case-insensitively")
    e.add_argument("--no-plot", action="store_true")
    e.add_argument("--ablation", action="store_true",
                   help="run every stage combination on --input and report each")
    e.add_argument("--input", help="DRS-JSON input for --ablation")
    _add_pipeline_flags(e)
    return parser


def _pipeline_config(args) -> PipelineConfig:
    values = read_config_file(args.config) if getattr(args, "config", None) else {}
    for key in ("sft", "lm", "rules", "relprobs", "stages", "max_events", "lm_normalize",
                "theta", "fmin", "kappa", "min_deleted_tokens", "pronominalize",
                "threads", "output_format"):
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    cfg = PipelineConfig.from_mapping(values, model_dir=getattr(args, "models", None))
    cfg.validate()
    return cfg


def _write(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _load_graphs(path, threads):
    return [lift_modifiers(preprocess(g)) for g in parse_drs_file(path, jobs=threads)]


def cmd_train(args) -> int:
    if args.model is None:
        raise UsageError("train needs one of: sft, lm, rules, relprobs")
    if args.model == "sft":
        sft = build_sft(_load_graphs(args.drs, args.threads))
        sft.save(args.output)
        print(f"sft: {len(sft.counts)} patterns over {sft.total} sentences -> {args.output}",
              file=sys.stderr)
    elif args.model == "lm":
        lm = train_lm(read_token_lines(args.text), args.order, args.k, jobs=args.threads)
        lm.save(args.output)
        print(f"lm: order {lm.n}, vocabulary {lm.vocab_size}, "
              f"{sum(lm.counts[0].values())} tokens -> {args.output}", file=sys.stderr)
    elif args.model == "rules":
        stop = load_stopwords(args.stopwords) if args.stopwords else None
        cv = build_context_vectors(read_token_lines(args.complex), args.window, args.fmin,
                                   stop, jobs=args.threads)
        sv = build_context_vectors(read_token_lines(args.simple), args.window, args.fmin,
                                   stop, jobs=args.threads)
        table = extract_rules(cv, sv, args.theta, args.fmin, stopwords=stop)
        table.save(args.output)
        print(f"rules: {len(table)} rules for {len(table.rules)} words -> {args.output}",
              file=sys.stderr)
    elif args.model == "relprobs":
        probs = train_rel_probs(_load_graphs(args.drs, args.threads), read_token_lines(args.text))
        probs.save(args.output)
        heads = len({h for _, h in probs.rel_probs})
        print(f"relprobs: {len(probs.rel_probs)} relation entries over {heads} heads, "
              f"{len(probs.word_probs)} words -> {args.output}", file=sys.stderr)
    return EXIT_OK


def _read_input(path):
    if path in (None, "-"):
        return sys.stdin.read().splitlines()
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


def cmd_simplify(args) -> int:
    cfg = _pipeline_config(args)
    models = Models.load(cfg)
    results = simplify_lines(_read_input(args.input), models, cfg)
    _write(args.output, "".join(format_result(r, cfg.output_format) + "\n" for r in results))
    if args.trace:
        for r in results:
            print(f"{r.sentence_id}\tS1\t{r.s1}", file=sys.stderr)
            print(f"{r.sentence_id}\tS2\t{' '.join(r.s2)}", file=sys.stderr)
            print(f"{r.sentence_id}\tS\t{r.text}", file=sys.stderr)
    failed = [r for r in results if r.error]
    for r in failed:
        print(f"error: {r.error}", file=sys.stderr)
    print(f"simplified {len(results) - len(failed)}/{len(results)} items"
          + (f", {len(failed)} passed through unchanged" if failed else ""), file=sys.stderr)
    return EXIT_OK


def _read_lines(path, lower=False):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return [line.split() for line in (text.lower() if lower else text).splitlines()]


def cmd_evaluate(args) -> int:
    if args.ablation and not args.input:
        raise UsageError("--ablation needs --input DRS-JSON")
    if not args.ablation and not args.system:
        raise UsageError("evaluate needs --system (or --ablation)")
    complex_ref = _read_lines(args.complex, args.lowercase)
    simple_ref = _read_lines(args.simple, args.lowercase)
    rows = []
    if args.ablation:
        base = _pipeline_config(argparse.Namespace(**{**vars(args), "stages": "lex,split,delete"}))
        models = Models.load(base)
        lines = _read_input(args.input)
        rows.append(("complex", evaluate(complex_ref, complex_ref, simple_ref, args.char_level)))
        for stages in ABLATIONS:
            base.stages = stages
            out = [(r.text.lower() if args.lowercase else r.text).split()
                   for r in simplify_lines(lines, models, base)]
            rows.append((ablation_name(stages), evaluate(out, complex_ref, simple_ref,
                                                         args.char_level)))
        rows.append(("GOLD", evaluate(simple_ref, complex_ref, simple_ref, args.char_level)))
    else:
        system = _read_lines(args.system, args.lowercase)
        rows.append(("system", evaluate(system, complex_ref, simple_ref, args.char_level)))
    table = format_table(rows)
    if args.output:
        _write(args.output + ".txt", table)
        _write(args.output + ".tsv", format_keyvalue(rows))
        if not args.no_plot:
            from .plotting import plot_report

            plot_report(rows, args.output + ".png")
    sys.stdout.write(table)
    return EXIT_OK


COMMANDS = {"train": cmd_train, "simplify": cmd_simplify, "evaluate": cmd_evaluate}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:          # --help, --version and usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"semsimp: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DRSFormatError, ValueError, OSError) as exc:
        print(f"semsimp: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
