"""Unsupervised sentence simplification over DRS-derived semantic graphs."""

__version__ = "0.1.0"

from .drs import (  # noqa: E402
    DRSFormatError, Edge, Node, Predicate, SemanticGraph, Token,
    events_of, lift_modifiers, parse_drs_file, parse_drs_lines, preprocess, realize,
)
from .ngram import NgramModel, train_lm  # noqa: E402
from .splitter import (  # noqa: E402
    SplitFeatureTable, block_closure, build_sft, choose_and_realize, enumerate_partitions,
    pattern_of, score_split,
)
from .lexsimp import (  # noqa: E402
    LexRule, LexRuleTable, build_context_vectors, extract_rules, score_substitution,
    simplify_lexical,
)
from .compressor import (  # noqa: E402
    DeletionProgram, RelProbTable, build_program, compress, solve, train_rel_probs,
)
from .metrics import EvalReport, bleu, evaluate, levenshtein  # noqa: E402

__all__ = [
    "DRSFormatError", "Edge", "Node", "Predicate", "SemanticGraph", "Token",
    "events_of", "lift_modifiers", "parse_drs_file", "parse_drs_lines", "preprocess", "realize",
    "NgramModel", "train_lm",
    "SplitFeatureTable", "block_closure", "build_sft", "choose_and_realize",
    "enumerate_partitions", "pattern_of", "score_split",
    "LexRule", "LexRuleTable", "build_context_vectors", "extract_rules", "score_substitution",
    "simplify_lexical",
    "DeletionProgram", "RelProbTable", "build_program", "compress", "solve", "train_rel_probs",
    "EvalReport", "bleu", "evaluate", "levenshtein",
]
