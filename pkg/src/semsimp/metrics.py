"""Automatic simplification metrics: edit distance, no-edit counts, BLEU, splits, lengths."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Sequence

TERMINATORS = frozenset({".", "!", "?"})


def levenshtein(a: Sequence, b: Sequence) -> int:
    """Unit-cost edit distance between two sequences (tokens or characters)."""
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def _ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidates: Sequence[Sequence[str]], references: Sequence[Sequence[str]],
         max_order: int = 4) -> float:
    """Corpus BLEU in percent, multi-bleu style (single reference per sentence).

    Clipped n-gram precisions are pooled over the corpus and combined by a
    geometric mean with a brevity penalty; any order with zero matches
    gives 0.  Orders for which the candidate corpus has no n-grams at all
    (every sentence shorter than n) are left out of the mean.
    """
    if len(candidates) != len(references):
        raise ValueError("candidate and reference corpora differ in length")
    if not candidates:
        raise ValueError("empty corpus")
    correct = [0] * max_order
    total = [0] * max_order
    c_len = r_len = 0
    for cand, ref in zip(candidates, references):
        c_len += len(cand)
        r_len += len(ref)
        for n in range(1, max_order + 1):
            cn = _ngrams(cand, n)
            rn = _ngrams(ref, n)
            total[n - 1] += sum(cn.values())
            correct[n - 1] += sum(min(c, rn[g]) for g, c in cn.items())
    if c_len == 0:
        return 100.0 if r_len == 0 else 0.0
    logs = []
    for n in range(max_order):
        if total[n] == 0:
            continue
        if correct[n] == 0:
            return 0.0
        logs.append(math.log(correct[n] / total[n]))
    bp = 1.0 if c_len > r_len else math.exp(1 - r_len / c_len)
    return 100.0 * bp * math.exp(sum(logs) / len(logs))


def count_sentences(tokens: Sequence[str]) -> int:
    return sum(1 for t in tokens if t in TERMINATORS)


def _is_word(t: str) -> bool:
    return any(ch.isalnum() for ch in t)


@dataclass
class EvalReport:
    sentences: int
    ld_complex_system: float
    noedit_complex_system: int
    noedit_complex_system_pct: float
    ld_system_simple: float
    noedit_system_simple: int
    noedit_system_simple_pct: float
    bleu_simple: float
    bleu_complex: float
    split_sentences: int
    avg_sentence_length: float
    avg_token_length: float

    def as_dict(self) -> dict:
        return asdict(self)


REPORT_COLUMNS = [
    ("ld_complex_system", "LD c>s", "{:.2f}"),
    ("noedit_complex_system", "NoEd c>s", "{:d}"),
    ("ld_system_simple", "LD s>g", "{:.2f}"),
    ("noedit_system_simple", "NoEd s>g", "{:d}"),
    ("bleu_complex", "BLEU cpx", "{:.2f}"),
    ("bleu_simple", "BLEU smp", "{:.2f}"),
    ("split_sentences", "Splits", "{:d}"),
    ("avg_sentence_length", "AvgSentLen", "{:.2f}"),
    ("avg_token_length", "AvgTokLen", "{:.2f}"),
]


def evaluate(system: Sequence[Sequence[str]], complex_ref: Sequence[Sequence[str]],
             simple_ref: Sequence[Sequence[str]], char_level: bool = False) -> EvalReport:
    """Score tokenized system output against aligned complex and simple corpora."""
    n = len(system)
    if not (n == len(complex_ref) == len(simple_ref)):
        raise ValueError(
            f"misaligned corpora: system={n} complex={len(complex_ref)} simple={len(simple_ref)}")
    if n == 0:
        raise ValueError("empty corpus")

    def dist(a, b):
        if char_level:
            return levenshtein(" ".join(a), " ".join(b))
        return levenshtein(a, b)

    ld_cs = [dist(c, s) for c, s in zip(complex_ref, system)]
    ld_sg = [dist(s, g) for s, g in zip(system, simple_ref)]
    noedit_cs = sum(1 for c, s in zip(complex_ref, system) if list(c) == list(s))
    noedit_sg = sum(1 for s, g in zip(system, simple_ref) if list(s) == list(g))
    splits = sum(1 for s in system if count_sentences(s) >= 2)
    words = [t for s in system for t in s if _is_word(t)]
    sent_len = sum(sum(1 for t in s if _is_word(t)) for s in system) / n
    tok_len = sum(len(t) for t in words) / len(words) if words else 0.0
    return EvalReport(
        sentences=n,
        ld_complex_system=sum(ld_cs) / n,
        noedit_complex_system=noedit_cs,
        noedit_complex_system_pct=100.0 * noedit_cs / n,
        ld_system_simple=sum(ld_sg) / n,
        noedit_system_simple=noedit_sg,
        noedit_system_simple_pct=100.0 * noedit_sg / n,
        bleu_simple=bleu(system, simple_ref),
        bleu_complex=bleu(system, complex_ref),
        split_sentences=splits,
        avg_sentence_length=sent_len,
        avg_token_length=tok_len,
    )


def format_table(rows: Sequence[tuple]) -> str:
    """Aligned plain-text table of ``(name, EvalReport)`` rows."""
    header = ["System"] + [h for _, h, _ in REPORT_COLUMNS]
    body = []
    for name, rep in rows:
        d = rep.as_dict()
        body.append([name] + [fmt.format(d[k]) for k, _, fmt in REPORT_COLUMNS])
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    lines = []
    for r in [header] + body:
        cells = [r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
        lines.append("  ".join(cells).rstrip())
    lines.insert(1, "-" * len(lines[0]))
    return "\n".join(lines) + "\n"


def format_keyvalue(rows: Sequence[tuple]) -> str:
    """``<row>.<field>\\t<value>`` lines, one per report field."""
    out = []
    for name, rep in rows:
        for k, v in rep.as_dict().items():
            val = f"{v:.6f}" if isinstance(v, float) else str(v)
            out.append(f"{name}.{k}\t{val}")
    return "\n".join(out) + "\n"
