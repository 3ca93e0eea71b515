"""Add-k smoothed n-gram language model with backoff to shorter histories.

For a history ``h`` seen in training::

    P(w | h) = (c(h, w) + k) / (c(h) + k * |V|)

where ``V`` is the training vocabulary plus ``</s>`` and ``<unk>``.  An
unseen history backs off (with weight 1) to ``h`` minus its oldest word,
down to the add-k unigram distribution.  Every level is a proper
distribution over ``V``, so every conditional sums to one.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"
DEFAULT_K = 0.01


def normalize_tokens(tokens: Iterable[str]) -> list:
    return [t.lower() for t in tokens]


def count_ngrams(sentences: Iterable[Sequence[str]], n: int) -> list:
    """Per-order n-gram counts; ``counts[k-1]`` holds k-grams."""
    counts = [Counter() for _ in range(n)]
    for sent in sentences:
        toks = [BOS] * (n - 1) + normalize_tokens(sent) + [EOS]
        for i in range(n - 1, len(toks)):
            for k in range(1, n + 1):
                counts[k - 1][tuple(toks[i - k + 1:i + 1])] += 1
    return counts


def merge_counts(parts: Iterable[list]) -> list:
    parts = list(parts)
    out = [Counter() for _ in range(len(parts[0]))]
    for part in parts:
        for acc, c in zip(out, part):
            acc.update(c)
    return out


@dataclass
class NgramModel:
    n: int
    counts: list
    k: float = DEFAULT_K
    vocab: frozenset = field(init=False)
    _hist: list = field(init=False, repr=False)

    def __post_init__(self):
        words = {g[0] for g in self.counts[0]}
        words.discard(BOS)
        self.vocab = frozenset(words | {EOS, UNK})
        self._hist = [Counter() for _ in range(self.n)]
        for order in range(1, self.n + 1):
            for gram, c in self.counts[order - 1].items():
                self._hist[order - 1][gram[:-1]] += c

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def prob(self, word: str, history: Sequence[str] = ()) -> float:
        """P(word | history); history is truncated to the last n-1 tokens."""
        word = word.lower() if word not in (EOS, UNK) else word
        if word not in self.vocab:
            word = UNK
        hist = tuple(w if w in self.vocab or w == BOS else UNK
                     for w in normalize_tokens_keep_markers(history))
        hist = hist[len(hist) - (self.n - 1):] if self.n > 1 else ()
        while True:
            order = len(hist) + 1
            denom = self._hist[order - 1].get(hist, 0)
            if denom > 0 or not hist:
                c = self.counts[order - 1].get(hist + (word,), 0)
                return (c + self.k) / (denom + self.k * self.vocab_size)
            hist = hist[1:]

    def sentence_logprob(self, tokens: Sequence[str]) -> float:
        """Natural-log probability of a sentence including the end marker."""
        toks = [BOS] * (self.n - 1) + normalize_tokens(tokens) + [EOS]
        total = 0.0
        for i in range(self.n - 1, len(toks)):
            total += math.log(self.prob(toks[i], toks[i - self.n + 1:i]))
        return total

    # -- persistence -------------------------------------------------------

    def dumps(self) -> str:
        lines = [f"#n={self.n}", f"#k={self.k!r}"]
        for order in range(1, self.n + 1):
            lines.append(f"ORDER {order}")
            for gram in sorted(self.counts[order - 1]):
                lines.append(f"{' '.join(gram)}\t{self.counts[order - 1][gram]}")
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "NgramModel":
        n, k = None, DEFAULT_K
        counts = {}
        order = None
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line:
                continue
            if line.startswith("#n="):
                n = int(line[3:])
            elif line.startswith("#k="):
                k = float(line[3:])
            elif line.startswith("ORDER "):
                order = int(line[6:])
                counts[order] = Counter()
            else:
                if order is None or "\t" not in line:
                    raise ValueError(f"line {lineno}: malformed n-gram count line")
                gram, c = line.rsplit("\t", 1)
                grams = tuple(gram.split(" "))
                if len(grams) != order:
                    raise ValueError(f"line {lineno}: expected {order}-gram")
                counts[order][grams] = int(c)
        if n is None:
            n = max(counts) if counts else 0
        if n < 1 or sorted(counts) != list(range(1, n + 1)):
            raise ValueError("model file must contain ORDER 1..n sections")
        return cls(n, [counts[i] for i in range(1, n + 1)], k)

    @classmethod
    def load(cls, path) -> "NgramModel":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


def normalize_tokens_keep_markers(tokens: Iterable[str]) -> list:
    return [t if t in (BOS, EOS, UNK) else t.lower() for t in tokens]


def train_lm(sentences: Iterable[Sequence[str]], n: int = 3, k: float = DEFAULT_K,
             jobs: int = 1) -> NgramModel:
    """Count n-grams over tokenized sentences (one list of tokens each)."""
    if not 1 <= n <= 5:
        raise ValueError("n must be between 1 and 5")
    sentences = [list(s) for s in sentences]
    if not sentences:
        raise ValueError("empty corpus")
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        size = max(1, len(sentences) // jobs + 1)
        chunks = [sentences[i:i + size] for i in range(0, len(sentences), size)]
        with ThreadPoolExecutor(jobs) as pool:
            counts = merge_counts(pool.map(lambda c: count_ngrams(c, n), chunks))
    else:
        counts = count_ngrams(sentences, n)
    return NgramModel(n, counts, k)


def read_token_lines(path) -> list:
    with open(path, encoding="utf-8") as fh:
        return [line.split() for line in fh if line.strip()]
