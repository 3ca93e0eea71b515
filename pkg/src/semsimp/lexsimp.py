"""Context-aware lexical simplification.

Rules ``C -> S`` are mined from two unaligned corpora: a complex word ``C``
may be replaced by a simple word ``S`` when the context vector of ``C`` in
the complex corpus is close (cosine) to that of ``S`` in the simple
corpus and ``C`` is the more complex of the two.  Applying rules to a
sentence is a dynamic program over token positions.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from typing import Iterable, Mapping, Sequence

DEFAULT_WINDOW = 10
DEFAULT_THETA = 0.1
DEFAULT_FMIN = 10
DEFAULT_KAPPA = 0.05


def load_stopwords(path=None) -> frozenset:
    if path is None:
        text = resources.files("semsimp").joinpath("data/stopwords.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return frozenset(w.strip().lower() for w in text.split() if w.strip())


STOPWORDS = load_stopwords()


def is_content(token: str, stopwords) -> bool:
    return token not in stopwords and any(ch.isalnum() for ch in token)


def cosine(u: Mapping[str, float], v: Mapping[str, float]) -> float:
    if not u or not v:
        return 0.0
    if len(u) > len(v):
        u, v = v, u
    dot = sum(c * v.get(w, 0) for w, c in u.items())
    if not dot:
        return 0.0
    nu = math.sqrt(sum(c * c for c in u.values()))
    nv = math.sqrt(sum(c * c for c in v.values()))
    return min(1.0, dot / (nu * nv))


# ---------------------------------------------------------------------------
# corpus statistics


@dataclass
class CorpusVectors:
    """Context vectors of the frequent content words of one corpus."""

    vectors: dict
    freq: Counter
    window: int = DEFAULT_WINDOW
    f_min: int = DEFAULT_FMIN

    def __getitem__(self, word):
        return self.vectors[word]

    def __contains__(self, word):
        return word in self.vectors

    def __len__(self):
        return len(self.vectors)


def _count_chunk(sentences, window, stopwords):
    freq = Counter()
    ctx = {}
    for sent in sentences:
        toks = [t.lower() for t in sent]
        content = [is_content(t, stopwords) for t in toks]
        for i, t in enumerate(toks):
            if not content[i]:
                continue
            freq[t] += 1
            vec = ctx.get(t)
            if vec is None:
                vec = ctx[t] = Counter()
            for j in range(max(0, i - window), min(len(toks), i + window + 1)):
                if j != i and content[j]:
                    vec[toks[j]] += 1
    return freq, ctx


def build_context_vectors(sentences: Iterable[Sequence[str]], window: int = DEFAULT_WINDOW,
                          f_min: int = DEFAULT_FMIN, stopwords=None, jobs: int = 1) -> CorpusVectors:
    """Windowed co-occurrence counts for every content word seen ``f_min`` times."""
    stopwords = STOPWORDS if stopwords is None else frozenset(stopwords)
    sentences = [list(s) for s in sentences]
    if not any(sentences):
        raise ValueError("empty corpus")
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        size = max(1, len(sentences) // jobs + 1)
        chunks = [sentences[i:i + size] for i in range(0, len(sentences), size)]
        with ThreadPoolExecutor(jobs) as pool:
            parts = list(pool.map(lambda c: _count_chunk(c, window, stopwords), chunks))
    else:
        parts = [_count_chunk(sentences, window, stopwords)]
    freq, ctx = Counter(), {}
    for f, c in parts:
        freq.update(f)
        for w, vec in c.items():
            ctx.setdefault(w, Counter()).update(vec)
    vectors = {w: ctx[w] for w in sorted(ctx) if freq[w] >= f_min and ctx[w]}
    return CorpusVectors(vectors, freq, window, f_min)


def complexity(word: str, complex_freq: Mapping, simple_freq: Mapping) -> float:
    """Frequency ratio (complex corpus over simple corpus) times word length."""
    fs = simple_freq.get(word, 0)
    fc = complex_freq.get(word, 0)
    if fs == 0:
        return math.inf
    return fc / fs * len(word)


# ---------------------------------------------------------------------------
# rules


@dataclass(frozen=True)
class LexRule:
    complex: tuple
    simple: tuple
    similarity: float
    gain: float

    @property
    def complex_word(self) -> str:
        return " ".join(self.complex)

    @property
    def simple_word(self) -> str:
        return " ".join(self.simple)


@dataclass
class LexRuleTable:
    rules: dict                       # complex token tuple -> [LexRule]
    simple_vectors: dict = field(default_factory=dict)
    stopwords: frozenset = STOPWORDS
    window: int = DEFAULT_WINDOW
    theta: float = DEFAULT_THETA
    f_min: int = DEFAULT_FMIN

    def __post_init__(self):
        for key in list(self.rules):
            self.rules[key] = sorted(self.rules[key], key=lambda r: (-r.similarity, r.simple))
        self._max_len = max((len(k) for k in self.rules), default=0)

    def __len__(self):
        return sum(len(v) for v in self.rules.values())

    def __iter__(self):
        for key in sorted(self.rules):
            yield from self.rules[key]

    def lookup(self, word) -> list:
        key = tuple(word.lower().split()) if isinstance(word, str) else tuple(w.lower() for w in word)
        return list(self.rules.get(key, ()))

    def matches(self, tokens: Sequence[str], start: int) -> list:
        """Rules whose complex side matches at ``start``, longest keys first."""
        low = [t.lower() for t in tokens]
        out = []
        for n in range(min(self._max_len, len(low) - start), 0, -1):
            out.extend(self.rules.get(tuple(low[start:start + n]), ()))
        return out

    def simple_vector(self, rule: LexRule) -> Counter:
        vec = self.simple_vectors.get(rule.simple_word)
        if vec is not None:
            return vec
        # multiword simple side: sum of its words' vectors
        out = Counter()
        for w in rule.simple:
            out.update(self.simple_vectors.get(w, {}))
        return out

    def local_context(self, tokens: Sequence[str], start: int, length: int = 1) -> Counter:
        lo = max(0, start - self.window)
        hi = min(len(tokens), start + length + self.window)
        ctx = Counter()
        for j in range(lo, hi):
            if start <= j < start + length:
                continue
            t = tokens[j].lower()
            if is_content(t, self.stopwords):
                ctx[t] += 1
        return ctx

    # -- persistence -------------------------------------------------------

    def dumps(self) -> str:
        return "".join(
            f"{r.complex_word}\t{r.simple_word}\t{r.similarity:.6f}\t{r.gain:.6f}\n" for r in self)

    def dumps_vectors(self) -> str:
        lines = []
        for w in sorted(self.simple_vectors):
            vec = self.simple_vectors[w]
            lines.append(w + "\t" + " ".join(f"{c}:{vec[c]}" for c in sorted(vec)))
        return "".join(line + "\n" for line in lines)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.dumps())
        with open(vectors_path(path), "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.dumps_vectors())

    @classmethod
    def loads(cls, text: str, vectors_text: str = "", **kwargs) -> "LexRuleTable":
        rules = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ValueError(f"line {lineno}: expected 4 tab-separated fields")
            c, s, sim, gain = parts
            rule = LexRule(tuple(c.split()), tuple(s.split()), float(sim), float(gain))
            rules.setdefault(rule.complex, []).append(rule)
        vectors = {}
        for lineno, line in enumerate(vectors_text.splitlines(), 1):
            if not line.strip():
                continue
            word, _, rest = line.partition("\t")
            vec = Counter()
            for item in rest.split():
                ctx, _, c = item.rpartition(":")
                vec[ctx] = int(c)
            vectors[word] = vec
        return cls(rules, vectors, **kwargs)

    @classmethod
    def load(cls, path, **kwargs) -> "LexRuleTable":
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
        try:
            with open(vectors_path(path), encoding="utf-8") as fh:
                vtext = fh.read()
        except FileNotFoundError:
            vtext = ""
        return cls.loads(text, vtext, **kwargs)


def vectors_path(path) -> str:
    return f"{path}.ctx"


def extract_rules(complex_vectors: CorpusVectors, simple_vectors: CorpusVectors,
                  theta: float = DEFAULT_THETA, f_min: int = DEFAULT_FMIN,
                  stopwords=None) -> LexRuleTable:
    """Pair complex-corpus words with simpler simple-corpus words of similar context."""
    cfreq, sfreq = complex_vectors.freq, simple_vectors.freq
    cands = {w: v for w, v in complex_vectors.vectors.items() if cfreq[w] >= f_min}
    simple = {w: v for w, v in simple_vectors.vectors.items() if sfreq[w] >= f_min}

    # inverted index: only pairs sharing a context word can reach theta > 0
    index = {}
    for w, vec in simple.items():
        for ctx in vec:
            index.setdefault(ctx, []).append(w)

    rules = {}
    used = set()
    for c in sorted(cands):
        cvec = cands[c]
        pool = set()
        for ctx in cvec:
            pool.update(index.get(ctx, ()))
        comp_c = complexity(c, cfreq, sfreq)
        for s in sorted(pool):
            if s == c:
                continue
            sim = cosine(cvec, simple[s])
            if sim < theta or (theta <= 0 and sim <= 0):
                continue
            comp_s = complexity(s, cfreq, sfreq)
            if not comp_c > comp_s:
                continue
            gain = math.inf if comp_s == 0 else comp_c / comp_s
            rules.setdefault((c,), []).append(LexRule((c,), (s,), sim, gain))
            used.add(s)
    kw = {} if stopwords is None else {"stopwords": frozenset(stopwords)}
    return LexRuleTable(rules, {w: simple[w] for w in sorted(used)},
                        window=simple_vectors.window, theta=theta, f_min=f_min, **kw)


def score_substitution(rule: LexRule, sentence: Sequence[str], position: int,
                       table: LexRuleTable) -> float:
    """Adequacy in context: cosine of the simple word's vector with the local window."""
    local = table.local_context(sentence, position, len(rule.complex))
    return cosine(table.simple_vector(rule), local) * rule.similarity


# ---------------------------------------------------------------------------
# application


@dataclass(frozen=True)
class Substitution:
    start: int
    length: int
    rule: LexRule
    score: float

    @property
    def end(self) -> int:
        """Last position covered."""
        return self.start + self.length - 1


def candidate_substitutions(tokens: Sequence[str], table: LexRuleTable) -> list:
    out = []
    for i in range(len(tokens)):
        for rule in table.matches(tokens, i):
            out.append(Substitution(i, len(rule.complex), rule,
                                    score_substitution(rule, tokens, i, table)))
    return out


def _depends(b: Substitution, a: Substitution, tokens, table) -> bool:
    """True if b's score used a context word that substitution a rewrites."""
    support = table.simple_vector(b.rule)
    lo, hi = b.start - table.window, b.end + table.window
    for p in range(a.start, a.end + 1):
        if lo <= p <= hi and not b.start <= p <= b.end and support.get(tokens[p].lower()):
            return True
    return False


def conflicts(a: Substitution, b: Substitution, tokens, table) -> bool:
    if a.start <= b.end and b.start <= a.end:
        return True
    return _depends(a, b, tokens, table) or _depends(b, a, tokens, table)


def best_substitutions(tokens: Sequence[str], table: LexRuleTable,
                       kappa: float = DEFAULT_KAPPA) -> tuple:
    """Maximize the summed score of substitutions plus ``kappa`` per kept token.

    Left-to-right DP; the state is the set of earlier substitutions close
    enough to interact with one starting at the current position.  Returns
    ``(total, substitutions)``.
    """
    n = len(tokens)
    # keeping the tokens is worth kappa each and never conflicts, so a
    # substitution scoring no more than that can be left out without loss
    cands = [s for s in candidate_substitutions(tokens, table) if s.score > kappa * s.length]
    by_start = {}
    for idx, s in enumerate(cands):
        by_start.setdefault(s.start, []).append(idx)
    clash = {}
    for i, a in enumerate(cands):
        for j in range(i + 1, len(cands)):
            b = cands[j]
            if abs(a.start - b.start) <= table.window + max(a.length, b.length) and \
                    conflicts(a, b, tokens, table):
                clash.setdefault(i, set()).add(j)
                clash.setdefault(j, set()).add(i)
    # a chosen substitution matters to later decisions only until the last
    # start position of anything it clashes with
    last_clash = [max((cands[j].start for j in clash.get(i, ())), default=-1)
                  for i in range(len(cands))]
    memo = {}

    def solve(pos, frontier):
        if pos >= n:
            return 0.0, ()
        key = (pos, frontier)
        hit = memo.get(key)
        if hit is not None:
            return hit
        nxt = tuple(i for i in frontier if last_clash[i] >= pos + 1)
        val, rest = solve(pos + 1, nxt)
        best = (kappa + val, rest)
        for idx in by_start.get(pos, ()):
            s = cands[idx]
            if any(i in clash.get(idx, ()) for i in frontier):
                continue
            after = pos + s.length
            nf = tuple(sorted(i for i in frontier + (idx,) if last_clash[i] >= after))
            val, rest = solve(after, nf)
            if s.score + val > best[0]:
                best = (s.score + val, (idx,) + rest)
        memo[key] = best
        return best

    total, chosen = solve(0, ())
    return total, [cands[i] for i in chosen]


def apply_substitutions(tokens: Sequence[str], subs: Sequence[Substitution]) -> list:
    out = list(tokens)
    for s in sorted(subs, key=lambda s: s.start, reverse=True):
        repl = list(s.rule.simple)
        if out[s.start][:1].isupper():
            repl[0] = repl[0][:1].upper() + repl[0][1:]
        out[s.start:s.start + s.length] = repl
    return out


def simplify_lexical(sentence: Sequence[str], table: LexRuleTable,
                     kappa: float = DEFAULT_KAPPA) -> list:
    _, subs = best_substitutions(sentence, table, kappa)
    return apply_substitutions(sentence, subs)
