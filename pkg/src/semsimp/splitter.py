"""Semantic sentence splitting.

Candidate splits group the events of a sentence into blocks (every set
partition of the events).  Each block becomes one sentence made of the
nodes reachable from its events; nodes reachable from several blocks are
shared and their noun phrase is copied to the front of later sentences.
Candidates are ranked by

    P_split = 1/n * sum_i  L/(L + |L - L_i|) * lm_i * sft_i,   L = L_S / n

with ``L_i`` the word count of sentence i, ``lm_i`` its language model
score and ``sft_i`` the probability of its pattern of thematic role sets.
"""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .drs import (
    EVENT, MODIFIER_LABEL, NN_OF_LABEL, ORPHAN, ORPHAN_LABEL,
    Edge, Node, Predicate, SemanticGraph, Token,
    _fresh_var, _nearest_anchor, events_of, head_predicate, subset_positions,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_EVENTS = 8
BACKOFF_SCALE = 0.1
SFT_FLOOR = 1e-9
PRONOUN_MIN_TOKENS = 5
EXCLUDED_ROLES = frozenset({ORPHAN_LABEL, MODIFIER_LABEL})
NP_LABELS = frozenset({NN_OF_LABEL, MODIFIER_LABEL})


class TooManyEvents(ValueError):
    """Raised when a sentence has more events than the splitter will enumerate."""


def is_word(token: str) -> bool:
    return any(ch.isalnum() for ch in token)


def word_count(tokens: Iterable[str]) -> int:
    return sum(1 for t in tokens if is_word(t))


# ---------------------------------------------------------------------------
# semantic patterns


def roleset_key(labels: Iterable[str]) -> tuple:
    return tuple(sorted(labels))


def pattern_of(g: SemanticGraph, events: Sequence[str]) -> tuple:
    """Sequence of role multisets, one per event, in the order given."""
    out = []
    for var in events:
        out.append(roleset_key(e.label for e in g.children[var]
                               if e.label not in EXCLUDED_ROLES))
    return tuple(out)


def serialize_pattern(pattern: Sequence[Sequence[str]]) -> str:
    return "|".join("+".join(rs) for rs in pattern)


def parse_pattern(text: str) -> tuple:
    return tuple(roleset_key(r for r in part.split("+") if r) for part in text.split("|"))


@dataclass
class SplitFeatureTable:
    counts: Counter
    floor: float = SFT_FLOOR
    total: int = field(init=False)
    _roleset_probs: dict = field(init=False, repr=False)

    def __post_init__(self):
        self.counts = Counter({tuple(p): c for p, c in self.counts.items() if c > 0})
        self.total = sum(self.counts.values())
        if self.total <= 0:
            raise ValueError("split feature table needs at least one counted pattern")
        # role set unigram statistics for unseen patterns, derived from the pattern counts
        rs = Counter()
        for pattern, c in self.counts.items():
            for roleset in pattern:
                rs[roleset] += c
        n = sum(rs.values())
        self._roleset_probs = {r: c / n for r, c in rs.items()}

    def probability(self, pattern: Sequence[Sequence[str]]) -> float:
        pattern = tuple(roleset_key(r) for r in pattern)
        c = self.counts.get(pattern)
        if c:
            return c / self.total
        backoff = BACKOFF_SCALE
        for roleset in pattern:
            backoff *= self._roleset_probs.get(roleset, 0.0)
        return max(self.floor, backoff)

    def dumps(self) -> str:
        rows = sorted((serialize_pattern(p), c) for p, c in self.counts.items())
        return f"#total={self.total}\n" + "".join(f"{p}\t{c}\n" for p, c in rows)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "SplitFeatureTable":
        counts = Counter()
        declared = None
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line:
                continue
            if line.startswith("#total="):
                declared = int(line[len("#total="):])
                continue
            if "\t" not in line:
                raise ValueError(f"line {lineno}: expected '<pattern>\\t<count>'")
            pat, c = line.rsplit("\t", 1)
            counts[parse_pattern(pat)] += int(c)
        sft = cls(counts)
        if declared is not None and declared != sft.total:
            raise ValueError(f"#total={declared} but counts sum to {sft.total}")
        return sft

    @classmethod
    def load(cls, path) -> "SplitFeatureTable":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


def build_sft(corpus: Iterable[SemanticGraph]) -> SplitFeatureTable:
    """Count the pattern of every sentence with at least one event."""
    counts = Counter()
    for g in corpus:
        try:
            events = events_of(g)
        except ValueError as exc:
            log.warning("skipping %s", exc)
            continue
        if events:
            counts[pattern_of(g, events)] += 1
    if not counts:
        raise ValueError("no sentence with events in the corpus")
    return SplitFeatureTable(counts)


# ---------------------------------------------------------------------------
# candidate enumeration


def set_partitions(items: Sequence) -> list:
    """All set partitions of ``items``, blocks keep the input order."""
    items = list(items)
    if not items:
        return [[]]
    out = []

    def rec(i, blocks):
        if i == len(items):
            out.append([list(b) for b in blocks])
            return
        for b in blocks:
            b.append(items[i])
            rec(i + 1, blocks)
            b.pop()
        blocks.append([items[i]])
        rec(i + 1, blocks)
        blocks.pop()

    rec(0, [])
    return out


def enumerate_partitions(events: Sequence[str], max_events: int = DEFAULT_MAX_EVENTS) -> list:
    """Every grouping of the events into non-empty blocks (Bell(|events|) of them)."""
    if not events:
        raise ValueError("no events to partition")
    if len(events) > max_events:
        raise TooManyEvents(
            f"{len(events)} events exceed max_events={max_events}; keep the sentence unsplit")
    return [tuple(tuple(b) for b in p) for p in set_partitions(events)]


def block_closure(g: SemanticGraph, block: Iterable[str], stop: Iterable[str] = ()) -> set:
    """Nodes reachable from the block's events without entering ``stop`` nodes.

    ``stop`` normally holds the events of the other blocks.
    """
    block = set(block)
    stop = set(stop) - block
    seen = set(block)
    todo = list(block)
    while todo:
        var = todo.pop()
        for e in g.children[var]:
            if e.dep in seen or e.dep in stop:
                continue
            seen.add(e.dep)
            todo.append(e.dep)
    return seen


# ---------------------------------------------------------------------------
# split realization


@dataclass
class Block:
    events: tuple
    closure: frozenset
    lead: tuple          # positions copied from shared material, emitted first
    own: tuple           # positions this sentence realizes for the first time
    dropped: tuple       # boundary orphans removed from this sentence
    tokens: tuple
    graph: SemanticGraph

    @property
    def length(self) -> int:
        return word_count(self.tokens)


def _event_position(g: SemanticGraph, var: str) -> int:
    pred = head_predicate(g.nodes[var])
    return min(pred.positions) if pred and pred.positions else -1


def _np_subtree(g: SemanticGraph, root: str) -> set:
    out = {root}
    todo = [root]
    while todo:
        var = todo.pop()
        for e in g.children[var]:
            if e.label in NP_LABELS and e.dep not in out:
                out.add(e.dep)
                todo.append(e.dep)
    return out


def _orphan_like(g: SemanticGraph) -> set:
    """Positions that may be dropped at a split boundary."""
    out = set()
    for node in g.nodes.values():
        if node.kind == ORPHAN:
            out |= node.positions
    return out


def realize_split(g: SemanticGraph, partition: Sequence[Sequence[str]],
                  pronominalize: bool = False) -> list:
    """Turn a partition of the events into one :class:`Block` per sentence.

    Blocks come back ordered by their first event.  A one-block partition
    realizes the whole sentence untouched.
    """
    blocks = sorted((tuple(sorted(b, key=lambda v: _event_position(g, v))) for b in partition),
                    key=lambda b: _event_position(g, b[0]))
    if len(blocks) == 1:
        all_pos = tuple(sorted(t.index for t in g.tokens))
        return [Block(blocks[0], frozenset(g.nodes), (), all_pos, (),
                      tuple(t.surface for t in g.tokens), g)]

    all_events = {v for b in blocks for v in b}
    closures = [block_closure(g, b, all_events - set(b)) for b in blocks]
    _adopt_unreached(g, closures)

    owned, taken = [], set()
    for c in closures:
        owned.append(c - taken)
        taken |= c

    # relation words go with the block owning the relation head; when the
    # dependent lies outside that block (an event-to-event connective) they
    # may be dropped at the boundary like orphans
    owner_of = {v: i for i, own in enumerate(owned) for v in own}
    block_pos = [set() for _ in blocks]
    connector = set()
    for i, own in enumerate(owned):
        for var in own:
            block_pos[i] |= g.nodes[var].positions
    for e in g.edges:
        if not e.positions:
            continue
        i = owner_of[e.head]
        block_pos[i] |= e.positions
        if e.dep not in closures[i]:
            connector |= e.positions
    orphan_pos = _orphan_like(g) | connector

    position_block = {}
    for i, pos in enumerate(block_pos):
        for p in pos:
            position_block.setdefault(p, i)
    n_tokens = max((t.index for t in g.tokens), default=-1) + 1

    out = []
    for i, b in enumerate(blocks):
        own_pos = block_pos[i]
        dropped = set()
        for p in own_pos & orphan_pos:
            q = p + 1
            while q < n_tokens and q in orphan_pos:
                q += 1
            if q >= n_tokens or position_block.get(q) != i:
                dropped.add(p)
        own_sorted = tuple(sorted(own_pos - dropped))

        lead_nodes = set()
        if i > 0:
            roots = sorted({e.dep for v in owned[i] for e in g.children[v]
                            if e.dep not in owned[i] and e.dep in closures[i]
                            and g.nodes[e.dep].kind != ORPHAN},
                           key=lambda v: min(g.nodes[v].positions, default=-1))
            for r in roots:
                lead_nodes |= _np_subtree(g, r)
        lead_sorted = tuple(sorted(subset_positions(g, lead_nodes)))
        # lead words that are orphans (e.g. "which") never belong to a copy
        lead_sorted = tuple(p for p in lead_sorted if p not in orphan_pos)

        out.append(_make_block(g, b, closures[i], owned[i], lead_nodes, lead_sorted,
                               own_sorted, tuple(sorted(dropped)), pronominalize))
    return out


def _adopt_unreached(g: SemanticGraph, closures: list) -> None:
    """Give nodes no event reaches to the block of the nearest reached position."""
    reached = set().union(*closures)
    unreached = [v for v in g.nodes if v not in reached]
    if not unreached:
        return
    pos_block = {}
    for i, c in enumerate(closures):
        for p in subset_positions(g, c):
            pos_block.setdefault(p, i)
    anchors = sorted(pos_block)
    for var in unreached:
        positions = g.nodes[var].positions
        target = 0
        if positions and anchors:
            p0 = min(positions)
            target = pos_block[min(anchors, key=lambda a: (abs(a - p0), a > p0))]
        closures[target].add(var)


def _make_block(g, events, closure, owned, lead_nodes, lead_pos, own_pos, dropped,
                pronominalize) -> Block:
    if pronominalize and len(lead_pos) >= PRONOUN_MIN_TOKENS:
        # replace the copied phrase by a pronoun anchored on its root node
        root_pos = lead_pos[-1]
        seq = [("pron", root_pos)] + [("tok", p) for p in own_pos]
    else:
        seq = [("tok", p) for p in lead_pos] + [("tok", p) for p in own_pos]
    surfaces = ["it" if kind == "pron" else g.surface[p] for kind, p in seq]
    if surfaces:
        surfaces[0] = surfaces[0][:1].upper() + surfaces[0][1:]
    graph = _block_graph(g, owned | lead_nodes, seq, surfaces)
    return Block(tuple(events), frozenset(closure), lead_pos, own_pos, dropped,
                 tuple(surfaces), graph)


def _block_graph(g: SemanticGraph, nodes: set, seq, surfaces) -> SemanticGraph:
    """Re-index the material of one sentence into a standalone graph."""
    new_index = {}
    pron_root = None
    for i, (kind, p) in enumerate(seq):
        if kind == "pron":
            pron_root = p
        new_index.setdefault(p, i)
    tokens = [Token(i, s) for i, s in enumerate(surfaces)]

    keep = {}
    for var in nodes:
        node = g.nodes[var]
        preds = []
        for pred in node.preds:
            if pron_root is not None and pron_root in pred.positions:
                preds.append(Predicate("it", frozenset([new_index[pron_root]]), pred.origin))
                continue
            pos = frozenset(new_index[p] for p in pred.positions if p in new_index)
            if pos:
                preds.append(Predicate(pred.lemma, pos, pred.origin))
        if preds or node.kind == EVENT:
            keep[var] = Node(var, node.kind, tuple(preds))
        elif node.kind != ORPHAN and not node.positions:
            keep[var] = node
    edges = []
    for e in g.edges:
        if e.head in keep and e.dep in keep:
            pos = frozenset(new_index[p] for p in e.positions if p in new_index)
            edges.append(Edge(e.head, e.dep, e.label, pos))

    covered = set()
    for node in keep.values():
        covered |= node.positions
    for e in edges:
        covered |= e.positions
    # realized tokens without a surviving owner (connectives) become orphans
    owner = {}
    for var, node in keep.items():
        for p in node.positions:
            owner[p] = var
    for e in edges:
        for p in e.positions:
            owner.setdefault(p, e.dep)
    anchors = sorted(owner)
    taken = set(keep)
    for t in tokens:
        if t.index in covered:
            continue
        var = _fresh_var("O", taken)
        taken.add(var)
        keep[var] = Node(var, ORPHAN, (Predicate(t.surface, frozenset([t.index]), ORPHAN),))
        target = _nearest_anchor(anchors, t.index)
        if target is not None:
            edges.append(Edge(owner[target], var, ORPHAN_LABEL))
    return SemanticGraph(g.sentence_id, tokens, keep, edges)


# ---------------------------------------------------------------------------
# scoring


@dataclass
class SplitCandidate:
    blocks: tuple            # blocks of event vars, in sentence order
    lengths: tuple           # L_i
    lm_scores: tuple         # lm_i
    sft_scores: tuple        # sft_i
    score: float
    realized: list = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.blocks)


def lm_score(lm, tokens: Sequence[str], normalize: str = "perword") -> float:
    """Language model factor for one output sentence.

    ``perword`` returns the per-word geometric mean probability,
    ``none`` the raw sentence probability.
    """
    logp = lm.sentence_logprob(list(tokens))
    if normalize == "none":
        return math.exp(logp)
    if normalize != "perword":
        raise ValueError(f"unknown lm normalization {normalize!r}")
    n = word_count(tokens)
    return math.exp(logp / n) if n else 0.0


def sentence_tokens(block: Block) -> list:
    """Tokens of the sentence a block produces, closed by a period."""
    toks = list(block.tokens)
    while toks and not is_word(toks[-1]):
        toks.pop()
    return toks + ["."]


def score_split(g: SemanticGraph, partition, lm, sft, normalize: str = "perword",
                pronominalize: bool = False) -> SplitCandidate:
    blocks = realize_split(g, partition, pronominalize)
    n = len(blocks)
    total_len = word_count(t.surface for t in g.tokens)
    l_split = total_len / n
    lengths, lms, sfts, terms = [], [], [], []
    for b in blocks:
        toks = list(b.tokens) if n == 1 else sentence_tokens(b)
        L = b.length
        lm_i = lm_score(lm, toks, normalize) if L else 0.0
        sft_i = sft.probability(pattern_of(g, b.events))
        lengths.append(L)
        lms.append(lm_i)
        sfts.append(sft_i)
        if L == 0:
            terms = None
            break
        terms.append(l_split / (l_split + abs(l_split - L)) * lm_i * sft_i)
    score = 0.0 if terms is None else math.fsum(terms) / n
    return SplitCandidate(tuple(b.events for b in blocks), tuple(lengths), tuple(lms),
                          tuple(sfts), score, blocks)


def _signature(g: SemanticGraph, cand: SplitCandidate, order: dict) -> tuple:
    return tuple(sorted(tuple(sorted(order[v] for v in b)) for b in cand.blocks))


def best_split(g: SemanticGraph, lm, sft, max_events: int = DEFAULT_MAX_EVENTS,
               normalize: str = "perword", pronominalize: bool = False) -> SplitCandidate | None:
    """Highest scoring candidate; ties go to fewer blocks, then the smallest signature.

    Returns ``None`` when the sentence has no events or too many of them.
    """
    events = events_of(g)
    if not events:
        return None
    try:
        partitions = enumerate_partitions(events, max_events)
    except TooManyEvents as exc:
        log.info("%s: %s", g.sentence_id, exc)
        return None
    order = {v: i for i, v in enumerate(events)}
    best, best_key = None, None
    for p in partitions:
        cand = score_split(g, p, lm, sft, normalize, pronominalize)
        key = (-cand.score, cand.n, _signature(g, cand, order))
        if best_key is None or key < best_key:
            best, best_key = cand, key
    return best


def choose_and_realize(g: SemanticGraph, lm, sft, max_events: int = DEFAULT_MAX_EVENTS,
                       normalize: str = "perword", pronominalize: bool = False) -> list:
    """Split a preprocessed, modifier-lifted graph into sentences (token strings)."""
    best = best_split(g, lm, sft, max_events, normalize, pronominalize)
    if best is None or best.n == 1:
        return [g.text()]
    return [" ".join(sentence_tokens(b)) for b in best.realized]
