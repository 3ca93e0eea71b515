"""Phrasal deletion as a 0-1 integer program.

Every optional relation ``r`` of a sentence graph gets a variable
``x_r`` (1 = keep).  The program maximizes

    sum_r  x_r * P(r | head) * P(word)

subject to subtree closure on a spanning tree rooted at the first event
(``x_child <= x_parent``) and a forced deletion (``sum x_r <= m - 1``, or
optionally at least ``k`` deleted tokens).  Agent, patient, theme and eq
relations never get a variable.  Programs are solved exactly by depth-first
branch and bound.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .drs import SemanticGraph, events_of, head_lemma, head_position

MANDATORY = frozenset({"agent", "patient", "theme", "eq"})
UNSEEN_REL_PROB = 1e-6


# ---------------------------------------------------------------------------
# probabilities


@dataclass
class RelProbTable:
    rel_probs: dict       # (relation, head lemma) -> P(relation | head)
    word_probs: dict      # word -> relative frequency
    total_words: int
    rel_floor: float = UNSEEN_REL_PROB

    def p_rel(self, relation: str, head: str) -> float:
        return self.rel_probs.get((relation, head.lower()), self.rel_floor)

    def p_word(self, word: str) -> float:
        p = self.word_probs.get(word.lower())
        return p if p is not None else 1.0 / (self.total_words + 1)

    def dumps(self) -> str:
        lines = [f"#total={self.total_words}"]
        for (rel, head) in sorted(self.rel_probs):
            lines.append(f"REL {rel}\t{head}\t{self.rel_probs[rel, head]:.9g}")
        for w in sorted(self.word_probs):
            lines.append(f"WORD {w}\t{self.word_probs[w]:.9g}")
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "RelProbTable":
        rels, words, total = {}, {}, None
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line:
                continue
            if line.startswith("#total="):
                total = int(line[7:])
            elif line.startswith("REL "):
                parts = line[4:].split("\t")
                if len(parts) != 3:
                    raise ValueError(f"line {lineno}: expected 'REL <rel>\\t<head>\\t<prob>'")
                rels[parts[0], parts[1]] = float(parts[2])
            elif line.startswith("WORD "):
                parts = line[5:].split("\t")
                if len(parts) != 2:
                    raise ValueError(f"line {lineno}: expected 'WORD <word>\\t<prob>'")
                words[parts[0]] = float(parts[1])
            else:
                raise ValueError(f"line {lineno}: unknown record")
        if total is None:
            raise ValueError("missing #total header")
        return cls(rels, words, total)

    @classmethod
    def load(cls, path) -> "RelProbTable":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


def train_rel_probs(corpus: Iterable[SemanticGraph],
                    simple_text: Iterable[Sequence[str]]) -> RelProbTable:
    """Relation probabilities per head lemma and word relative frequencies."""
    rel = Counter()
    head_tot = Counter()
    n_graphs = 0
    for g in corpus:
        n_graphs += 1
        for e in g.edges:
            h = head_lemma(g.nodes[e.head]).lower()
            rel[e.label, h] += 1
            head_tot[h] += 1
    words = Counter()
    for sent in simple_text:
        words.update(t.lower() for t in sent)
    total = sum(words.values())
    if not n_graphs or not total:
        raise ValueError("empty corpus")
    rel_probs = {k: c / head_tot[k[1]] for k, c in rel.items()}
    word_probs = {w: c / total for w, c in words.items()}
    return RelProbTable(rel_probs, word_probs, total)


# ---------------------------------------------------------------------------
# program


@dataclass
class DeletionProgram:
    """A 0-1 program ``max w.x  s.t.  A x <= b``.

    ``rows`` hold sparse rows ``({var: coef}, rhs)``.  ``parent[i]`` is the
    closest ancestor variable on the spanning tree and ``tokens[i]`` the
    number of positions removed only by deleting ``i``.
    """

    names: list
    weights: list
    parent: list
    tokens: list
    rows: list
    edges: list = field(default_factory=list)       # (parent node, child node, label)
    subtree: list = field(default_factory=list)     # node vars removed when x_i = 0
    min_deleted_tokens: int | None = None

    @property
    def size(self) -> int:
        return len(self.names)

    @property
    def deletable(self) -> bool:
        return self.size > 0

    def objective(self, x: Sequence[int]) -> float:
        return math.fsum(w for w, xi in zip(self.weights, x) if xi)

    def feasible(self, x: Sequence[int]) -> bool:
        for coefs, rhs in self.rows:
            if sum(c * x[i] for i, c in coefs.items()) > rhs + 1e-9:
                return False
        return True


def spanning_tree(g: SemanticGraph) -> tuple:
    """BFS tree over each connected component (edges taken in either direction).

    Components are rooted at their first event, or at their leftmost node
    when they have none.  Returns ``(parent_edge, order)`` where
    ``parent_edge[var]`` is the tree edge ``(parent, edge)`` reaching var.
    """
    adj = {v: [] for v in g.nodes}
    for e in g.edges:
        adj[e.head].append((e.dep, e))
        adj[e.dep].append((e.head, e))
    try:
        events = events_of(g)
    except ValueError:
        events = sorted(v for v, n in g.nodes.items() if n.kind == "event")
    others = sorted(g.nodes, key=lambda v: (min(g.nodes[v].positions, default=math.inf), v))
    parent_edge = {}
    order = []
    seen = set()
    for root in events + others:
        if root in seen:
            continue
        seen.add(root)
        parent_edge[root] = None
        queue = deque([root])
        while queue:
            v = queue.popleft()
            order.append(v)
            for u, e in adj[v]:
                if u not in seen:
                    seen.add(u)
                    parent_edge[u] = (v, e)
                    queue.append(u)
    return parent_edge, order


def _surface_of(g: SemanticGraph, var: str) -> str:
    node = g.nodes[var]
    p = head_position(node)
    if p is not None and p in g.surface:
        return g.surface[p]
    return head_lemma(node)


def build_program(g: SemanticGraph, probs: RelProbTable,
                  min_deleted_tokens: int | None = None) -> DeletionProgram:
    """Deletion program for a preprocessed, modifier-lifted graph.

    With ``min_deleted_tokens`` the forced deletion becomes "remove at least
    that many tokens" instead of "drop at least one relation".
    """
    parent_edge, order = spanning_tree(g)
    children = {v: [] for v in g.nodes}
    for v, pe in parent_edge.items():
        if pe is not None:
            children[pe[0]].append(v)

    var_of_node = {}      # child node -> variable index of its tree edge
    names, weights, edges = [], [], []
    for v in order:
        pe = parent_edge[v]
        if pe is None:
            continue
        p, e = pe
        if e.label in MANDATORY:
            continue
        h = head_lemma(g.nodes[p]).lower()
        w = _surface_of(g, v)
        var_of_node[v] = len(names)
        names.append(f"{p}-{e.label}->{v}")
        weights.append(probs.p_rel(e.label, h) * probs.p_word(w))
        edges.append((p, v, e))

    # nearest optional ancestor and the nodes each variable removes on its own
    anc = {}
    own_nodes = {i: set() for i in range(len(names))}
    for v in order:
        pe = parent_edge[v]
        up = anc.get(pe[0]) if pe is not None else None
        anc[v] = var_of_node[v] if v in var_of_node else up
        if anc[v] is not None:
            own_nodes[anc[v]].add(v)
    parent = [anc.get(p) for p, _, _ in edges]

    def positions_of(nodes):
        pos = set()
        for n in nodes:
            pos |= g.nodes[n].positions
            pe = parent_edge.get(n)
            if pe is not None:
                pos |= pe[1].positions
        return pos

    tokens = [len(positions_of(own_nodes[i])) for i in range(len(names))]
    subtree = []
    for i, (p, v, e) in enumerate(edges):
        stack, nodes = [v], set()
        while stack:
            n = stack.pop()
            nodes.add(n)
            stack.extend(children[n])
        subtree.append(nodes)

    m = len(names)
    rows = []
    for i in range(m):
        if parent[i] is not None:
            rows.append(({i: 1, parent[i]: -1}, 0))
    if m:
        if min_deleted_tokens:
            k = min(min_deleted_tokens, sum(tokens))
            rows.append(({i: tokens[i] for i in range(m)}, sum(tokens) - k))
        else:
            rows.append(({i: 1 for i in range(m)}, m - 1))
    return DeletionProgram(names, weights, parent, tokens, rows, edges, subtree,
                           min_deleted_tokens)


# ---------------------------------------------------------------------------
# solver


def solve(p: DeletionProgram) -> tuple | None:
    """Exact optimum by branch and bound (``None`` if infeasible).

    Variables are branched in lexicographic name order, keep before delete;
    only strictly better incumbents replace the current one, so ties resolve
    to the lexicographically largest assignment.
    """
    n = p.size
    if n == 0:
        return ()
    order = sorted(range(n), key=lambda i: p.names[i])
    rows = [(dict(c), float(b)) for c, b in p.rows]
    var_rows = [[] for _ in range(n)]
    for r, (coefs, _) in enumerate(rows):
        for i in coefs:
            var_rows[i].append(r)
    # rows with only non-negative coefficients give a fractional knapsack bound
    knap = [r for r, (coefs, _) in enumerate(rows) if all(c >= 0 for c in coefs.values())]

    x = [None] * n
    lhs = [0.0] * len(rows)                       # contribution of fixed vars
    neg_free = [sum(c for c in coefs.values() if c < 0) for coefs, _ in rows]
    best = [-math.inf, None]

    def bound(k, value):
        free = [order[j] for j in range(k, n)]
        ub = value + sum(max(0.0, p.weights[i]) for i in free)
        for r in knap:
            coefs, rhs = rows[r]
            cap = rhs - lhs[r]
            b = value
            items = []
            for i in free:
                w = p.weights[i]
                if w <= 0:
                    continue
                c = coefs.get(i, 0)
                if c == 0:
                    b += w
                else:
                    items.append((w / c, w, c))
            items.sort(reverse=True)
            for _, w, c in items:
                if cap <= 0:
                    break
                take = min(1.0, cap / c)
                b += w * take
                cap -= c * take
            ub = min(ub, b)
        return ub

    def rec(k, value):
        if k == n:
            if value > best[0]:
                best[0], best[1] = value, tuple(x)
            return
        if bound(k, value) <= best[0]:
            return
        i = order[k]
        for v in (1, 0):
            ok = True
            touched = var_rows[i]
            for r in touched:
                c = rows[r][0][i]
                lhs[r] += c * v
                if c < 0:
                    neg_free[r] -= c
                if lhs[r] + neg_free[r] > rows[r][1] + 1e-9:
                    ok = False
            if ok:
                x[i] = v
                rec(k + 1, value + (p.weights[i] if v else 0.0))
                x[i] = None
            for r in touched:
                c = rows[r][0][i]
                lhs[r] -= c * v
                if c < 0:
                    neg_free[r] += c

    rec(0, 0.0)
    return best[1]


def compress(g: SemanticGraph, probs: RelProbTable,
             min_deleted_tokens: int | None = None) -> SemanticGraph:
    """Delete the subtrees the optimal assignment drops; identity without optional edges."""
    prog = build_program(g, probs, min_deleted_tokens)
    if not prog.deletable:
        return g
    x = solve(prog)
    if x is None:
        return g
    return apply_assignment(g, prog, x)


def apply_assignment(g: SemanticGraph, prog: DeletionProgram, x: Sequence[int]) -> SemanticGraph:
    removed = set()
    for i, xi in enumerate(x):
        if not xi:
            removed |= prog.subtree[i]
    removed_edge_pos = set()
    for i, xi in enumerate(x):
        if not xi:
            removed_edge_pos |= prog.edges[i][2].positions
    nodes = {v: n for v, n in g.nodes.items() if v not in removed}
    edges = [e for e in g.edges if e.head in nodes and e.dep in nodes]
    kept = set()
    for n in nodes.values():
        kept |= n.positions
    for e in edges:
        kept |= e.positions
    kept -= removed_edge_pos
    tokens = [t for t in g.tokens if t.index in kept]
    return SemanticGraph(g.sentence_id, tokens, nodes, edges)
