"""Semantic graphs derived from discourse representation structures.

A sentence's DRS is flattened upstream into a labelled graph: one node per
DRS variable, one edge per binary relation.  Every predicate carries the
token positions it was produced from, so any node subset can be turned back
into text by sorting positions.

Records are read from line-delimited JSON (``*.drs.jsonl``)::

    {"id": "s1", "tokens": ["Peter", "slept", "."],
     "nodes": [{"var": "X1", "kind": "entity", "preds": [],
                "named": [["peter", 0]]},
               {"var": "X2", "kind": "event",
                "preds": [{"lemma": "sleep", "pos": [1]}]}],
     "edges": [{"from": "X2", "to": "X1", "label": "agent"}]}

Edges may carry an optional ``"pos"`` list for relation words such as
prepositions.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence


EVENT = "event"
ENTITY = "entity"
ORPHAN = "orphan"
NODE_KINDS = (EVENT, ENTITY, ORPHAN)

ORPHAN_LABEL = "orphan"
MODIFIER_LABEL = "modifier"
NN_LABEL = "nn"
NN_OF_LABEL = "nn-of"


class DRSFormatError(ValueError):
    """A DRS-JSON record could not be read."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class Token:
    index: int
    surface: str


@dataclass(frozen=True)
class Predicate:
    lemma: str
    positions: frozenset
    # one of: pred, named, timex, orphan
    origin: str = "pred"


@dataclass(frozen=True)
class Node:
    var: str
    kind: str
    preds: tuple = ()
    named: tuple = ()
    timex: tuple = ()

    @property
    def positions(self) -> frozenset:
        out = set()
        for p in self.preds:
            out |= p.positions
        return frozenset(out)


@dataclass(frozen=True)
class Edge:
    head: str
    dep: str
    label: str
    positions: frozenset = frozenset()


@dataclass(frozen=True, eq=False)
class SemanticGraph:
    sentence_id: str
    tokens: tuple
    nodes: Mapping[str, Node]
    edges: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "nodes", MappingProxyType(dict(self.nodes)))
        object.__setattr__(self, "edges", tuple(self.edges))

    def __eq__(self, other):
        if not isinstance(other, SemanticGraph):
            return NotImplemented
        return (
            self.sentence_id == other.sentence_id
            and self.tokens == other.tokens
            and dict(self.nodes) == dict(other.nodes)
            and sorted(self.edges, key=_edge_key) == sorted(other.edges, key=_edge_key)
        )

    __hash__ = None

    @cached_property
    def surface(self) -> dict:
        return {t.index: t.surface for t in self.tokens}

    @cached_property
    def children(self) -> dict:
        out = {v: [] for v in self.nodes}
        for e in self.edges:
            out[e.head].append(e)
        return out

    @cached_property
    def parents(self) -> dict:
        out = {v: [] for v in self.nodes}
        for e in self.edges:
            out[e.dep].append(e)
        return out

    @cached_property
    def position_owner(self) -> dict:
        """Map each covered position to the node that realizes it.

        Positions carried by an edge belong to the edge's dependent.
        """
        owner = {}
        for var, node in self.nodes.items():
            for p in node.positions:
                owner[p] = var
        for e in self.edges:
            for p in e.positions:
                owner.setdefault(p, e.dep)
        return owner

    def covered_positions(self) -> set:
        out = set()
        for node in self.nodes.values():
            out |= node.positions
        for e in self.edges:
            out |= e.positions
        return out

    def words(self, positions: Iterable[int]) -> list:
        return [self.surface[p] for p in positions]

    def text(self) -> str:
        return " ".join(t.surface for t in self.tokens)


def _edge_key(e: Edge):
    return (e.head, e.dep, e.label, tuple(sorted(e.positions)))


def head_predicate(node: Node) -> Predicate | None:
    """The rightmost predicate of a node (English phrases are right-headed)."""
    if not node.preds:
        return None
    return max(node.preds, key=lambda p: (max(p.positions) if p.positions else -1))


def head_lemma(node: Node) -> str:
    pred = head_predicate(node)
    return pred.lemma if pred is not None else node.var


def head_position(node: Node) -> int | None:
    pred = head_predicate(node)
    if pred is None or not pred.positions:
        return None
    return max(pred.positions)


# ---------------------------------------------------------------------------
# parsing


def _require(obj, key, kind, line, field):
    if key not in obj:
        raise DRSFormatError("missing required field", line, field)
    value = obj[key]
    if not isinstance(value, kind):
        raise DRSFormatError(f"expected {kind.__name__}, got {type(value).__name__}", line, field)
    return value


def _positions(raw, n_tokens, line, field) -> frozenset:
    if not isinstance(raw, list):
        raise DRSFormatError("expected a list of token positions", line, field)
    for p in raw:
        if not isinstance(p, int) or isinstance(p, bool):
            raise DRSFormatError(f"position {p!r} is not an integer", line, field)
        if not 0 <= p < n_tokens:
            raise DRSFormatError(f"position {p} outside sentence of {n_tokens} tokens", line, field)
    return frozenset(raw)


def _facts(raw, n_tokens, line, field) -> tuple:
    if not isinstance(raw, list):
        raise DRSFormatError("expected a list of [word, position] pairs", line, field)
    out = []
    for j, fact in enumerate(raw):
        f = f"{field}[{j}]"
        if not (isinstance(fact, list) and len(fact) == 2 and isinstance(fact[0], str)):
            raise DRSFormatError("expected [word, position]", line, f)
        _positions([fact[1]], n_tokens, line, f)
        out.append((fact[0], fact[1]))
    return tuple(out)


def parse_record(obj, line: int | None = None) -> SemanticGraph:
    """Build a graph from one decoded DRS-JSON object (no preprocessing)."""
    if not isinstance(obj, dict):
        raise DRSFormatError("record is not a JSON object", line)
    sid = _require(obj, "id", str, line, "id")
    tokens = _require(obj, "tokens", list, line, "tokens")
    for i, t in enumerate(tokens):
        if not isinstance(t, str):
            raise DRSFormatError("token is not a string", line, f"tokens[{i}]")
    n = len(tokens)
    raw_nodes = _require(obj, "nodes", list, line, "nodes")
    raw_edges = obj.get("edges", [])
    if not isinstance(raw_edges, list):
        raise DRSFormatError("expected list", line, "edges")

    nodes = {}
    claimed = {}

    def claim(positions, where):
        for p in positions:
            if p in claimed:
                raise DRSFormatError(
                    f"position {p} already used by {claimed[p]}", line, where)
            claimed[p] = where

    for i, rn in enumerate(raw_nodes):
        f = f"nodes[{i}]"
        if not isinstance(rn, dict):
            raise DRSFormatError("node is not an object", line, f)
        var = _require(rn, "var", str, line, f + ".var")
        if var in nodes:
            raise DRSFormatError(f"duplicate var {var!r}", line, f + ".var")
        kind = _require(rn, "kind", str, line, f + ".kind")
        if kind not in NODE_KINDS:
            raise DRSFormatError(f"unknown node kind {kind!r}", line, f + ".kind")
        preds = []
        for j, rp in enumerate(rn.get("preds", [])):
            pf = f"{f}.preds[{j}]"
            if not isinstance(rp, dict):
                raise DRSFormatError("predicate is not an object", line, pf)
            lemma = _require(rp, "lemma", str, line, pf + ".lemma")
            pos = _positions(rp.get("pos", []), n, line, pf + ".pos")
            claim(pos, pf)
            origin = rp.get("origin", ORPHAN if kind == ORPHAN else "pred")
            preds.append(Predicate(lemma, pos, origin))
        named = _facts(rn.get("named", []), n, line, f + ".named")
        timex = _facts(rn.get("timex", []), n, line, f + ".timex")
        for j, (_, p) in enumerate(named):
            claim([p], f"{f}.named[{j}]")
        for j, (_, p) in enumerate(timex):
            claim([p], f"{f}.timex[{j}]")
        if kind == EVENT and not preds:
            raise DRSFormatError("event node without predicates", line, f + ".preds")
        nodes[var] = Node(var, kind, tuple(preds), named, timex)

    edges = []
    for i, re_ in enumerate(raw_edges):
        f = f"edges[{i}]"
        if not isinstance(re_, dict):
            raise DRSFormatError("edge is not an object", line, f)
        head = _require(re_, "from", str, line, f + ".from")
        dep = _require(re_, "to", str, line, f + ".to")
        label = _require(re_, "label", str, line, f + ".label")
        if head not in nodes:
            raise DRSFormatError(f"unknown var {head!r}", line, f + ".from")
        if dep not in nodes:
            raise DRSFormatError(f"unknown var {dep!r}", line, f + ".to")
        pos = _positions(re_.get("pos", []), n, line, f + ".pos")
        claim(pos, f)
        edges.append(Edge(head, dep, label, pos))

    return SemanticGraph(sid, [Token(i, t) for i, t in enumerate(tokens)], nodes, edges)


def parse_drs_lines(lines: Iterable[str], jobs: int = 1) -> list:
    """Parse DRS-JSON lines; blank lines are skipped, line numbers are 1-based."""
    items = [(i, ln) for i, ln in enumerate(lines, 1) if ln.strip()]

    def one(item):
        lineno, text = item
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DRSFormatError(f"invalid JSON ({exc.msg})", lineno) from None
        return parse_record(obj, lineno)

    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            return list(pool.map(one, items))
    return [one(it) for it in items]


def parse_drs_file(path, jobs: int = 1) -> list:
    with open(path, encoding="utf-8") as fh:
        return parse_drs_lines(fh, jobs=jobs)


def graph_to_record(g: SemanticGraph) -> dict:
    """Inverse of :func:`parse_record` (orphan nodes and origins included)."""
    nodes = []
    for node in g.nodes.values():
        rn = {"var": node.var, "kind": node.kind,
              "preds": [{"lemma": p.lemma, "pos": sorted(p.positions), "origin": p.origin}
                        for p in node.preds]}
        if node.named:
            rn["named"] = [list(f) for f in node.named]
        if node.timex:
            rn["timex"] = [list(f) for f in node.timex]
        nodes.append(rn)
    edges = []
    for e in g.edges:
        re_ = {"from": e.head, "to": e.dep, "label": e.label}
        if e.positions:
            re_["pos"] = sorted(e.positions)
        edges.append(re_)
    return {"id": g.sentence_id, "tokens": [t.surface for t in g.tokens],
            "nodes": nodes, "edges": edges}


# ---------------------------------------------------------------------------
# preprocessing


def _fresh_var(prefix: str, taken: set) -> str:
    i = 1
    while f"{prefix}{i}" in taken:
        i += 1
    return f"{prefix}{i}"


def preprocess(g: SemanticGraph) -> SemanticGraph:
    """Normalize a freshly parsed graph.

    ``nn`` edges are reversed into ``nn-of`` so the modified noun heads the
    compound, ``named``/``timex`` facts become unary predicates, and every
    token without DRS material gets an orphan node attached to the node
    owning the nearest covered position (left wins ties).
    """
    edges = []
    for e in g.edges:
        if e.label == NN_LABEL:
            edges.append(Edge(e.dep, e.head, NN_OF_LABEL, e.positions))
        else:
            edges.append(e)

    nodes = {}
    for var, node in g.nodes.items():
        preds = list(node.preds)
        preds += [Predicate(w, frozenset([p]), "named") for w, p in node.named]
        preds += [Predicate(str(v), frozenset([p]), "timex") for v, p in node.timex]
        nodes[var] = Node(var, node.kind, tuple(preds))

    covered = {}
    for var, node in nodes.items():
        for p in node.positions:
            covered[p] = var
    for e in edges:
        for p in e.positions:
            covered.setdefault(p, e.dep)
    anchors = sorted(covered)

    taken = set(nodes)
    first_orphan = None
    for t in g.tokens:
        if t.index in covered:
            continue
        var = _fresh_var("O", taken)
        taken.add(var)
        nodes[var] = Node(var, ORPHAN, (Predicate(t.surface, frozenset([t.index]), ORPHAN),))
        target = _nearest_anchor(anchors, t.index)
        if target is not None:
            edges.append(Edge(covered[target], var, ORPHAN_LABEL))
        elif first_orphan is not None:
            edges.append(Edge(first_orphan, var, ORPHAN_LABEL))
        else:
            first_orphan = var
    return SemanticGraph(g.sentence_id, g.tokens, nodes, edges)


def _nearest_anchor(anchors: Sequence[int], pos: int) -> int | None:
    import bisect

    if not anchors:
        return None
    i = bisect.bisect_left(anchors, pos)
    left = anchors[i - 1] if i > 0 else None
    right = anchors[i] if i < len(anchors) else None
    if left is None:
        return right
    if right is None:
        return left
    return left if pos - left <= right - pos else right


def lift_modifiers(g: SemanticGraph) -> SemanticGraph:
    """Move non-head lexical predicates into child nodes via ``modifier`` edges.

    Predicates that came from ``named``/``timex`` facts stay on their node:
    a multiword name is one unit, not head plus modifiers.
    """
    nodes = {}
    edges = list(g.edges)
    taken = set(g.nodes)
    for var, node in g.nodes.items():
        if node.kind == ORPHAN or len(node.preds) < 2:
            nodes[var] = node
            continue
        head = head_predicate(node)
        keep, lifted = [], []
        for p in node.preds:
            if p is head or p.origin != "pred":
                keep.append(p)
            else:
                lifted.append(p)
        nodes[var] = Node(var, node.kind, tuple(keep))
        for p in sorted(lifted, key=lambda p: min(p.positions) if p.positions else -1):
            j = 1
            while f"{var}.{j}" in taken:
                j += 1
            child = f"{var}.{j}"
            taken.add(child)
            nodes[child] = Node(child, ENTITY, (p,))
            edges.append(Edge(var, child, MODIFIER_LABEL))
    return SemanticGraph(g.sentence_id, g.tokens, nodes, edges)


def events_of(g: SemanticGraph) -> list:
    """Event vars ordered by the first position of their head predicate."""
    keyed = []
    for var, node in g.nodes.items():
        if node.kind != EVENT:
            continue
        pred = head_predicate(node)
        keyed.append((min(pred.positions) if pred and pred.positions else -1, var))
    keyed.sort()
    for (a, va), (b, vb) in zip(keyed, keyed[1:]):
        if a == b:
            raise ValueError(
                f"{g.sentence_id}: events {va} and {vb} share head position {a}")
    return [v for _, v in keyed]


# ---------------------------------------------------------------------------
# realization


def subset_positions(g: SemanticGraph, node_subset: Iterable[str]) -> set:
    """Positions of the nodes in the subset plus edges internal to it."""
    subset = set(node_subset)
    out = set()
    for var in subset:
        out |= g.nodes[var].positions
    for e in g.edges:
        if e.positions and e.head in subset and e.dep in subset:
            out |= e.positions
    return out


def realize(g: SemanticGraph, node_subset: Iterable[str], lead: Iterable[str] = ()) -> str:
    """Token string for a node subset, in sentence order.

    Nodes in ``lead`` (e.g. a shared noun phrase copied into a second
    sentence) are emitted first.
    """
    subset = set(node_subset)
    missing = subset.difference(g.nodes)
    if missing:
        raise KeyError(f"unknown vars: {sorted(missing)}")
    lead = set(lead) & subset
    first = sorted(subset_positions(g, lead)) if lead else []
    rest = sorted(subset_positions(g, subset).difference(first))
    return " ".join(g.words(first + rest))


# ---------------------------------------------------------------------------
# in-place token substitution


def substitute(g: SemanticGraph, start: int, length: int, replacement: Sequence[str]) -> SemanticGraph:
    """Replace tokens ``start:start+length`` by ``replacement``, keeping the graph aligned.

    Old position ``start+t`` maps onto new position ``start+min(t, k-1)``
    for a k-token replacement; surplus new tokens join the predicate owning
    the last old position.  Predicates fully inside the span take the new
    surface (lowercased) as their lemma.
    """
    n = len(g.tokens)
    k = len(replacement)
    if k == 0 or length == 0:
        raise ValueError("substitution needs a non-empty span and replacement")
    if not 0 <= start <= n - length:
        raise ValueError("span outside sentence")
    shift = k - length
    end = start + length

    def remap(positions):
        out = set()
        for p in positions:
            if p < start:
                out.add(p)
            elif p >= end:
                out.add(p + shift)
            else:
                t = p - start
                if t < k:
                    out.add(start + t)
                if t == length - 1 and k > length:
                    out.update(range(start + length, start + k))
        return frozenset(out)

    surfaces = [t.surface for t in g.tokens]
    surfaces[start:end] = list(replacement)
    tokens = [Token(i, s) for i, s in enumerate(surfaces)]

    nodes = {}
    span = set(range(start, end))
    for var, node in g.nodes.items():
        preds = []
        for p in node.preds:
            newpos = remap(p.positions)
            if not newpos:
                continue
            lemma = p.lemma
            if p.positions and p.positions <= span:
                lemma = " ".join(surfaces[q] for q in sorted(newpos)).lower()
            preds.append(Predicate(lemma, newpos, p.origin))
        nodes[var] = replace(node, preds=tuple(preds))
    edges = [replace(e, positions=remap(e.positions)) for e in g.edges]
    return SemanticGraph(g.sentence_id, tokens, nodes, edges)
