"""Regenerate corpus.drs.jsonl (50 sentences) and its aligned text files.

Run from this directory; the output is committed, so this is only needed after edits.
"""

import json

FIRST = ["Anna", "Boris", "Clara", "David", "Elena", "Farid", "Greta", "Hugo", "Irene", "Jonas"]
LAST = ["Smith", "Novak", "Berg", "Okafor", "Rossi", "Tanaka", "Moreau", "Silva", "Kowalski", "Lund"]
VERBS = [("wrote", "write"), ("built", "build"), ("found", "find"), ("sold", "sell"),
         ("painted", "paint"), ("studied", "study"), ("opened", "open"), ("bought", "buy"),
         ("described", "describe"), ("published", "publish")]
VERBS2 = [("helped", "help"), ("changed", "change"), ("moved", "move"), ("saved", "save"),
          ("used", "use"), ("showed", "show"), ("named", "name"), ("joined", "join"),
          ("visited", "visit"), ("started", "start")]
ADJ = ["old", "small", "famous", "large", "new", "early", "red", "quiet", "rare", "simple"]
NOUN = ["book", "house", "map", "car", "picture", "theory", "shop", "boat", "method", "paper"]
NOUN2 = ["city", "river", "museum", "school", "market", "garden", "bridge", "library", "port", "farm"]
CITY = ["Paris", "Oslo", "Lima", "Cairo", "Delhi", "Quito", "Rome", "Tokyo", "Accra", "Perth"]
YEARS = [str(1901 + 11 * i) for i in range(10)]


class Builder:
    def __init__(self, sid):
        self.sid, self.tokens, self.nodes, self.edges, self.n = sid, [], [], [], 0

    def tok(self, *words):
        start = len(self.tokens)
        self.tokens.extend(words)
        return list(range(start, start + len(words)))

    def node(self, kind="entity", preds=(), named=(), timex=()):
        self.n += 1
        var = f"X{self.n}"
        rec = {"var": var, "kind": kind, "preds": [{"lemma": l, "pos": [p]} for l, p in preds]}
        if named:
            rec["named"] = [[w, p] for w, p in named]
        if timex:
            rec["timex"] = [[w, p] for w, p in timex]
        self.nodes.append(rec)
        return var

    def edge(self, head, dep, label, pos=None):
        e = {"from": head, "to": dep, "label": label}
        if pos is not None:
            e["pos"] = pos
        self.edges.append(e)

    def record(self):
        return {"id": self.sid, "tokens": self.tokens, "nodes": self.nodes, "edges": self.edges}


def person(b, i):
    p = b.tok(FIRST[i], LAST[i])
    return b.node(named=[(FIRST[i].lower(), p[0]), (LAST[i].lower(), p[1])])


def t1(i):
    b = Builder(f"t1-{i}")
    a = person(b, i)
    v = b.tok(VERBS[i][0])
    b.tok("the")
    adj, noun = b.tok(ADJ[i], NOUN[i])
    b.tok(".")
    e = b.node("event", [(VERBS[i][1], v[0])])
    o = b.node(preds=[(NOUN[i], noun), (ADJ[i], adj)])
    b.edge(e, a, "agent")
    b.edge(e, o, "patient")
    return b.record()


def t2(i):
    b = Builder(f"t2-{i}")
    (p_in,) = b.tok("In")
    (y,) = b.tok(YEARS[i])
    b.tok(",")
    a = person(b, (i + 3) % 10)
    (v,) = b.tok(VERBS[i][0])
    b.tok("a")
    (n,) = b.tok(NOUN[(i + 1) % 10])
    (p_in2,) = b.tok("in")
    (c,) = b.tok(CITY[i])
    b.tok(".")
    t = b.node(timex=[(YEARS[i], y)])
    e = b.node("event", [(VERBS[i][1], v)])
    o = b.node(preds=[(NOUN[(i + 1) % 10], n)])
    loc = b.node(named=[(CITY[i].lower(), c)])
    b.edge(e, a, "agent")
    b.edge(e, o, "patient")
    b.edge(e, t, "in", [p_in])
    b.edge(e, loc, "in", [p_in2])
    return b.record()


def t3(i):
    b = Builder(f"t3-{i}")
    b.tok("The")
    m, h = b.tok(NOUN2[i], NOUN[i])
    (v,) = b.tok(VERBS2[i][0])
    b.tok("the")
    (n3,) = b.tok(NOUN2[(i + 4) % 10])
    b.tok("which")
    (v2,) = b.tok(VERBS[(i + 2) % 10][0])
    (n4,) = b.tok(NOUN[(i + 7) % 10] + "s")
    b.tok(".")
    mod = b.node(preds=[(NOUN2[i], m)])
    head = b.node(preds=[(NOUN[i], h)])
    e1 = b.node("event", [(VERBS2[i][1], v)])
    o3 = b.node(preds=[(NOUN2[(i + 4) % 10], n3)])
    e2 = b.node("event", [(VERBS[(i + 2) % 10][1], v2)])
    o4 = b.node(preds=[(NOUN[(i + 7) % 10], n4)])
    b.edge(mod, head, "nn")
    b.edge(e1, head, "agent")
    b.edge(e1, o3, "patient")
    b.edge(e2, o3, "agent")
    b.edge(e2, o4, "patient")
    return b.record()


def t4(i):
    b = Builder(f"t4-{i}")
    a = person(b, (i + 5) % 10)
    (v,) = b.tok(VERBS[(i + 4) % 10][0])
    b.tok("the")
    (n,) = b.tok(NOUN[(i + 2) % 10])
    b.tok("and")
    (v2,) = b.tok(VERBS2[(i + 1) % 10][0])
    b.tok("the")
    (n2,) = b.tok(NOUN2[(i + 6) % 10])
    (pf,) = b.tok("for")
    adj, n3 = b.tok(ADJ[(i + 3) % 10], "years")
    b.tok(".")
    e1 = b.node("event", [(VERBS[(i + 4) % 10][1], v)])
    o1 = b.node(preds=[(NOUN[(i + 2) % 10], n)])
    e2 = b.node("event", [(VERBS2[(i + 1) % 10][1], v2)])
    o2 = b.node(preds=[(NOUN2[(i + 6) % 10], n2)])
    t = b.node(preds=[("year", n3), (ADJ[(i + 3) % 10], adj)])
    b.edge(e1, a, "agent")
    b.edge(e1, o1, "patient")
    b.edge(e2, a, "agent")
    b.edge(e2, o2, "patient")
    b.edge(e2, t, "for", [pf])
    return b.record()


def t5(i):
    b = Builder(f"t5-{i}")
    (c,) = b.tok(CITY[(i + 2) % 10])
    b.tok("is", "a")
    adj, n = b.tok(ADJ[(i + 6) % 10], NOUN2[(i + 3) % 10])
    b.tok("!" if i % 3 == 0 else ".")
    x = b.node(named=[(CITY[(i + 2) % 10].lower(), c)])
    y = b.node(preds=[(NOUN2[(i + 3) % 10], n), (ADJ[(i + 6) % 10], adj)])
    b.edge(x, y, "eq")
    return b.record()


def main():
    recs = [f(i) for i in range(10) for f in (t1, t2, t3, t4, t5)]
    with open("corpus.drs.jsonl", "w", encoding="utf-8", newline="\n") as fh:
        for r in recs:
            fh.write(json.dumps(r) + "\n")
    with open("corpus.txt", "w", encoding="utf-8", newline="\n") as fh:
        for r in recs:
            fh.write(" ".join(r["tokens"]).lower() + "\n")


if __name__ == "__main__":
    main()
