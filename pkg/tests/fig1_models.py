"""Hand-set toy models that drive the worked Higgs example through all three stages."""

from collections import Counter
from pathlib import Path

from semsimp.compressor import RelProbTable
from semsimp.drs import parse_drs_file
from semsimp.lexsimp import LexRule, LexRuleTable
from semsimp.ngram import train_lm
from semsimp.splitter import SplitFeatureTable

FIXTURES = Path(__file__).parent / "fixtures"
FIG1 = FIXTURES / "fig1.drs.jsonl"

S1 = ("In 1964 Peter Higgs wrote his second paper in Physical Review Letters explaining "
      "Higgs mechanism which predicted a new massive elementary particle for the first time .")
S2 = ["In 1964 Peter Higgs wrote his second paper in Physical Review Letters explaining "
      "Higgs mechanism .",
      "Higgs mechanism predicted a new massive elementary particle for the first time ."]
S = ("In 1964 Peter Higgs wrote his paper explaining Higgs mechanism . "
     "Higgs mechanism predicted a new elementary particle .")

A = ("agent", "in", "in", "patient")
B = ("agent", "patient")
C = ("agent", "for", "patient")


def fig1_graph():
    return parse_drs_file(FIG1)[0]


def rules():
    table = {
        ("published",): [LexRule(("published",), ("wrote",), 0.8, 2.0)],
        ("describing",): [LexRule(("describing",), ("explaining",), 0.7, 1.5)],
        ("spin-zero", "boson"): [LexRule(("spin-zero", "boson"), ("elementary", "particle"),
                                         0.6, 3.0)],
    }
    vectors = {
        "wrote": Counter({"paper": 3, "peter": 1, "higgs": 1}),
        "explaining": Counter({"mechanism": 2, "higgs": 1, "paper": 1}),
        "elementary particle": Counter({"new": 2, "massive": 1, "predicted": 1}),
    }
    return LexRuleTable(table, vectors, theta=0.1, f_min=1)


def sft():
    return SplitFeatureTable(Counter({(A, B): 23, (B,): 59, (A,): 2, (C,): 40,
                                      (("agent",),): 876}))


SIMPLE_TEXT = [
    "in 1964 peter higgs wrote his paper explaining higgs mechanism .",
    "higgs mechanism predicted a new elementary particle .",
    "peter higgs wrote a paper .",
    "the mechanism predicted a particle .",
    "he wrote his second paper in 1964 .",
]


def lm(n=3):
    return train_lm([s.split() for s in SIMPLE_TEXT], n)


def relprobs():
    rel = {
        ("in", "wrote"): 0.5, ("of", "paper"): 0.5, ("modifier", "paper"): 0.5,
        ("nn-of", "mechanism"): 1.0, ("modifier", "particle"): 0.5, ("for", "predict"): 0.5,
        ("modifier", "time"): 1.0, ("orphan", "time"): 1.0, ("orphan", "predict"): 1.0,
        ("orphan", "mechanism"): 1.0,
    }
    words = {"1964": 0.01, "letters": 0.001, "his": 0.02, "second": 0.001, "higgs": 0.01,
             "massive": 0.001, "new": 0.05, "elementary": 0.05, "time": 0.002, "first": 0.002,
             "the": 0.001, "a": 0.05}
    return RelProbTable(rel, words, 1000)
