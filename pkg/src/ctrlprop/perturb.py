"""Rewrite-perturbed copies of diagrams.

A perturbed copy is reached from the original by sound rule applications,
recorded in a :class:`ProofTrace`, so the pair is equal by construction.
"""

import random

from .diagram import Dialect, wires
from .rules import BWD, FWD, ProofTrace, RuleInstance, find_matches, get_rule
from .random_diagrams import random_diagram
from .semantics import DEFAULT_TOL, equiv

PERTURB_RULES = (
    "hh",
    "addition",
    "2pi",
    "swap",
    "euler",
    "conjhcalpha",
    "conjcalphah",
    "conjhccpi",
    "conjccpih",
    "chreduce",
    "ccalphareduce",
    "xcalpha",
    "heuler",
    "naturality",
    "ctrlseq",
    "strength",
    "controlswap",
    "swapexpand",
)


def candidate_steps(d, rules=PERTURB_RULES, dialect=Dialect.CQC):
    dialect = Dialect.coerce(dialect)
    out = []
    for name in rules:
        rule = get_rule(name)
        if rule.dialect not in (None, dialect):
            continue
        for direction in (FWD, BWD):
            if direction == BWD and not rule.reversible:
                continue
            for path, span, b in find_matches(rule, d, direction):
                out.append(RuleInstance(name, b, path, direction, span))
    return out


def perturb(d, rng=None, steps=2, dialect=Dialect.CQC, rules=PERTURB_RULES):
    """Apply ``steps`` random rule instances; return ``(diagram, trace)``."""
    rng = rng if isinstance(rng, random.Random) else random.Random(rng)
    trace = ProofTrace(dialect, d)
    for _ in range(steps):
        cands = candidate_steps(trace.final, rules, dialect)
        if not cands:
            break
        inst = rng.choice(cands)
        trace.apply(inst.rule, inst.path, inst.direction, inst.bindings, inst.span)
    return trace.final, trace


def equal_pair(rng, wires_range=(1, 3), depth=6, steps=2, min_steps=1):
    """A random cqc diagram and a perturbed copy reached by at least ``min_steps`` rewrites."""
    while True:
        c = random_diagram(rng, wires=rng.randint(*wires_range), depth=depth)
        c2, trace = perturb(c, rng, steps)
        if len(trace.steps) >= min_steps:
            return c, c2, trace


def unequal_pair(rng, wires_range=(1, 3), depth=6, tol=DEFAULT_TOL):
    """Two random cqc diagrams on the same wires with different semantics."""
    while True:
        c1 = random_diagram(rng, wires=rng.randint(*wires_range), depth=depth)
        c2 = random_diagram(rng, wires=wires(c1), depth=depth)
        if not equiv(c1, c2, Dialect.CQC, tol).equal:
            return c1, c2
