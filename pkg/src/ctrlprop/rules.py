"""Relation libraries as position-applicable rewrite rules, with traces.

A :class:`Rule` has two builders mapping bindings to diagrams. Angle
parameters are matched by evaluating the builders on symbolic slots; rules
quantified over diagrams or wire counts (the coherence laws) carry their own
matcher. Every application is checked semantically on the rewritten subterm.
"""

import math
import random
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import circuits as C
from .angles import is_pi
from .diagram import (
    CNOT,
    Ctrl,
    Dialect,
    Diagram,
    H,
    Id,
    Par,
    Phase,
    Seq,
    Swap,
    Z,
    ctrl_n,
    dagger,
    flatten,
    replace_at,
    subterm_at,
    swap_lattice,
    wires,
)
from .errors import NoMatch, RegistrationFailed, SemanticDriftError
from .euler import euler_params, match_euler
from .patterns import Slot, match
from .random_diagrams import random_angle, random_diagram
from .semantics import DEFAULT_TOL, check_tolerance, local_matrix, max_abs_diff
from .syntax import diagram_hash, parse, to_text

PI = math.pi
FWD, BWD = "fwd", "bwd"
PRIMITIVE, DERIVED, COHERENCE = "primitive", "derived", "coherence"


@dataclass(frozen=True, eq=False)
class Rule:
    name: str
    dialect: Optional[Dialect]  # None: usable in both dialects
    lhs: Callable
    rhs: Callable
    params: tuple = ()
    guard: Optional[Callable] = None
    kind: str = PRIMITIVE
    reversible: bool = True
    lhs_alts: tuple = ()
    matcher: Optional[Callable] = None
    sampler: Optional[Callable] = None
    description: str = ""
    _patterns: dict = field(default_factory=dict, repr=False)

    def build(self, side, bindings):
        builder = self.lhs if side == "lhs" else self.rhs
        return flatten(builder(bindings))

    def patterns(self, side):
        if side not in self._patterns:
            slots = {p: Slot(p) for p in self.params}
            builders = (self.lhs,) + self.lhs_alts if side == "lhs" else (self.rhs,)
            self._patterns[side] = [flatten(b(slots)) for b in builders]
        return self._patterns[side]

    def sample(self, rng):
        if self.sampler is not None:
            return self.sampler(rng)
        return {p: random_angle(rng) if rng.random() < 0.2 else rng.uniform(0, 2 * PI) for p in self.params}

    @property
    def deterministic(self):
        return not self.params and self.sampler is None


@dataclass(frozen=True)
class RuleInstance:
    rule: str
    bindings: dict = field(default_factory=dict)
    path: tuple = ()
    direction: str = FWD
    span: Optional[tuple] = None

    def to_json(self):
        out = {
            "rule": self.rule,
            "path": list(self.path),
            "dir": self.direction,
            "bindings": bindings_to_json(self.bindings),
        }
        if self.span is not None:
            out["span"] = list(self.span)
        return out

    @classmethod
    def from_json(cls, obj):
        span = obj.get("span")
        return cls(
            obj["rule"],
            bindings_from_json(obj.get("bindings", {})),
            tuple(obj.get("path", ())),
            obj.get("dir", FWD),
            tuple(span) if span is not None else None,
        )


def bindings_to_json(bindings):
    out = {}
    for k, v in bindings.items():
        if isinstance(v, Diagram):
            out[k] = {"term": to_text(v)}
        else:
            out[k] = v
    return out


def bindings_from_json(obj):
    return {k: parse(v["term"]) if isinstance(v, dict) else v for k, v in obj.items()}


# ------------------------------------------------------------- helpers


def _kids(d, kind):
    return d.children if isinstance(d, kind) else (d,)


def split_par(d, n, scalars="top"):
    """Split a flattened term into a top part on ``n`` wires and the rest.

    Returns None when a non-identity child straddles the boundary. Zero-wire
    children go to the side named by ``scalars``.
    """
    kids = _kids(d, Par)
    zero = [k for k in kids if not isinstance(k, Id) and wires(k) == 0]
    top, bottom, used = [], [], 0
    for k in kids:
        if k in zero:
            continue
        w = wires(k)
        if used >= n:
            bottom.append(k)
        elif used + w <= n:
            top.append(k)
        elif isinstance(k, Id):
            top.append(Id(n - used))
            bottom.append(Id(used + w - n))
        else:
            return None
        used += w
    if used < n:
        return None
    (top if scalars == "top" else bottom)[:0] = zero
    return flatten(Par(top)), flatten(Par(bottom))


def _padded_swap(d):
    """Read ``Par(Id(a), Swap(q, p), Id(b))`` as ``(a, q, p, b)``."""
    kids = list(_kids(d, Par))
    swaps = [i for i, k in enumerate(kids) if isinstance(k, Swap)]
    if len(swaps) != 1:
        return None
    i = swaps[0]
    rest = kids[:i] + kids[i + 1:]
    if not all(isinstance(k, Id) for k in rest) or len(kids[:i]) > 1 or len(kids[i + 1:]) > 1:
        return None
    a = kids[0].n if i == 1 else 0
    b = kids[-1].n if i < len(kids) - 1 else 0
    return a, kids[i].n, kids[i].m, b


def _ctrl_body(d, depth=1):
    for _ in range(depth):
        if not isinstance(d, Ctrl):
            return None
        d = d.body
    return d


def conjugation(f, g):
    """Both sides of the conjugation law: ``C(g; f; g^dag)`` and its pushout."""
    gd = dagger(g)
    return Ctrl(Seq(g, f, gd)), Seq(Par(Id(1), g), Ctrl(f), Par(Id(1), gd))


# ------------------------------------------------------- primitive rules


def _angle_rule(name, dialect, lhs, rhs, params=(), **kw):
    return Rule(name, dialect, lhs, rhs, tuple(params), **kw)


def _euler_matcher(dialect):
    def matcher(side, term, given):
        if side != "lhs":
            return None
        angles = match_euler(term, dialect)
        return None if angles is None else {"a1": angles[0], "a2": angles[1]}

    return matcher


def _euler_rule(name, dialect):
    return Rule(
        name,
        dialect,
        lambda b: C.euler_lhs(b["a1"], b["a2"], dialect),
        lambda b: C.euler_rhs(*euler_params(b["a1"], b["a2"]).betas, dialect),
        ("a1", "a2"),
        reversible=False,
        matcher=_euler_matcher(dialect),
        description="H Z H Z H as a phase times Z H Z H Z",
    )


def _cqc_primitives():
    q = Dialect.CQC
    cz = C.cz()
    return [
        _angle_rule("2pi", q, lambda b: Phase(2 * PI), lambda b: Id(0)),
        _angle_rule(
            "addition",
            q,
            lambda b: Seq(Phase(b["a1"]), Phase(b["a2"])),
            lambda b: Phase(b["a1"] + b["a2"]),
            ("a1", "a2"),
            lhs_alts=(lambda b: Par(Phase(b["a1"]), Phase(b["a2"])),),
        ),
        _angle_rule("swap", q, lambda b: Swap(1, 1), lambda b: C.swap_def(q)),
        _angle_rule("hh", q, lambda b: Seq(H, H), lambda b: Id(1)),
        _euler_rule("euler", q),
        _angle_rule(
            "conjhcalpha",
            q,
            lambda b: conjugation(Ctrl(Phase(b["a"])), H)[0],
            lambda b: conjugation(Ctrl(Phase(b["a"])), H)[1],
            ("a",),
        ),
        _angle_rule(
            "conjcalphah",
            q,
            lambda b: conjugation(H, Ctrl(Phase(b["a"])))[0],
            lambda b: conjugation(H, Ctrl(Phase(b["a"])))[1],
            ("a",),
        ),
        _angle_rule(
            "conjhccpi",
            q,
            lambda b: conjugation(cz, Par(H, Id(1)))[0],
            lambda b: conjugation(cz, Par(H, Id(1)))[1],
        ),
        _angle_rule(
            "conjccpih",
            q,
            lambda b: conjugation(Par(Id(1), H), cz)[0],
            lambda b: conjugation(Par(Id(1), H), cz)[1],
        ),
    ]


def _qc_primitives(n_max=6):
    q = Dialect.QC
    rules = [
        _angle_rule("2pibare", q, lambda b: Phase(2 * PI), lambda b: Id(0)),
        _angle_rule(
            "additionbare",
            q,
            lambda b: Seq(Phase(b["a1"]), Phase(b["a2"])),
            lambda b: Phase(b["a1"] + b["a2"]),
            ("a1", "a2"),
            lhs_alts=(lambda b: Par(Phase(b["a1"]), Phase(b["a2"])),),
        ),
        _angle_rule("swapbare", q, lambda b: Swap(1, 1), lambda b: C.swap_def(q)),
        _angle_rule("hhbare", q, lambda b: Seq(H, H), lambda b: Id(1)),
        _euler_rule("eulerbare", q),
        _angle_rule("0bare", q, lambda b: Z(0.0), lambda b: Id(1)),
        _angle_rule(
            "cadditionbare",
            q,
            lambda b: Seq(Z(b["a1"]), Z(b["a2"])),
            lambda b: Z(b["a1"] + b["a2"]),
            ("a1", "a2"),
        ),
        _angle_rule(
            "zcommutbare",
            q,
            lambda b: Seq(CNOT, Par(Z(b["a"]), Id(1)), CNOT),
            lambda b: Par(Z(b["a"]), Id(1)),
            ("a",),
        ),
        _angle_rule(
            "czbare",
            q,
            lambda b: Seq(Par(Id(1), H), CNOT, Par(Id(1), H)),
            lambda b: C.lambda_circuit(2, PI),
        ),
    ]
    for n in range(3, n_max + 1):
        rules.append(
            _angle_rule(
                f"mc2pibare_{n}",
                q,
                lambda b, n=n: C.lambda_circuit(n, 2 * PI),
                lambda b, n=n: Id(n),
            )
        )
    return rules


# ------------------------------------------------------- coherence rules


def _rand_f(rng, lo=0, hi=2):
    """A random cqc diagram that does not flatten to an identity."""
    while True:
        f = flatten(random_diagram(rng, wires=rng.randint(lo, hi), depth=4, dialect=Dialect.CQC, max_ctrl=1))
        if not isinstance(f, Id):
            return f


def _naturality():
    def lhs(b):
        f, k = b["f"], b["k"]
        return Seq(Par(f, Id(k)), Swap(wires(f), k))

    def rhs(b):
        f, k = b["f"], b["k"]
        return Seq(Swap(wires(f), k), Par(Id(k), f))

    def matcher(side, term, given):
        kids = _kids(term, Seq)
        if len(kids) < 2:
            return None
        s = kids[-1] if side == "lhs" else kids[0]
        body = kids[:-1] if side == "lhs" else kids[1:]
        if not isinstance(s, Swap):
            return None
        n, k = s.n, s.m
        # f may have been spliced into the surrounding Seq by flattening
        fs = []
        for a in body:
            parts = split_par(a, n if side == "lhs" else k, "top" if side == "lhs" else "bottom")
            if parts is None:
                return None
            f, rest = parts if side == "lhs" else parts[::-1]
            if rest != flatten(Id(k)) or wires(f) != n:
                return None
            fs.append(f)
        return {"f": flatten(Seq(fs)), "k": k}

    return Rule(
        "naturality", None, lhs, rhs, kind=COHERENCE, matcher=matcher,
        sampler=lambda rng: {"f": _rand_f(rng, 1, 2), "k": rng.randint(0, 2)},
        description="a gate slides through a swap",
    )


def _involution():
    def matcher(side, term, given):
        if side == "lhs":
            if isinstance(term, Seq) and len(term.children) == 2:
                s, t = term.children
                if isinstance(s, Swap) and t == Swap(s.m, s.n):
                    return {"n": s.n, "m": s.m}
            return None
        if "n" in given and "m" in given and term == flatten(Id(given["n"] + given["m"])):
            return {"n": given["n"], "m": given["m"]}
        return None

    return Rule(
        "involution", None,
        lambda b: Seq(Swap(b["n"], b["m"]), Swap(b["m"], b["n"])),
        lambda b: Id(b["n"] + b["m"]),
        kind=COHERENCE, matcher=matcher,
        sampler=lambda rng: {"n": rng.randint(0, 3), "m": rng.randint(0, 3)},
    )


def _swap_expand():
    def matcher(side, term, given):
        if side == "lhs":
            return {"n": term.n, "m": term.m} if isinstance(term, Swap) else None
        if "n" in given and "m" in given:
            if term == flatten(swap_lattice(given["n"], given["m"])):
                return {"n": given["n"], "m": given["m"]}
        return None

    return Rule(
        "swapexpand", None,
        lambda b: Swap(b["n"], b["m"]),
        lambda b: swap_lattice(b["n"], b["m"]),
        kind=COHERENCE, matcher=matcher,
        sampler=lambda rng: {"n": rng.randint(0, 3), "m": rng.randint(0, 3)},
        description="block swaps as lattices of wire crossings; empty sides vanish",
    )


def _ctrl_seq():
    def rhs(b):
        f = flatten(b["f"])
        return Seq([Ctrl(c) for c in _kids(f, Seq)])

    def matcher(side, term, given):
        if side == "lhs":
            body = _ctrl_body(term)
            return {"f": body} if isinstance(body, Seq) else None
        kids = _kids(term, Seq)
        if len(kids) >= 2 and all(isinstance(k, Ctrl) for k in kids):
            return {"f": flatten(Seq([k.body for k in kids]))}
        return None

    return Rule(
        "ctrlseq", Dialect.CQC, lambda b: Ctrl(b["f"]), rhs,
        kind=COHERENCE, matcher=matcher,
        sampler=lambda rng: {"f": Seq(_rand_f(rng, 1, 1), _rand_f(rng, 1, 1))},
        description="the control functor preserves composition",
    )


def _strength():
    def matcher(side, term, given):
        if side == "lhs":
            body = _ctrl_body(term)
            if not isinstance(body, Par) or not isinstance(body.children[-1], Id):
                return None
            k = body.children[-1].n
            return {"f": flatten(Par(body.children[:-1])), "k": k}
        if not isinstance(term, Par) or len(term.children) != 2:
            return None
        c, i = term.children
        if isinstance(c, Ctrl) and isinstance(i, Id):
            return {"f": c.body, "k": i.n}
        return None

    return Rule(
        "strength", Dialect.CQC,
        lambda b: Ctrl(Par(b["f"], Id(b["k"]))),
        lambda b: Par(Ctrl(b["f"]), Id(b["k"])),
        kind=COHERENCE, matcher=matcher,
        sampler=lambda rng: {"f": _rand_f(rng, 0, 2), "k": rng.randint(1, 2)},
    )


def _controlswap():
    def parts(b):
        f = b["f"]
        return Par(Swap(1, 1), Id(wires(f))), Ctrl(Ctrl(f))

    def matcher(side, term, given):
        if not isinstance(term, Seq) or len(term.children) != 2:
            return None
        s, c = term.children if side == "lhs" else term.children[::-1]
        f = _ctrl_body(c, 2)
        if f is None or s != flatten(Par(Swap(1, 1), Id(wires(f)))):
            return None
        return {"f": f}

    return Rule(
        "controlswap", Dialect.CQC,
        lambda b: Seq(*parts(b)),
        lambda b: Seq(*reversed(parts(b))),
        kind=COHERENCE, matcher=matcher,
        sampler=lambda rng: {"f": _rand_f(rng, 0, 2)},
        description="two controls may be exchanged",
    )


def _swapconjugation():
    def sw(b, pad):
        k, p, q, l = b["k"], b["p"], b["q"], b["l"]
        return Par(Id(k + pad), Swap(q, p), Id(l)), Par(Id(k + pad), Swap(p, q), Id(l))

    def lhs(b):
        s, t = sw(b, 1)
        return Seq(s, Ctrl(b["f"]), t)

    def rhs(b):
        s, t = sw(b, 0)
        return Ctrl(Seq(s, b["f"], t))

    def matcher(side, term, given):
        if side == "lhs":
            if not isinstance(term, Seq) or len(term.children) != 3:
                return None
            s, c, t = term.children
            f = _ctrl_body(c)
            pad = 1
        else:
            body = _ctrl_body(term)
            if not isinstance(body, Seq) or len(body.children) < 2:
                return None
            s, t = body.children[0], body.children[-1]
            f = flatten(Seq(body.children[1:-1])) if len(body.children) > 2 else None
            pad = 0
        sp = _padded_swap(s)
        if sp is None or sp[0] < pad:
            return None
        b = {"k": sp[0] - pad, "q": sp[1], "p": sp[2], "l": sp[3]}
        if f is None:
            f = Id(b["k"] + b["p"] + b["q"] + b["l"])
        b["f"] = f
        if flatten(sw(b, pad)[1]) != t or wires(f) != b["k"] + b["p"] + b["q"] + b["l"]:
            return None
        return b

    def sampler(rng):
        k, l = rng.randint(0, 1), rng.randint(0, 1)
        p, q = rng.randint(1, 2), rng.randint(1, 2)
        n = k + p + q + l
        return {"k": k, "p": p, "q": q, "l": l, "f": _rand_f(rng, n, n)}

    return Rule(
        "swapconjugation", Dialect.CQC, lhs, rhs,
        kind=COHERENCE, matcher=matcher, sampler=sampler,
        description="a swap conjugation moves into and out of a control",
    )


def coherence_rules():
    return [
        _naturality(),
        _involution(),
        _swap_expand(),
        _ctrl_seq(),
        _strength(),
        _controlswap(),
        _swapconjugation(),
    ]


# --------------------------------------------------------- derived rules


def _derived_candidates():
    q = Dialect.CQC
    cz = C.cz()
    heuler = C.euler_rhs(*euler_params(0.0, 0.0).betas, q)
    return [
        _angle_rule("0", q, lambda b: Ctrl(Phase(0.0)), lambda b: Id(1), kind=DERIVED),
        _angle_rule("minuspi", q, lambda b: Phase(-PI), lambda b: Phase(PI), kind=DERIVED),
        _angle_rule("heuler", q, lambda b: H, lambda b: heuler, kind=DERIVED),
        _angle_rule(
            "xcalpha",
            q,
            lambda b: Seq(H, Ctrl(Phase(PI)), H, Ctrl(Phase(b["a"])), H, Ctrl(Phase(PI)), H),
            lambda b: Par(Phase(b["a"]), Ctrl(Phase(-b["a"]))),
            ("a",),
            kind=DERIVED,
        ),
        _angle_rule("heulervar", q, lambda b: H, lambda b: dagger(heuler), kind=DERIVED),
        _angle_rule(
            "conjhh", q,
            lambda b: conjugation(H, H)[0], lambda b: conjugation(H, H)[1], kind=DERIVED,
        ),
        _angle_rule(
            "conjhccpi_var", q,
            lambda b: conjugation(cz, Par(Id(1), H))[0],
            lambda b: conjugation(cz, Par(Id(1), H))[1],
            kind=DERIVED,
        ),
        _angle_rule(
            "conjccpih_var", q,
            lambda b: conjugation(Par(H, Id(1)), cz)[0],
            lambda b: conjugation(Par(H, Id(1)), cz)[1],
            kind=DERIVED,
        ),
        _angle_rule("chreduce", q, lambda b: Ctrl(H), lambda b: C.ch_reduced(), kind=DERIVED),
        _angle_rule(
            "ccalphareduce",
            q,
            lambda b: ctrl_n(Phase(b["a"]), 2),
            lambda b: C.mu_circuit(2, b["a"]),
            ("a",),
            guard=lambda b: not is_pi(b["a"]),
            kind=DERIVED,
        ),
        _angle_rule(
            "cccpireduce", q,
            lambda b: ctrl_n(Phase(PI), 3), lambda b: C.ccc_pi_reduced(), kind=DERIVED,
        ),
    ]


# ------------------------------------------------------------ soundness


@dataclass(frozen=True)
class SoundnessReport:
    rule: str
    samples: int
    max_diff: float
    frobenius: float
    passed: bool
    failure: Optional[dict] = None

    def to_json(self):
        return {
            "rule": self.rule,
            "samples": self.samples,
            "max_diff": self.max_diff,
            "frobenius": self.frobenius,
            "passed": self.passed,
            "failure": bindings_to_json(self.failure) if self.failure else None,
        }


def _draw(rule, rng, tries=100):
    for _ in range(tries):
        b = rule.sample(rng)
        if rule.guard is None or rule.guard(b):
            return b
    raise RuntimeError(f"could not sample bindings satisfying the guard of {rule.name}")


def soundness_check(rule, samples=100, tol=DEFAULT_TOL, seed=0):
    """Compare both sides of ``rule`` on ``samples`` random bindings."""
    tol = check_tolerance(tol)
    rng = random.Random(f"{rule.name}:{seed}")
    n = 1 if rule.deterministic else samples
    worst, worst_fro, failure = 0.0, 0.0, None
    for _ in range(n):
        b = _draw(rule, rng)
        left, right = rule.build("lhs", b), rule.build("rhs", b)
        ml, mr = local_matrix(left), local_matrix(right)
        if ml.shape != mr.shape:
            return SoundnessReport(rule.name, n, math.inf, math.inf, False, b)
        diff = max_abs_diff(ml, mr)
        fro = float(np.linalg.norm(ml - mr))
        if diff > worst:
            worst, worst_fro = diff, fro
            if diff > tol:
                failure = b
    return SoundnessReport(rule.name, n, worst, worst_fro, failure is None, failure)


# ------------------------------------------------------------- registry

_DERIVED = None


def derived_rules(samples=500, tol=DEFAULT_TOL):
    """Derived equations, each validated on registration."""
    global _DERIVED
    if _DERIVED is None:
        rules = []
        for rule in _derived_candidates():
            report = soundness_check(rule, samples, tol)
            if not report.passed:
                raise RegistrationFailed(rule.name, report.max_diff)
            rules.append(rule)
        _DERIVED = rules
    return list(_DERIVED)


def builtin_rules(dialect, n_max=6):
    """Primitive relations of ``dialect`` plus the shared coherence helpers."""
    dialect = Dialect.coerce(dialect)
    prims = _qc_primitives(n_max) if dialect is Dialect.QC else _cqc_primitives()
    coh = [r for r in coherence_rules() if r.dialect in (None, dialect)]
    return prims + coh


_REGISTRY = None


def registry():
    global _REGISTRY
    if _REGISTRY is None:
        rules = builtin_rules(Dialect.QC) + _cqc_primitives() + derived_rules()
        rules += [r for r in coherence_rules() if r.dialect is Dialect.CQC]
        _REGISTRY = {r.name: r for r in rules}
    return _REGISTRY


def get_rule(name):
    try:
        return registry()[name]
    except KeyError:
        raise KeyError(f"unknown rule {name!r}") from None


# ------------------------------------------------------------ matching


def _target(d, path, span):
    node = subterm_at(d, path)
    if span is None:
        return node
    if not isinstance(node, (Seq, Par)):
        raise NoMatch(f"span {span} given but {node!r} has no child list")
    start, stop = span
    if not 0 <= start < stop <= len(node.children):
        raise NoMatch(f"span {span} out of range for {len(node.children)} children")
    return flatten(type(node)(node.children[start:stop]))


def match_rule(rule, d, path=(), direction=FWD, span=None, given=None):
    """Bindings making one side of ``rule`` equal the subterm, or None."""
    if isinstance(rule, str):
        rule = get_rule(rule)
    if direction == BWD and not rule.reversible:
        return None
    try:
        term = _target(d, tuple(path), span)
    except (NoMatch, LookupError):
        return None
    side = "lhs" if direction == FWD else "rhs"
    given = dict(given or {})
    if given:
        # bindings recorded by an earlier step rebuild the term exactly
        try:
            if rule.build(side, given) == term and (rule.guard is None or rule.guard(given)):
                return given
        except (KeyError, TypeError, ValueError):
            pass
    if rule.matcher is not None:
        b = rule.matcher(side, term, given)
        if b is not None:
            b = {**given, **b}
    else:
        b = None
        for pattern in rule.patterns(side):
            b = match(pattern, term, {k: v for k, v in given.items() if k in rule.params})
            if b is not None:
                break
        if b is not None and any(p not in b for p in rule.params):
            b = None
    if b is None:
        return None
    if rule.guard is not None and not rule.guard(b):
        return None
    return b


def find_matches(rule, d, direction=FWD):
    """Every ``(path, span, bindings)`` at which ``rule`` applies."""
    from .diagram import iter_subterms

    if isinstance(rule, str):
        rule = get_rule(rule)
    d = flatten(d)
    out = []
    for path, node in iter_subterms(d):
        b = match_rule(rule, d, path, direction)
        if b is not None:
            out.append((path, None, b))
        if isinstance(node, (Seq, Par)):
            n = len(node.children)
            for size in range(1, n):
                for start in range(n - size + 1):
                    b = match_rule(rule, d, path, direction, (start, start + size))
                    if b is not None:
                        out.append((path, (start, start + size), b))
    return out


def apply_rule(d, inst, check=True, tol=DEFAULT_TOL):
    """Rewrite ``d`` at ``inst.path``; return ``(new_diagram, TraceStep)``."""
    rule = get_rule(inst.rule) if isinstance(inst.rule, str) else inst.rule
    d = flatten(d)
    path = tuple(inst.path)
    b = match_rule(rule, d, path, inst.direction, inst.span, inst.bindings)
    if b is None:
        raise NoMatch(f"rule {rule.name} ({inst.direction}) does not match at {list(path)}")
    target = _target(d, path, inst.span)
    replacement = rule.build("rhs" if inst.direction == FWD else "lhs", b)
    if check:
        diff = max_abs_diff(local_matrix(target), local_matrix(replacement))
        if diff > tol:
            raise SemanticDriftError(f"rule {rule.name}", diff)
    if inst.span is not None:
        node = subterm_at(d, path)
        start, stop = inst.span
        replacement = type(node)(node.children[:start] + (replacement,) + node.children[stop:])
    out = flatten(replace_at(d, path, replacement))
    done = RuleInstance(rule.name, b, path, inst.direction, inst.span)
    return out, TraceStep(done, diagram_hash(out))


# -------------------------------------------------------------- traces


class ReplayError(ValueError):
    pass


@dataclass(frozen=True)
class TraceStep:
    instance: RuleInstance
    post_hash: str

    def to_json(self):
        return {**self.instance.to_json(), "hash": self.post_hash}


@dataclass
class ProofTrace:
    """Derivation from ``initial`` to ``final``, one rule application per step."""

    dialect: Dialect
    initial: Diagram
    steps: list = field(default_factory=list)
    final: Optional[Diagram] = None

    def __post_init__(self):
        self.dialect = Dialect.coerce(self.dialect)
        self.initial = flatten(self.initial)
        if self.final is None:
            self.final = self.initial

    @property
    def initial_hash(self):
        return diagram_hash(self.initial)

    def apply(self, rule, path=(), direction=FWD, bindings=None, span=None, check=True):
        """Extend the derivation by one step; returns self for chaining."""
        inst = RuleInstance(rule, dict(bindings or {}), tuple(path), direction, span)
        self.final, step = apply_rule(self.final, inst, check=check)
        self.steps.append(step)
        return self

    def replay(self, check=True):
        d = self.initial
        for i, step in enumerate(self.steps):
            d, redo = apply_rule(d, step.instance, check=check)
            if redo.post_hash != step.post_hash:
                raise ReplayError(f"step {i} ({step.instance.rule}) produced {redo.post_hash}")
        if diagram_hash(d) != diagram_hash(self.final):
            raise ReplayError("replay does not reach the recorded final diagram")
        return d

    def to_json(self):
        return {
            "dialect": self.dialect.value,
            "initial": to_text(self.initial),
            "initial_hash": self.initial_hash,
            "steps": [s.to_json() for s in self.steps],
            "final": to_text(self.final),
        }

    @classmethod
    def from_json(cls, obj):
        steps = [TraceStep(RuleInstance.from_json(s), s.get("hash", "")) for s in obj["steps"]]
        return cls(obj["dialect"], parse(obj["initial"]), steps, flatten(parse(obj["final"])))


