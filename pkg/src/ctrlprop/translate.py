"""Reduction to the gate set G, and the translations between cqc and qc.

``g_reduce`` rewrites a cqc diagram into Seq/Par composites of G members:
swaps are split into crossings and replaced by their CNOT definition, and
controls are pushed inward (through Seq by functoriality, through Par by the
interchange and strength laws, past idle wires by swap conjugation) until
they reach a gate, where the control-reducing equations apply.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from . import circuits as C
from .angles import is_pi
from .diagram import (
    CNOT,
    approx_equal,
    Cnot,
    Ctrl,
    Dialect,
    Hadamard,
    Id,
    Par,
    Phase,
    Seq,
    Swap,
    Z,
    dagger,
    flatten,
    validate_dialect,
    wires,
)
from .errors import ArityMismatch, DialectError, NonTermination, NotInFragment
from .semantics import DEFAULT_TOL, check_tolerance, interpret, max_abs_diff
from .structure import fragment_violations, gate_kind, in_gate_set
from .syntax import diagram_hash, to_text

DEFAULT_BUDGET = 10**6

# -------------------------------------------------------------- swaps


def swap_split(n, m):
    """One decomposition step of a block swap on ``n + m`` wires.

    With ``n = a + b`` and ``m = c + d`` (``a = c = 1`` when possible) the
    swap becomes ``(id_a x s(b,c) x id_d); (s(a,c) x s(b,d)); (id_c x s(a,d) x id_b)``.
    """
    a, b = (1, n - 1) if n else (0, 0)
    c, d = (1, m - 1) if m else (0, 0)
    return Seq(
        Par(Id(a), Swap(b, c), Id(d)),
        Par(Swap(a, c), Swap(b, d)),
        Par(Id(c), Swap(a, d), Id(b)),
    )


def swap_crossings(n, m, crossing):
    """Expand ``Swap(n, m)`` recursively; ``crossing`` replaces Swap(1, 1)."""
    if n == 0 or m == 0:
        return Id(n + m)
    if n == 1 and m == 1:
        return crossing
    parts = swap_split(n, m)
    return Seq(
        [Par([swap_crossings(s.n, s.m, crossing) if isinstance(s, Swap) else s for s in layer.children])
         for layer in parts.children]
    )


# ----------------------------------------------------------- reduction


@dataclass
class ReductionTrace:
    """Gadget expansions performed by :func:`g_reduce`, in order."""

    initial: str = ""
    final: str = ""
    events: list = field(default_factory=list)
    budget: int = DEFAULT_BUDGET

    def record(self, rule, subject):
        self.events.append((rule, subject))
        if len(self.events) > self.budget:
            raise NonTermination(self.budget)

    def counts(self):
        out = {}
        for rule, _ in self.events:
            out[rule] = out.get(rule, 0) + 1
        return out

    def to_json(self, limit=None):
        events = self.events if limit is None else self.events[:limit]
        return {
            "initial": self.initial,
            "final_hash": diagram_hash_text(self.final),
            "steps": [{"rule": r, "at": s} for r, s in events],
            "counts": self.counts(),
            "truncated": limit is not None and len(self.events) > limit,
        }


def diagram_hash_text(text):
    import hashlib

    return hashlib.sha256(text.encode()).hexdigest()[:16]


def conjugation_depth(kids):
    """Largest k with ``kids[-1-j] == dagger(kids[j])`` for all j < k."""
    k = 0
    while 2 * (k + 1) <= len(kids) and flatten(dagger(kids[k])) == kids[len(kids) - 1 - k]:
        k += 1
    return k


class _Reducer:
    """Pushes a pending stack of ``k`` controls down the term.

    Controls are accumulated rather than expanded level by level, so a gate
    under ``k`` controls is reduced once, by unfolding ``C^k`` directly.
    """

    def __init__(self, trace):
        self.trace = trace
        self.gate_cache = {}
        self.swap_cache = {}

    def swap(self, n, m):
        key = (n, m)
        if key not in self.swap_cache:
            if n == 0 or m == 0:
                self.trace.record("idswap", f"swap({n},{m})")
            elif (n, m) != (1, 1):
                self.trace.record("perminduc", f"swap({n},{m})")
            self.trace.record("swap", f"swap({n},{m})")
            self.swap_cache[key] = flatten(swap_crossings(n, m, C.swap_def(Dialect.CQC)))
        return self.swap_cache[key]

    def reduce(self, d):
        return self.push(0, d)

    def push(self, k, d):
        """A G-fragment term equal to ``C^k(d)``."""
        if isinstance(d, Id):
            return Id(d.n + k)
        if isinstance(d, Ctrl):
            return self.push(k + 1, d.body)
        if isinstance(d, Seq):
            kids = d.children
            if k:
                j = conjugation_depth(kids)
                if j:
                    # only the conjugated core needs the controls
                    self.trace.record("conjugation", f"k={j}")
                    core = kids[j:len(kids) - j]
                    inner = self.push(k, flatten(Seq(core))) if core else Id(wires(d) + k)
                    pre = [Par(Id(k), self.push(0, x)) for x in kids[:j]]
                    post = [Par(Id(k), self.push(0, x)) for x in kids[len(kids) - j:]]
                    return flatten(Seq(pre + [inner] + post))
                self.trace.record("ctrlseq", f"seq/{len(kids)}")
            return flatten(Seq([self.push(k, c) for c in kids]))
        if isinstance(d, Par):
            if not k:
                return flatten(Par([self.push(0, c) for c in d.children]))
            self.trace.record("interchange", f"par/{len(d.children)}")
            total, offset, layers = wires(d), 0, []
            for c in d.children:
                w = wires(c)
                if not isinstance(c, Id):
                    layers.append(self.padded(k, c, offset, total - offset - w))
                offset += w
            return flatten(Seq(layers)) if layers else Id(total + k)
        if isinstance(d, Swap):
            if not k:
                return self.swap(d.n, d.m)
            if d.n == 0 or d.m == 0:
                self.trace.record("idswap", f"swap({d.n},{d.m})")
                return Id(d.n + d.m + k)
            if (d.n, d.m) != (1, 1):
                self.trace.record("perminduc", f"swap({d.n},{d.m})")
                return self.push(k, flatten(swap_crossings(d.n, d.m, Swap(1, 1))))
            return self.gate(k, d)
        if isinstance(d, (Phase, Hadamard)):
            return self.gate(k, d)
        if isinstance(d, (Z, Cnot)):
            raise DialectError([((), f"{type(d).__name__} is not a cqc generator")])
        raise NotInFragment((), d)

    def padded(self, k, x, p, q):
        """``C^k(id_p x x x id_q)``: strength drops ``id_q``, then the controls
        are routed past ``id_p`` by conjugating with block swaps."""
        w = wires(x)
        if w == 0:
            # a scalar commutes with everything, so its offset is irrelevant
            return flatten(Par(self.push(k, x), Id(p + q)))
        if q:
            self.trace.record("strength", f"k={q}")
        inner = self.push(k, x)
        if p:
            self.trace.record("swapconjugation", f"p={p}")
            inner = Seq(
                Par(self.swap(k, p), Id(w)),
                Par(Id(p), inner),
                Par(self.swap(p, k), Id(w)),
            )
        return flatten(Par(inner, Id(q)))

    def gate(self, k, x):
        """``C^k(x)`` for a phase, a Hadamard or a single crossing."""
        key = (k, x)
        if key in self.gate_cache:
            return self.gate_cache[key]
        if isinstance(x, Phase):
            a = x.angle
            if k <= 1 or (k == 2 and is_pi(a)):
                out = x
                for _ in range(k):
                    out = Ctrl(out)
            elif k == 2:
                self.trace.record("ccalphareduce", f"C(C(C(ph({a!r}))))")
                out = self.push(0, C.mu_circuit(2, a))
            elif k == 3 and is_pi(a):
                self.trace.record("cccpireduce", "C(C(C(pi)))")
                out = self.push(0, C.ccc_pi_reduced())
            else:
                self.trace.record("ctrlunfolding", f"k={k}")
                out = self.push(0, C.mu_circuit(k, a))
        elif isinstance(x, Hadamard):
            if k == 0:
                out = x
            else:
                self.trace.record("chreduce", f"k={k}")
                out = self.push(k - 1, C.ch_reduced())
        else:
            self.trace.record("swap", "swap(1,1)")
            out = self.push(k, C.swap_def(Dialect.CQC))
        out = flatten(out)
        self.gate_cache[key] = out
        return out


def cancel_inverses(d, trace=None):
    """Drop adjacent ``x; dagger(x)`` pairs from every sequence, repeatedly."""
    if isinstance(d, Par):
        return flatten(Par([cancel_inverses(c, trace) for c in d.children]))
    if not isinstance(d, Seq):
        return d
    stack = []
    for c in d.children:
        c = cancel_inverses(c, trace)
        if stack and approx_equal(stack[-1], _inverse(c)):
            stack.pop()
            if trace is not None:
                trace.record("cancel", to_text(c))
        else:
            stack.append(c)
    return flatten(Seq(stack)) if stack else Id(wires(d))


_INVERSES = {}


def _inverse(x):
    inv = _INVERSES.get(x)
    if inv is None:
        inv = _INVERSES[x] = flatten(dagger(x))
    return inv


def g_reduce(d, budget=DEFAULT_BUDGET, with_trace=False, peephole=True):
    """Rewrite a cqc diagram into the G fragment (no swaps, only G gates)."""
    violations = validate_dialect(d, Dialect.CQC)
    if violations:
        raise DialectError(violations)
    trace = ReductionTrace(initial=to_text(flatten(d)), budget=budget)
    out = _Reducer(trace).reduce(flatten(d))
    if peephole:
        out = cancel_inverses(out, trace)
    bad = fragment_violations(out)
    if bad:  # the reducer only emits G gates; reaching this is a bug
        raise NotInFragment(*bad[0])
    trace.final = to_text(out)
    return (out, trace) if with_trace else out


# ---------------------------------------------------- encode / decode


def _hccpih():
    return Seq(Par(Id(1), Hadamard()), Ctrl(Ctrl(Phase(math.pi))), Par(Id(1), Hadamard()))


def encode(d):
    """Translate a G-fragment cqc diagram into qc."""

    def walk(node, path):
        if isinstance(node, (Seq, Par)):
            return type(node)([walk(c, path + (i,)) for i, c in enumerate(node.children)])
        kind = gate_kind(node)
        if kind in ("id", "phase", "h"):
            return node
        if kind == "cphase":
            return Z(node.body.angle)
        if kind == "ccpi":
            return Seq(Par(Id(1), Hadamard()), CNOT, Par(Id(1), Hadamard()))
        raise NotInFragment(path, node)

    return flatten(walk(flatten(d), ()))


def decode(d):
    """Translate a qc diagram into the G fragment of cqc."""
    if isinstance(d, Swap):
        return flatten(swap_crossings(d.n, d.m, C.swap_def(Dialect.CQC)))
    if isinstance(d, (Seq, Par)):
        return flatten(type(d)([decode(c) for c in d.children]))
    if isinstance(d, Z):
        return Ctrl(Phase(d.angle))
    if isinstance(d, Cnot):
        return flatten(_hccpih())
    if isinstance(d, Ctrl):
        raise DialectError([((), "Ctrl is not a qc constructor")])
    return d


# ------------------------------------------------------------ pipeline


@dataclass
class Stage:
    name: str
    ok: bool
    diff: float
    kind: str = "check"  # "check" stages must hold; "verdict" stages report equality

    def to_json(self):
        return {"name": self.name, "ok": self.ok, "diff": self.diff, "kind": self.kind}


@dataclass
class WitnessReport:
    equal: bool
    max_diff: float
    stages: list
    traces: dict
    reduced: Optional[tuple] = None

    @property
    def chain_valid(self):
        return all(s.ok for s in self.stages if s.kind == "check")

    def to_json(self, trace_limit=200):
        return {
            "equal": self.equal,
            "max_diff": self.max_diff,
            "chain_valid": self.chain_valid,
            "stages": [s.to_json() for s in self.stages],
            "traces": {k: t.to_json(trace_limit) for k, t in self.traces.items()},
        }


def _branch(c, tag, tol):
    reduced, trace = g_reduce(c, with_trace=True)
    m_c = interpret(c, Dialect.CQC)
    m_red = interpret(reduced, Dialect.CQC)
    enc = encode(reduced)
    m_enc = interpret(enc, Dialect.QC)
    m_dec = interpret(decode(enc), Dialect.CQC)
    d1 = max_abs_diff(m_c, m_red)
    frag = not fragment_violations(reduced) and in_fragment_strict(reduced)
    d2 = max_abs_diff(m_enc, m_red)
    d3 = max_abs_diff(m_dec, m_red)
    stages = [
        Stage(f"g_reduce_{tag}", d1 <= tol and frag, d1),
        Stage(f"encode_{tag}", d2 <= tol, d2),
        Stage(f"decode_encode_{tag}", d3 <= tol, d3),
    ]
    return reduced, enc, m_enc, trace, stages


def in_fragment_strict(d):
    """G fragment with no swap nodes anywhere."""
    if isinstance(d, (Seq, Par)):
        return all(in_fragment_strict(c) for c in d.children)
    return in_gate_set(d)


def completeness_pipeline(c1, c2, tol=DEFAULT_TOL, jobs=1):
    """Certify (or refute) c1 = c2 through reduction, encoding and decoding."""
    tol = check_tolerance(tol)
    if wires(c1) != wires(c2):
        raise ArityMismatch(f"arity {wires(c1)} vs {wires(c2)}")
    direct = max_abs_diff(interpret(c1, Dialect.CQC), interpret(c2, Dialect.CQC))
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=2) as pool:
            f1 = pool.submit(_branch, c1, "c1", tol)
            f2 = pool.submit(_branch, c2, "c2", tol)
            b1, b2 = f1.result(), f2.result()
    else:
        b1, b2 = _branch(c1, "c1", tol), _branch(c2, "c2", tol)
    qc_diff = max_abs_diff(b1[2], b2[2])
    stages = [Stage("equiv", direct <= tol, direct, "verdict")]
    stages += b1[4] + b2[4]
    stages.append(Stage("qc_equiv", qc_diff <= tol, qc_diff, "verdict"))
    # the two verdicts must agree, otherwise some stage has drifted
    stages.append(Stage("verdicts_agree", (direct <= tol) == (qc_diff <= tol), abs(direct - qc_diff)))
    return WitnessReport(
        equal=direct <= tol and qc_diff <= tol,
        max_diff=direct,
        stages=stages,
        traces={"c1": b1[3], "c2": b2[3]},
        reduced=(b1[0], b2[0]),
    )


__all__ = [
    "g_reduce",
    "encode",
    "decode",
    "completeness_pipeline",
    "WitnessReport",
    "ReductionTrace",
    "swap_split",
    "swap_crossings",
    "diagram_hash",
]
