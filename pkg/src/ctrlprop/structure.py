"""Structural operations of the control functor.

Conjugation pushing, swap conjugation, the gate set G = {id, phase,
C(phase), C(C(pi)), H}, layerization of G-fragment diagrams, and the
pairwise conjugation condition over G.
"""

import math
import random
from dataclasses import dataclass, field

from .angles import is_pi
from .circuits import lambda_circuit, mu_circuit  # noqa: F401  (public re-exports)
from .diagram import Ctrl, Hadamard, Id, Par, Phase, Seq, dagger, flatten, replace_at, subterm_at, wires
from .errors import NoMatch, NotInFragment, SemanticDriftError
from .rules import BWD, FWD, RuleInstance, apply_rule, conjugation, split_par
from .semantics import DEFAULT_TOL, check_tolerance, local_matrix, max_abs_diff

# ----------------------------------------------------------------- gate set


def gate_kind(d):
    """Name of the G schema ``d`` instantiates, or None."""
    if isinstance(d, Id):
        return "id"
    if isinstance(d, Phase):
        return "phase"
    if isinstance(d, Hadamard):
        return "h"
    if isinstance(d, Ctrl):
        if isinstance(d.body, Phase):
            return "cphase"
        if isinstance(d.body, Ctrl) and isinstance(d.body.body, Phase) and is_pi(d.body.body.angle):
            return "ccpi"
    return None


def in_gate_set(d):
    return gate_kind(d) is not None


def fragment_violations(d, path=()):
    """Paths of atoms outside G in a Seq/Par composite of G members."""
    if in_gate_set(d):
        return []
    if isinstance(d, (Seq, Par)):
        out = []
        for i, c in enumerate(d.children):
            out.extend(fragment_violations(c, path + (i,)))
        return out
    return [(path, d)]


def in_fragment(d):
    return not fragment_violations(d)


# ------------------------------------------------------------------- layers


@dataclass(frozen=True)
class Layer:
    left_pad: int
    gate: object
    right_pad: int

    @property
    def wires(self):
        return self.left_pad + wires(self.gate) + self.right_pad

    def to_diagram(self):
        return pad_gate(self.gate, self.left_pad, self.right_pad)


def pad_gate(x, left, right):
    return flatten(Par(Id(left), x, Id(right)))


def layerize(d):
    """Split a G-fragment diagram into one-gate layers, leftmost gate first."""
    d = flatten(d)
    total = wires(d)
    out = []

    def walk(node, path, offset):
        if isinstance(node, Id):
            return
        if in_gate_set(node):
            w = wires(node)
            out.append(Layer(offset, node, total - offset - w))
        elif isinstance(node, Seq):
            for i, c in enumerate(node.children):
                walk(c, path + (i,), offset)
        elif isinstance(node, Par):
            for i, c in enumerate(node.children):
                walk(c, path + (i,), offset)
                offset += wires(c)
        else:
            raise NotInFragment(path, node)

    walk(d, (), 0)
    return out


def assemble(layers, n):
    if not layers:
        return Id(n)
    return flatten(Seq([layer.to_diagram() for layer in layers]))


# -------------------------------------------------------------- conjugation


def _check(before, after, what, tol):
    diff = max_abs_diff(local_matrix(before), local_matrix(after))
    if diff > tol:
        raise SemanticDriftError(what, diff)


def _split_conjugation(body):
    """Find ``(g, f)`` with ``body = g; f; dagger(g)``, taking the longest g."""
    kids = body.children if isinstance(body, Seq) else (body,)
    for k in range(len(kids) // 2, 0, -1):
        g = flatten(Seq(kids[:k]))
        if flatten(dagger(g)) == flatten(Seq(kids[-k:])):
            middle = kids[k:-k]
            f = flatten(Seq(middle)) if middle else Id(wires(body))
            return g, f
    return None


def _unpad(kids):
    """Strip the top identity wire from each of ``kids``; None if impossible."""
    out = []
    for k in kids:
        parts = split_par(k, 1, scalars="bottom")
        if parts is None or parts[0] != Id(1):
            return None
        out.append(parts[1])
    return out


def conjugate_control(d, path=(), direction=FWD, g=None, tol=DEFAULT_TOL):
    """Push a control through a conjugation (forward) or pull it back.

    Forward rewrites ``C(g; f; g^dag)`` to ``(id x g); C(f); (id x g^dag)``.
    The conjugating ``g`` is found syntactically unless given.
    """
    d = flatten(d)
    path = tuple(path)
    node = subterm_at(d, path)
    if direction == FWD:
        if not isinstance(node, Ctrl):
            raise NoMatch(f"expected a controlled subterm at {list(path)}, found {node!r}")
        if g is not None:
            g = flatten(g)
            if isinstance(g, Id):
                return d
            gk = g.children if isinstance(g, Seq) else (g,)
            body = node.body.children if isinstance(node.body, Seq) else (node.body,)
            n = len(gk)
            if len(body) < 2 * n or flatten(Seq(body[:n])) != g or flatten(Seq(body[-n:])) != flatten(dagger(g)):
                raise NoMatch("the given g does not conjugate the controlled body")
            split = (g, flatten(Seq(body[n:-n])) if len(body) > 2 * n else Id(wires(g)))
        else:
            split = _split_conjugation(node.body)
            if split is None:
                raise NoMatch(f"controlled body is not a syntactic conjugation: {node.body!r}")
        new = flatten(conjugation(split[1], split[0])[1])
    elif direction == BWD:
        new = _pull_back(node)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    _check(node, new, "conjugation", tol)
    return flatten(replace_at(d, path, new))


def _pull_back(node):
    kids = node.children if isinstance(node, Seq) else (node,)
    for j, c in enumerate(kids):
        if not isinstance(c, Ctrl):
            continue
        pre, post = _unpad(kids[:j]), _unpad(kids[j + 1:])
        if pre is None or post is None:
            continue
        g = flatten(Seq(pre)) if pre else Id(wires(c) - 1)
        gd = flatten(Seq(post)) if post else Id(wires(c) - 1)
        if flatten(dagger(g)) == gd:
            return flatten(conjugation(c.body, g)[0])
    raise NoMatch(f"not a conjugated controlled gate: {node!r}")


def swap_conjugation(d, path=(), direction=FWD, tol=DEFAULT_TOL):
    """Move a swap conjugation into (forward) or out of (backward) a control."""
    out, _ = apply_rule(d, RuleInstance("swapconjugation", {}, tuple(path), direction), tol=tol)
    return out


# ---------------------------------------------------- conjugation condition

SCHEMAS = ("id", "phase", "cphase", "ccpi", "h")
NAMED = {
    ("h", "cphase", 1): "conjcalphah",
    ("h", "ccpi", 1): "conjccpih_var",
    ("h", "ccpi", 2): "conjccpih",
    ("cphase", "h", 1): "conjhcalpha",
    ("ccpi", "h", 1): "conjhccpi_var",
    ("ccpi", "h", 2): "conjhccpi",
    ("h", "h", 1): "conjhh",
}


def _instances(kind, rng, samples):
    if kind == "id":
        return [Id(1), Id(2)]
    if kind == "h":
        return [Hadamard()]
    if kind == "ccpi":
        return [Ctrl(Ctrl(Phase(math.pi)))]
    angles = [rng.uniform(0, 2 * math.pi) for _ in range(samples)]
    if kind == "phase":
        return [Phase(a) for a in angles]
    return [Ctrl(Phase(a)) for a in angles]


def padded_pair(x, y, i):
    """The padded gates ``f_{x,i}`` and ``g_{y,i}`` of the condition."""
    n, m = wires(x), wires(y)
    f = pad_gate(x, max(0, i - n), max(0, m - i))
    g = pad_gate(y, max(0, n - i), max(0, i - m))
    return f, g


def category(xk, yk, i):
    if {xk, yk} & {"id", "phase"}:
        return "heart"
    if xk in ("cphase", "ccpi") and yk in ("cphase", "ccpi"):
        return "club"
    return NAMED.get((xk, yk, i), "unlisted")


@dataclass
class ConditionCase:
    x: str
    y: str
    n: int
    m: int
    i: int
    category: str
    max_diff: float
    passed: bool

    def to_json(self):
        return dict(self.__dict__)


@dataclass
class ConditionReport:
    cases: list = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.cases)

    def table(self):
        """Map ``(x, y)`` schema pairs to the categories and verdicts seen."""
        out = {}
        for c in self.cases:
            cell = out.setdefault((c.x, c.y), {})
            key = c.category if c.category in ("heart", "club") else f"i={c.i}:{c.category}"
            cell[key] = cell.get(key, True) and c.passed
        return out

    def to_json(self):
        return {
            "passed": self.passed,
            "cases": [c.to_json() for c in self.cases],
            "table": {f"{x}|{y}": v for (x, y), v in self.table().items()},
        }


def check_conjugation_condition(tol=DEFAULT_TOL, angle_samples=20, seed=0):
    """Verify C(g^dag f g) = (id x g^dag) C(f) (id x g) for all padded G pairs."""
    tol = check_tolerance(tol)
    rng = random.Random(seed)
    report = ConditionReport()
    for xk in SCHEMAS:
        for yk in SCHEMAS:
            xs, ys = _instances(xk, rng, angle_samples), _instances(yk, rng, angle_samples)
            if xk in ("phase", "cphase") and yk in ("phase", "cphase"):
                pairs = list(zip(xs, ys))
            else:
                pairs = [(x, y) for x in xs for y in ys]
            cases = {}
            for x, y in pairs:
                n, m = wires(x), wires(y)
                for i in range(1, n + m):
                    f, g = padded_pair(x, y, i)
                    left, right = conjugation(f, dagger(g))
                    diff = max_abs_diff(local_matrix(left), local_matrix(right))
                    key = (n, m, i)
                    prev = cases.get(key)
                    cases[key] = max(diff, prev) if prev is not None else diff
            if not cases:
                # no offsets exist (a zero-wire gate against a one-wire gate)
                n, m = wires(xs[0]), wires(ys[0])
                report.cases.append(ConditionCase(xk, yk, n, m, 0, "heart", 0.0, True))
            for (n, m, i), diff in sorted(cases.items()):
                report.cases.append(
                    ConditionCase(xk, yk, n, m, i, category(xk, yk, i), diff, diff <= tol)
                )
    return report
