"""Symbolic angle slots and structural matching of rule patterns.

A rule side is written once as a builder ``bindings -> Diagram``. Calling the
builder with :class:`Slot` objects instead of numbers yields the pattern used
for matching; builders may use linear arithmetic on their angles.
"""

import math

from .angles import TWO_PI, angle_close, normalize_angle
from .diagram import Ctrl, Id, Par, Phase, Seq, Swap, Z, children


class AngleExpr:
    """Linear combination of named slots plus a constant."""

    __slots__ = ("coeffs", "const")

    def __init__(self, coeffs=None, const=0.0):
        self.coeffs = dict(coeffs or {})
        self.const = float(const)

    @staticmethod
    def lift(x):
        return x if isinstance(x, AngleExpr) else AngleExpr({}, float(x))

    def __add__(self, other):
        other = AngleExpr.lift(other)
        coeffs = dict(self.coeffs)
        for k, v in other.coeffs.items():
            coeffs[k] = coeffs.get(k, 0.0) + v
        return AngleExpr(coeffs, self.const + other.const)

    __radd__ = __add__

    def __neg__(self):
        return AngleExpr({k: -v for k, v in self.coeffs.items()}, -self.const)

    def __sub__(self, other):
        return self + (-AngleExpr.lift(other))

    def __rsub__(self, other):
        return AngleExpr.lift(other) - self

    def __mul__(self, k):
        if isinstance(k, AngleExpr):
            raise TypeError("slot expressions must stay linear")
        return AngleExpr({n: v * k for n, v in self.coeffs.items()}, self.const * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (1.0 / k)

    def evaluate(self, bindings):
        return normalize_angle(self.const + sum(v * bindings[k] for k, v in self.coeffs.items()))

    def __repr__(self):
        terms = [f"{v:g}*{k}" for k, v in self.coeffs.items()]
        return " + ".join(terms + [f"{self.const:g}"])

    # math.sin(slot) and friends must fail loudly: such builders are not invertible
    def __float__(self):
        raise TypeError("a symbolic angle slot has no numeric value")


def Slot(name):
    return AngleExpr({name: 1.0})


def match_angle(expr, value, bindings):
    """Extend ``bindings`` so that ``expr`` equals ``value``; None on failure."""
    if not isinstance(expr, AngleExpr):
        return bindings if angle_close(expr, value) else None
    free = [k for k in expr.coeffs if k not in bindings and expr.coeffs[k] != 0.0]
    if not free:
        return bindings if angle_close(expr.evaluate(bindings), value) else None
    if len(free) > 1:
        return None
    name = free[0]
    c = expr.coeffs[name]
    rest = expr.const + sum(v * bindings[k] for k, v in expr.coeffs.items() if k != name)
    # c * x = value - rest (mod 2pi) has |c| solutions in [0, 2pi) for integer c
    for k in range(max(1, math.ceil(abs(c)))):
        x = normalize_angle((value - rest + TWO_PI * k) / c)
        trial = dict(bindings)
        trial[name] = x
        if angle_close(expr.evaluate(trial), value):
            return trial
    return None


def match(pattern, term, bindings=None):
    """Structurally unify a flattened pattern with a flattened term."""
    bindings = {} if bindings is None else bindings
    if type(pattern) is not type(term):
        return None
    if isinstance(pattern, (Phase, Z)):
        return match_angle(pattern.angle, term.angle, bindings)
    if isinstance(pattern, Id):
        return bindings if pattern.n == term.n else None
    if isinstance(pattern, Swap):
        return bindings if (pattern.n, pattern.m) == (term.n, term.m) else None
    if isinstance(pattern, (Seq, Par, Ctrl)):
        pk, tk = children(pattern), children(term)
        if len(pk) != len(tk):
            return None
        for p, t in zip(pk, tk):
            bindings = match(p, t, bindings)
            if bindings is None:
                return None
        return bindings
    return bindings if pattern == term else None


def is_symbolic(d):
    if isinstance(d, (Phase, Z)):
        return isinstance(d.angle, AngleExpr)
    return any(is_symbolic(c) for c in children(d))
