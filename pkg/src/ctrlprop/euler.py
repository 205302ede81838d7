"""Euler decomposition of the two-parameter H / Z-rotation circuit.

``H; Z(a1); H; Z(a2); H`` (applied left to right) equals the global phase
``b0`` next to ``Z(b1); H; Z(b2); H; Z(b3)``. In cqc the rotations are
``C(ph(a))``.
"""

import cmath
import math
from dataclasses import dataclass

from .angles import TWO_PI, normalize_angle
from .circuits import euler_lhs, euler_rhs
from .diagram import Ctrl, Dialect, Hadamard, Phase, Seq, Z, flatten, replace_at, subterm_at
from .errors import NoMatch, SemanticDriftError
from .semantics import DEFAULT_TOL, equiv

CASE_EPS = 1e-12


@dataclass(frozen=True)
class EulerParams:
    beta0: float
    beta1: float
    beta2: float
    beta3: float
    u: complex
    v: complex
    case: str

    @property
    def betas(self):
        return (self.beta0, self.beta1, self.beta2, self.beta3)

    def to_json(self):
        return {
            "beta0": self.beta0,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "beta3": self.beta3,
            "betas": list(self.betas),
            "u": [self.u.real, self.u.imag],
            "v": [self.v.real, self.v.imag],
            "case": self.case,
        }


def _arg(z):
    return cmath.phase(z) % TWO_PI


def euler_params(a1, a2):
    a1, a2 = float(a1), float(a2)
    s, d = (a1 + a2) / 2, (a1 - a2) / 2
    u = complex(-math.sin(s), math.cos(d))
    v = complex(math.cos(s), -math.sin(d))
    if abs(v) <= CASE_EPS:
        case, b1, b2, b3 = "v0", 2 * _arg(u), 0.0, 0.0
    elif abs(u) <= CASE_EPS:
        case, b1, b2, b3 = "u0", 2 * _arg(v), math.pi, 0.0
    else:
        case = "generic"
        b1 = _arg(u) + _arg(v)
        b2 = 2 * _arg(1j + abs(u / v))
        b3 = _arg(u) - _arg(v)
    # b0 uses the raw b1..b3; normalizing them first would shift b0 by pi
    b0 = (math.pi + a1 + a2 - b1 - b2 - b3) / 2
    return EulerParams(
        normalize_angle(b0),
        normalize_angle(b1),
        normalize_angle(b2),
        normalize_angle(b3),
        u,
        v,
        case,
    )


def _rotation_angle(node, dialect):
    if dialect is Dialect.QC and isinstance(node, Z):
        return node.angle
    if dialect is Dialect.CQC and isinstance(node, Ctrl) and isinstance(node.body, Phase):
        return node.body.angle
    return None


def match_euler(term, dialect):
    """Return ``(a1, a2)`` when ``term`` is the left-hand circuit, else None."""
    dialect = Dialect.coerce(dialect)
    if not isinstance(term, Seq) or len(term.children) != 5:
        return None
    h0, r1, h1, r2, h2 = term.children
    if not all(isinstance(h, Hadamard) for h in (h0, h1, h2)):
        return None
    a1, a2 = _rotation_angle(r1, dialect), _rotation_angle(r2, dialect)
    if a1 is None or a2 is None:
        return None
    return a1, a2


def euler_rewrite(a1, a2, dialect):
    p = euler_params(a1, a2)
    return flatten(euler_rhs(*p.betas, dialect))


def apply_euler(d, path=(), dialect=Dialect.CQC, span=None, tol=DEFAULT_TOL):
    """Replace the left-hand circuit at ``path`` by its decomposition.

    ``span=(start, stop)`` selects a window of a Seq node's children.
    """
    dialect = Dialect.coerce(dialect)
    d = flatten(d)
    node = subterm_at(d, path)
    if span is not None:
        if not isinstance(node, Seq):
            raise NoMatch(f"span given but {node!r} is not a Seq")
        start, stop = span
        target = flatten(Seq(node.children[start:stop]))
    else:
        target = node
    angles = match_euler(target, dialect)
    if angles is None:
        raise NoMatch(f"not an Euler left-hand side in {dialect.value}: {target!r}")
    rhs = euler_rewrite(*angles, dialect)
    if span is not None:
        kids = node.children[: span[0]] + (rhs,) + node.children[span[1]:]
        rhs = Seq(kids)
    out = flatten(replace_at(d, path, rhs))
    check = equiv(d, out, dialect, tol)
    if not check.equal:
        raise SemanticDriftError("euler", check.max_diff)
    return out


__all__ = ["EulerParams", "euler_params", "apply_euler", "match_euler", "euler_lhs", "euler_rhs"]
