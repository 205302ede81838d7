"""Diagram terms for vanilla (qc) and controllable (cqc) quantum circuits.

A diagram is an immutable tree. Generators are ``Phase`` (0 wires), ``H``,
``Z`` and ``CNOT``; structure is ``Id``, ``Swap``, n-ary ``Seq`` (first child
applied first), n-ary ``Par`` (first child on the topmost wires) and
``Ctrl``, which adds one control wire on top of its body.

Every diagram is an endomorphism, so the arity is reported as a pair of
equal numbers. Structural equality is the dataclass equality; it is only
meaningful between flattened terms.
"""

from dataclasses import dataclass
from enum import Enum

from .angles import EPS_ANGLE, angle_close, normalize_angle
from .errors import ArityMismatch, DiagramTypeError, InvalidPath


class Dialect(str, Enum):
    QC = "qc"
    CQC = "cqc"

    @classmethod
    def coerce(cls, value):
        return value if isinstance(value, cls) else cls(str(value).lower())


class Diagram:
    """Base class of all term nodes."""

    __slots__ = ()

    def __repr__(self):
        from .syntax import to_text

        try:
            return to_text(self)
        except Exception:  # patterns may hold non-numeric angles
            return object.__repr__(self)

    # composition sugar: a >> b applies a then b, a @ b stacks a above b
    def __rshift__(self, other):
        return Seq(self, other)

    def __matmul__(self, other):
        return Par(self, other)


def _angle(value):
    if isinstance(value, (int, float)):
        return normalize_angle(value)
    return value  # symbolic slot inside a rule pattern


@dataclass(frozen=True, repr=False)
class Phase(Diagram):
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", _angle(self.angle))


@dataclass(frozen=True, repr=False)
class Hadamard(Diagram):
    pass


@dataclass(frozen=True, repr=False)
class Z(Diagram):
    angle: float

    def __post_init__(self):
        object.__setattr__(self, "angle", _angle(self.angle))


@dataclass(frozen=True, repr=False)
class Cnot(Diagram):
    pass


@dataclass(frozen=True, repr=False)
class Id(Diagram):
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("Id needs a non-negative wire count")


@dataclass(frozen=True, repr=False)
class Swap(Diagram):
    n: int
    m: int

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise ValueError("Swap needs non-negative wire counts")


def _collect(children):
    if len(children) == 1 and isinstance(children[0], (list, tuple)):
        children = children[0]
    children = tuple(children)
    for c in children:
        if not isinstance(c, Diagram):
            raise TypeError(f"not a diagram: {c!r}")
    return children


def _cached_hash(self):
    # composites are hashed often (rule caches, dedup); cache the deep hash
    h = self.__dict__.get("_hash")
    if h is None:
        h = hash((type(self).__name__, self.children))
        object.__setattr__(self, "_hash", h)
    return h


@dataclass(frozen=True, init=False, repr=False)
class Seq(Diagram):
    children: tuple

    def __init__(self, *children):
        object.__setattr__(self, "children", _collect(children))

    __hash__ = _cached_hash


@dataclass(frozen=True, init=False, repr=False)
class Par(Diagram):
    children: tuple

    def __init__(self, *children):
        object.__setattr__(self, "children", _collect(children))

    __hash__ = _cached_hash


@dataclass(frozen=True, repr=False)
class Ctrl(Diagram):
    body: Diagram


H = Hadamard()
CNOT = Cnot()

GENERATORS = (Phase, Hadamard, Z, Cnot)


def children(d):
    if isinstance(d, (Seq, Par)):
        return d.children
    if isinstance(d, Ctrl):
        return (d.body,)
    return ()


def with_children(d, kids):
    if isinstance(d, Seq):
        return Seq(kids)
    if isinstance(d, Par):
        return Par(kids)
    if isinstance(d, Ctrl):
        (body,) = kids
        return Ctrl(body)
    if kids:
        raise ValueError(f"{type(d).__name__} has no children")
    return d


def ctrl_n(d, n):
    """Nest ``n`` controls around ``d``."""
    for _ in range(n):
        d = Ctrl(d)
    return d


# ---------------------------------------------------------------- arity


def arity(d, _path=()):
    """Return ``(domain, codomain)`` wire counts; raise on ill-typed Seq."""
    w = _wires(d, _path)
    return w, w


def _wires(d, path):
    if isinstance(d, Phase):
        return 0
    if isinstance(d, (Hadamard, Z)):
        return 1
    if isinstance(d, Cnot):
        return 2
    if isinstance(d, Id):
        return d.n
    if isinstance(d, Swap):
        return d.n + d.m
    w = d.__dict__.get("_wires") if isinstance(d, Diagram) else None
    if w is not None:
        return w
    if isinstance(d, Ctrl):
        w = 1 + _wires(d.body, path + (0,))
    elif isinstance(d, Par):
        w = sum(_wires(c, path + (i,)) for i, c in enumerate(d.children))
    elif isinstance(d, Seq):
        if not d.children:
            raise DiagramTypeError("empty Seq has no arity", path)
        w = _wires(d.children[0], path + (0,))
        for i, c in enumerate(d.children[1:], start=1):
            wc = _wires(c, path + (i,))
            if wc != w:
                raise DiagramTypeError(
                    f"Seq child {i} has {wc} wires, predecessor has {w}", path + (i,)
                )
    else:
        raise TypeError(f"not a diagram: {d!r}")
    object.__setattr__(d, "_wires", w)
    return w


def wires(d):
    return _wires(d, ())


# -------------------------------------------------------------- dialects


def validate_dialect(d, dialect):
    """List ``(path, reason)`` for every node illegal in ``dialect``."""
    dialect = Dialect.coerce(dialect)
    out = []

    def walk(node, path):
        if dialect is Dialect.QC and isinstance(node, Ctrl):
            out.append((path, "Ctrl is not a qc constructor"))
        if dialect is Dialect.CQC and isinstance(node, (Z, Cnot)):
            out.append((path, f"{type(node).__name__} is not a cqc generator"))
        for i, c in enumerate(children(node)):
            walk(c, path + (i,))

    walk(d, ())
    return out


# --------------------------------------------------------------- flatten


def flatten(d):
    """Canonical form modulo associativity, unit laws and C(id) = id."""
    wires(d)
    return _flat(d)


def _flat(d):
    if d.__dict__.get("_flat"):
        return d
    out = _flat_node(d)
    if isinstance(out, (Seq, Par, Ctrl)):
        object.__setattr__(out, "_flat", True)
    return out


def _flat_node(d):
    if isinstance(d, Seq):
        n = wires(d)
        kids = []
        for c in d.children:
            f = _flat(c)
            if isinstance(f, Seq):
                kids.extend(f.children)
            elif not isinstance(f, Id):
                kids.append(f)
        if not kids:
            return Id(n)
        return kids[0] if len(kids) == 1 else Seq(kids)
    if isinstance(d, Par):
        flat = []
        for c in d.children:
            f = _flat(c)
            flat.extend(f.children if isinstance(f, Par) else (f,))
        scalars = [k for k in flat if not isinstance(k, Id) and wires(k) == 0]
        wide = []
        for k in flat:
            if isinstance(k, Id):
                if k.n == 0:
                    continue
                if wide and isinstance(wide[-1], Id):
                    wide[-1] = Id(wide[-1].n + k.n)
                    continue
            elif wires(k) == 0:
                continue
            wide.append(k)
        kids = scalars + wide
        if not kids:
            return Id(0)
        return kids[0] if len(kids) == 1 else Par(kids)
    if isinstance(d, Ctrl):
        b = _flat(d.body)
        return Id(wires(b) + 1) if isinstance(b, Id) else Ctrl(b)
    return d


# ----------------------------------------------------------------- swaps


def expand_swaps(d):
    """Rewrite every Swap(n, m) into Swap(1, 1) crossings and identities."""
    return flatten(_expand(d))


def _expand(d):
    if isinstance(d, Swap):
        return swap_lattice(d.n, d.m)
    kids = children(d)
    if not kids:
        return d
    return with_children(d, [_expand(c) for c in kids])


def swap_lattice(n, m):
    if n == 0 or m == 0:
        return Id(n + m)
    if n == 1 and m == 1:
        return Swap(1, 1)
    if n > 1:
        # a, B, C  ->  a, C, B  ->  C, a, B
        return Seq(Par(Id(1), swap_lattice(n - 1, m)), Par(swap_lattice(1, m), Id(n - 1)))
    # a, c, D  ->  c, a, D  ->  c, D, a
    return Seq(Par(Swap(1, 1), Id(m - 1)), Par(Id(1), swap_lattice(1, m - 1)))


# ---------------------------------------------------------------- dagger


def dagger(d):
    if isinstance(d, Phase):
        return Phase(-d.angle)
    if isinstance(d, Z):
        return Z(-d.angle)
    if isinstance(d, (Hadamard, Cnot, Id)):
        return d
    if isinstance(d, Swap):
        return Swap(d.m, d.n)
    if isinstance(d, Seq):
        return Seq([dagger(c) for c in reversed(d.children)])
    if isinstance(d, Par):
        return Par([dagger(c) for c in d.children])
    if isinstance(d, Ctrl):
        return Ctrl(dagger(d.body))
    raise TypeError(f"not a diagram: {d!r}")


# ----------------------------------------------------------------- paths


def subterm_at(d, path):
    node = d
    for depth, i in enumerate(path):
        kids = children(node)
        if not 0 <= i < len(kids):
            raise InvalidPath(f"step {depth} (index {i}) does not exist in {node!r}")
        node = kids[i]
    return node


def replace_at(d, path, r, check_arity=True):
    """Return a copy of ``d`` with the subterm at ``path`` replaced by ``r``."""
    path = tuple(path)
    old = subterm_at(d, path)
    if check_arity and wires(old) != wires(r):
        raise ArityMismatch(f"replacement has {wires(r)} wires, subterm has {wires(old)}")
    return _replace(d, path, r)


def _replace(node, path, r):
    if not path:
        return r
    kids = list(children(node))
    kids[path[0]] = _replace(kids[path[0]], path[1:], r)
    return with_children(node, kids)


def iter_subterms(d, path=()):
    """Yield ``(path, node)`` pairs in pre-order."""
    yield path, d
    for i, c in enumerate(children(d)):
        yield from iter_subterms(c, path + (i,))


def size(d):
    return 1 + sum(size(c) for c in children(d))


def count_nodes(d, kind):
    return sum(1 for _, n in iter_subterms(d) if isinstance(n, kind))


def approx_equal(a, b, eps=EPS_ANGLE):
    """Structural equality with angles compared modulo 2*pi up to ``eps``."""
    if type(a) is not type(b):
        return False
    if isinstance(a, (Phase, Z)):
        return angle_close(a.angle, b.angle, eps)
    if isinstance(a, (Seq, Par)):
        return len(a.children) == len(b.children) and all(
            approx_equal(x, y, eps) for x, y in zip(a.children, b.children)
        )
    if isinstance(a, Ctrl):
        return approx_equal(a.body, b.body, eps)
    return a == b
