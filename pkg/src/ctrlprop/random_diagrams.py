"""Random well-typed diagrams for property tests and soundness sampling."""

import math
import random

from .diagram import CNOT, Ctrl, Dialect, H, Id, Par, Phase, Seq, Swap, Z

MAX_WIRES = 6
MAX_DEPTH = 12


def random_angle(rng):
    # a quarter of the draws hit pi/4 multiples so special cases (0, pi) occur
    if rng.random() < 0.25:
        return rng.randrange(8) * math.pi / 4
    return rng.uniform(0.0, 2 * math.pi)


def _rotation(rng, dialect):
    a = random_angle(rng)
    return Z(a) if dialect is Dialect.QC else Ctrl(Phase(a))


def _padded(rng, w, gate, width):
    left = rng.randint(0, w - width)
    return Par(Id(left), gate, Id(w - width - left))


def _leaf(rng, w, dialect):
    if w == 0:
        return Phase(random_angle(rng)) if rng.random() < 0.8 else Id(0)
    options = ["h", "rot", "phase", "id"]
    if w >= 2:
        options += ["swap", "cnot" if dialect is Dialect.QC else "cz"]
    kind = rng.choice(options)
    if kind == "h":
        return _padded(rng, w, H, 1)
    if kind == "rot":
        return _padded(rng, w, _rotation(rng, dialect), 1)
    if kind == "phase":
        return Par(Phase(random_angle(rng)), Id(w))
    if kind == "id":
        return Id(w)
    if kind == "cnot":
        return _padded(rng, w, CNOT, 2)
    if kind == "cz":
        return _padded(rng, w, Ctrl(Ctrl(Phase(random_angle(rng)))), 2)
    width = rng.randint(2, w)
    n = rng.randint(0, width)
    return _padded(rng, w, Swap(n, width - n), width)


def random_diagram(rng=None, wires=None, depth=6, dialect=Dialect.CQC, max_ctrl=2):
    """Draw a type-correct endomorphism on ``wires`` wires.

    ``depth`` bounds the tree depth, ``max_ctrl`` the nesting of Ctrl nodes.
    """
    rng = rng if isinstance(rng, random.Random) else random.Random(rng)
    dialect = Dialect.coerce(dialect)
    if wires is None:
        wires = rng.randint(1, 3)
    if wires > MAX_WIRES or depth > MAX_DEPTH:
        raise ValueError(f"generator bounds are {MAX_WIRES} wires and depth {MAX_DEPTH}")
    return _gen(rng, wires, depth, dialect, max_ctrl)


def _gen(rng, w, depth, dialect, ctrl_budget):
    if depth <= 1 or rng.random() < 0.2:
        return _leaf(rng, w, dialect)
    choices = ["seq", "seq"]
    if w >= 2:
        choices.append("par")
    if dialect is Dialect.CQC and w >= 1 and ctrl_budget > 0:
        choices.append("ctrl")
    kind = rng.choice(choices)
    if kind == "seq":
        return Seq([_gen(rng, w, depth - 1, dialect, ctrl_budget) for _ in range(rng.randint(2, 3))])
    if kind == "par":
        top = rng.randint(1, w - 1)
        return Par(
            _gen(rng, top, depth - 1, dialect, ctrl_budget),
            _gen(rng, w - top, depth - 1, dialect, ctrl_budget),
        )
    return Ctrl(_gen(rng, w - 1, depth - 1, dialect, ctrl_budget - 1))


def random_unitary(rng, dim):
    """Haar-ish random unitary via QR of a complex Gaussian matrix."""
    import numpy as np

    gen = np.random.default_rng(rng.getrandbits(64) if isinstance(rng, random.Random) else rng)
    z = gen.normal(size=(dim, dim)) + 1j * gen.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
