"""Named circuits shared by the rule library, the structure operations and
the translations. Every builder accepts numeric angles or pattern slots."""

import math

from .diagram import CNOT, Ctrl, Dialect, H, Id, Par, Phase, Seq, Swap, Z, ctrl_n, flatten

PI = math.pi


def zrot(angle, dialect):
    """Z rotation diag(1, e^{i angle}): a generator in qc, C(phase) in cqc."""
    return Z(angle) if Dialect.coerce(dialect) is Dialect.QC else Ctrl(Phase(angle))


def cz():
    """Doubly controlled pi phase, diag(1, 1, 1, -1)."""
    return Ctrl(Ctrl(Phase(PI)))


def cnot_cqc():
    return Seq(Par(Id(1), H), cz(), Par(Id(1), H))


def cnot(dialect):
    return CNOT if Dialect.coerce(dialect) is Dialect.QC else cnot_cqc()


def reversed_cnot(dialect):
    """CNOT with the target on the first wire."""
    if Dialect.coerce(dialect) is Dialect.QC:
        return Seq(Par(H, H), CNOT, Par(H, H))
    return Seq(Par(H, Id(1)), cz(), Par(H, Id(1)))


def swap_def(dialect):
    """Three alternating CNOTs implementing Swap(1, 1)."""
    return flatten(Seq(cnot(dialect), reversed_cnot(dialect), cnot(dialect)))


def euler_lhs(a1, a2, dialect):
    return Seq(H, zrot(a1, dialect), H, zrot(a2, dialect), H)


def euler_rhs(b0, b1, b2, b3, dialect):
    z = lambda a: zrot(a, dialect)  # noqa: E731
    return Par(Phase(b0), Seq(z(b1), H, z(b2), H, z(b3)))


def _halving_template(piece, n, angle, dialect):
    """Recursive multi-controlled phase on ``n >= 2`` wires ``[a, b, R]``.

    Uses ``2 xa xb = xa + xb - (xa XOR xb)``: a half-angle piece on ``[a, R]``
    (routed past ``b`` with swaps), one on ``[b, R]``, and a negated
    half-angle piece on ``[b, R]`` conjugated by ``CNOT(a -> b)``.
    """
    k = n - 2
    half = angle / 2
    swap = Par(Swap(1, 1), Id(k))
    c = Par(cnot(dialect), Id(k))
    return Seq(
        swap,
        Par(Id(1), piece(half)),
        swap,
        Par(Id(1), piece(half)),
        c,
        Par(Id(1), piece(-half)),
        c,
    )


def lambda_circuit(n, angle):
    """Multi-controlled Z rotation in qc built only from Z, H and CNOT."""
    if n == 0:
        return Phase(angle)
    if n == 1:
        return Z(angle)
    return _halving_template(lambda a: lambda_circuit(n - 1, a), n, angle, Dialect.QC)


def mu_circuit(n, angle):
    """The cqc counterpart of :func:`lambda_circuit`: same recursion, CNOT
    replaced by its H-conjugated doubly controlled pi phase."""
    if n == 0:
        return Phase(angle)
    if n == 1:
        return Ctrl(Phase(angle))
    return _halving_template(lambda a: mu_circuit(n - 1, a), n, angle, Dialect.CQC)


def ch_reduced():
    """C(H) written with single-control phases, H and the CZ gate."""
    g = Seq(Ctrl(Phase(PI / 2)), H, Ctrl(Phase(PI / 4)), H)
    g_dag = Seq(H, Ctrl(Phase(-PI / 4)), H, Ctrl(Phase(-PI / 2)))
    return Seq(Par(Id(1), g), cz(), Par(Id(1), g_dag))


def ccc_pi_reduced():
    """C(C(C(pi))) rewritten with doubly controlled half-pi phases."""
    return _halving_template(lambda a: ctrl_n(Phase(a), 2), 3, PI, Dialect.CQC)
