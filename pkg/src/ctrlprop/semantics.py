"""Dense unitary interpretation of diagrams and semantic equivalence.

Basis ordering puts the first wire on the most significant bit, so a ket
``|x, y>`` has index ``2*x + y``. Sequential composition multiplies with the
later diagram on the left; ``Ctrl(f)`` is ``|0><0| (x) I + |1><1| (x) [f]``.
"""

import cmath
import math
import os
from dataclasses import dataclass

import numpy as np

from . import kernels
from .diagram import (
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
    validate_dialect,
    wires,
)
from .errors import ArityMismatch, CapExceeded, DialectError, DimMismatch

DEFAULT_TOL = 1e-9
DEFAULT_MAX_WIRES = 12

_SQ = 1.0 / math.sqrt(2.0)
H_MATRIX = np.array([[_SQ, _SQ], [_SQ, -_SQ]], dtype=np.complex128)
CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128
)


def max_wires():
    """Wire cap, overridable through ``CTRLPROP_MAX_WIRES``."""
    raw = os.environ.get("CTRLPROP_MAX_WIRES")
    return int(raw) if raw else DEFAULT_MAX_WIRES


def check_tolerance(tol):
    tol = float(tol)
    if not 0.0 < tol < 1e-3:
        raise ValueError(f"tolerance must lie in (0, 1e-3), got {tol}")
    return tol


def infer_dialect(d):
    """Pick the dialect a diagram belongs to; cqc when both would accept it."""
    if not validate_dialect(d, Dialect.CQC):
        return Dialect.CQC
    if not validate_dialect(d, Dialect.QC):
        return Dialect.QC
    raise DialectError(validate_dialect(d, Dialect.CQC))


# ----------------------------------------------------------- matrix algebra


def kron(a, b):
    a = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    b = np.atleast_2d(np.asarray(b, dtype=np.complex128))
    return kernels.kron(a, b)


def matmul(a, b):
    a = np.atleast_2d(np.asarray(a, dtype=np.complex128))
    b = np.atleast_2d(np.asarray(b, dtype=np.complex128))
    if a.shape[1] != b.shape[0]:
        raise DimMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def swap_matrix(n, m):
    """Permutation sending |x, y> to |y, x> for x on n wires, y on m wires."""
    dn, dm = 1 << n, 1 << m
    perm = np.zeros((dn * dm, dn * dm), dtype=np.complex128)
    for x in range(dn):
        for y in range(dm):
            perm[y * dn + x, x * dm + y] = 1.0
    return perm


def z_matrix(angle):
    return np.array([[1, 0], [0, cmath.exp(1j * angle)]], dtype=np.complex128)


# ------------------------------------------------------------ interpreter


def interpret(d, dialect=None, cap=None):
    """Return the unitary of ``d`` as a ``2**n x 2**n`` complex array."""
    dialect = infer_dialect(d) if dialect is None else Dialect.coerce(dialect)
    violations = validate_dialect(d, dialect)
    if violations:
        raise DialectError(violations)
    n = wires(d)
    cap = max_wires() if cap is None else cap
    if n > cap:
        raise CapExceeded(n, cap)
    return _apply(d, np.eye(1 << n, dtype=np.complex128), 0, n)


def local_matrix(d):
    """Unitary of ``d`` on its own wires (no dialect check)."""
    n = wires(d)
    return _apply(d, np.eye(1 << n, dtype=np.complex128), 0, n)


def _apply(d, m, offset, total):
    if isinstance(d, Phase):
        return m * cmath.exp(1j * d.angle)
    if isinstance(d, Id):
        return m
    if isinstance(d, Seq):
        for c in d.children:
            m = _apply(c, m, offset, total)
        return m
    if isinstance(d, Par):
        for c in d.children:
            m = _apply(c, m, offset, total)
            offset += wires(c)
        return m
    w = wires(d)
    return kernels.apply_local(m, _gate(d), 1 << offset, 1 << (total - offset - w))


def _gate(d):
    if isinstance(d, Hadamard):
        return H_MATRIX
    if isinstance(d, Z):
        return z_matrix(d.angle)
    if isinstance(d, Cnot):
        return CNOT_MATRIX
    if isinstance(d, Swap):
        return swap_matrix(d.n, d.m)
    if isinstance(d, Ctrl):
        return kernels.controlled(local_matrix(d.body))
    raise TypeError(f"not a diagram: {d!r}")


# ------------------------------------------------------------ comparisons


@dataclass(frozen=True)
class EquivResult:
    equal: bool
    max_diff: float

    def __bool__(self):
        return self.equal

    def to_json(self):
        return {"equal": self.equal, "max_diff": self.max_diff}


def max_abs_diff(a, b):
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape != b.shape:
        raise DimMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    return kernels.max_abs_diff(np.atleast_2d(a), np.atleast_2d(b))


def equiv(d1, d2, dialect=None, tol=DEFAULT_TOL):
    """Compare two diagrams entrywise; global phase is observable."""
    tol = check_tolerance(tol)
    if wires(d1) != wires(d2):
        raise ArityMismatch(f"arity {wires(d1)} vs {wires(d2)}")
    diff = max_abs_diff(interpret(d1, dialect), interpret(d2, dialect))
    return EquivResult(diff <= tol, diff)


def is_unitary(m, tol=DEFAULT_TOL):
    m = np.atleast_2d(np.asarray(m, dtype=np.complex128))
    if m.shape[0] != m.shape[1]:
        return False
    return max_abs_diff(m @ m.conj().T, np.eye(m.shape[0])) <= tol


def matrix_to_json(m):
    m = np.atleast_2d(np.asarray(m, dtype=np.complex128))
    return {"dim": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()}


def matrix_from_json(obj):
    return np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj["im"], dtype=float)
