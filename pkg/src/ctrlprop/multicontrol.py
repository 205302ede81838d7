"""Control functors on dense unitaries, and the polycontrol properties.

Each :class:`ControlVariant` maps a unitary on ``D`` dimensions to one on
``d * D`` dimensions, with the control system (dimension ``d``) as the most
significant tensor factor. The checks evaluate points, compatibility,
commutativity and exhaustivity as matrix identities.
"""

import math
import random
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimMismatch
from .random_diagrams import random_unitary
from .semantics import H_MATRIX, check_tolerance, is_unitary, max_abs_diff

_SQ = 1.0 / math.sqrt(2.0)
KET0 = np.array([1, 0], dtype=np.complex128)
KET1 = np.array([0, 1], dtype=np.complex128)
KET_PLUS = np.array([_SQ, _SQ], dtype=np.complex128)
KET_MINUS = np.array([_SQ, -_SQ], dtype=np.complex128)
X_MATRIX = np.array([[0, 1], [1, 0]], dtype=np.complex128)

TAGS = ("C1", "C0", "Cminus", "Ck", "CZ", "CX", "Csharp")

# frozen witnesses, found by bounded random search over these seeds
COMMUTE_WITNESS_SEED = 0
POWER_MAP_WITNESS_SEED = 0


def ket(d, k):
    v = np.zeros(d, dtype=np.complex128)
    v[k] = 1.0
    return v


def _proj(v):
    return np.outer(v, v.conj())


@dataclass(frozen=True)
class ControlVariant:
    tag: str
    d: int = 2
    k: int = 1

    def __post_init__(self):
        if self.tag not in TAGS:
            raise ValueError(f"unknown control variant {self.tag!r}")
        if self.tag == "Ck" and not 0 <= self.k < self.d:
            raise ValueError(f"level {self.k} out of range for dimension {self.d}")
        if self.tag != "Ck" and self.d != 2:
            raise ValueError(f"{self.tag} is a qubit control")

    @property
    def name(self):
        return f"C{self.k}[d={self.d}]" if self.tag == "Ck" else self.tag

    def firing(self):
        """Projector onto the control states that fire the target, or None."""
        if self.tag in ("C1", "CZ"):
            return _proj(KET1)
        if self.tag == "C0":
            return _proj(KET0)
        if self.tag in ("Cminus", "CX"):
            return _proj(KET_MINUS)
        if self.tag == "Ck":
            return _proj(ket(self.d, self.k))
        return None

    def points(self):
        """Candidate ``(true, false)`` points, or None when there are none."""
        if self.tag in ("C1", "CZ"):
            return KET1, KET0
        if self.tag == "C0":
            return KET0, KET1
        if self.tag in ("Cminus", "CX"):
            return KET_MINUS, KET_PLUS
        if self.tag == "Ck":
            return ket(self.d, self.k), ket(self.d, (self.k + 1) % self.d)
        return None


C1 = ControlVariant("C1")
C0 = ControlVariant("C0")
Cminus = ControlVariant("Cminus")
CZ = ControlVariant("CZ")
CX = ControlVariant("CX")
Csharp = ControlVariant("Csharp")


def Ck(d, k):
    return ControlVariant("Ck", d, k)


def _square(u):
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimMismatch(f"expected a square matrix, got shape {u.shape}")
    return u


def _qubits(dim):
    n = dim.bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise DimMismatch(f"dimension {dim} is not a power of 2")
    return n


def _is_power(dim, d):
    while dim > 1 and dim % d == 0:
        dim //= d
    return dim == 1


def apply_variant(v, u):
    """The controlled version of ``u`` under the variant ``v``."""
    u = _square(u)
    dim = u.shape[0]
    if v.tag == "Csharp":
        xn = np.array([[1.0]], dtype=np.complex128)
        for _ in range(_qubits(dim)):
            xn = np.kron(xn, X_MATRIX)
        return np.kron(np.eye(2), xn @ u @ xn)
    if v.tag == "Ck" and not _is_power(dim, v.d):
        raise DimMismatch(f"dimension {dim} is not a power of {v.d}")
    if v.tag != "Ck":
        _qubits(dim)
    p = v.firing()
    return np.kron(p, u) + np.kron(np.eye(v.d) - p, np.eye(dim))


def power_map(u, d=3):
    """``U -> sum_k |k><k| x U^k``, which is not a control functor for d > 2."""
    u = _square(u)
    out = np.zeros((d * u.shape[0],) * 2, dtype=np.complex128)
    uk = np.eye(u.shape[0], dtype=np.complex128)
    for k in range(d):
        out += np.kron(_proj(ket(d, k)), uk)
        uk = uk @ u
    return out


# ------------------------------------------------------------------ checks


@dataclass
class PointReport:
    variant: str
    true_point: Optional[list]
    false_point: Optional[list]
    true_diff: float
    false_diff: float
    ok: bool

    def to_json(self):
        return dict(self.__dict__)


def _vec_json(v):
    return [[float(z.real), float(z.imag)] for z in v]


def _point_diffs(controlled, f, t, fl):
    eye = np.eye(f.shape[0])
    col_t, col_f = t.reshape(-1, 1), fl.reshape(-1, 1)
    dt = max_abs_diff(controlled @ np.kron(col_t, eye), np.kron(col_t, f))
    df = max_abs_diff(controlled @ np.kron(col_f, eye), np.kron(col_f, eye))
    return dt, df


def check_points(v, tol=1e-10, points=None, samples=5, seed=0, qubits=(1, 2)):
    """Check that ``true`` fires and ``false`` annihilates ``C(f)`` for random f.

    ``points`` overrides the variant's declared candidates.
    """
    tol = check_tolerance(tol)
    cand = points if points is not None else v.points()
    if cand is None:
        return PointReport(v.name, None, None, math.inf, math.inf, False)
    t, fl = (np.asarray(p, dtype=np.complex128) for p in cand)
    if abs(np.linalg.norm(t) - 1) > tol or abs(np.linalg.norm(fl) - 1) > tol:
        raise ValueError("points must be unit vectors")
    rng = random.Random(seed)
    dt = df = 0.0
    for _ in range(samples):
        for n in qubits:
            f = random_unitary(rng, v.d**n if v.tag == "Ck" else 2**n)
            a, b = _point_diffs(apply_variant(v, f), f, t, fl)
            dt, df = max(dt, a), max(df, b)
    return PointReport(v.name, _vec_json(t), _vec_json(fl), dt, df, dt <= tol and df <= tol)


def check_nested_points(outer, inner, tol=1e-10, samples=5, seed=0, other=None):
    """Composite points of ``outer(inner(-))``: ``t_A x t_B`` fires and
    ``f_A x w`` annihilates for any unit vector ``w``."""
    tol = check_tolerance(tol)
    rng = random.Random(seed)
    ta, fa = outer.points()
    tb, _ = inner.points()
    w = other
    if w is None:
        w = np.array([rng.gauss(0, 1) + 1j * rng.gauss(0, 1) for _ in range(inner.d)])
        w = w / np.linalg.norm(w)
    dt = df = 0.0
    for _ in range(samples):
        f = random_unitary(rng, 2)
        a, b = _point_diffs(apply_variant(outer, apply_variant(inner, f)), f, np.kron(ta, tb), np.kron(fa, w))
        dt, df = max(dt, a), max(df, b)
    return dt <= tol and df <= tol


def _swap_controls(d, dim):
    s = np.zeros((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1
    return np.kron(s, np.eye(dim))


def compatible_diff(v1, v2, f):
    f = _square(f)
    if v1.d != v2.d:
        raise DimMismatch(f"control dimensions {v1.d} and {v2.d} differ")
    s = _swap_controls(v1.d, f.shape[0])
    left = apply_variant(v1, apply_variant(v2, f)) @ s
    right = s @ apply_variant(v2, apply_variant(v1, f))
    return max_abs_diff(left, right)


def check_compatible(v1, v2, f, tol=1e-10):
    """``C1(C2 f) . (swap x id) = (swap x id) . C2(C1 f)``."""
    return compatible_diff(v1, v2, f) <= check_tolerance(tol)


def commute_diff(v1, v2, f, g):
    f, g = _square(f), _square(g)
    if f.shape != g.shape or v1.d != v2.d:
        raise DimMismatch(f"shapes {f.shape} and {g.shape} (control dims {v1.d}, {v2.d})")
    a, b = apply_variant(v1, f), apply_variant(v2, g)
    return max_abs_diff(b @ a, a @ b)


def check_commute(v1, v2, f, g, tol=1e-10):
    """``C2(g) . C1(f) = C1(f) . C2(g)``."""
    return commute_diff(v1, v2, f, g) <= check_tolerance(tol)


def exhaustive_diff(family, f):
    f = _square(f)
    family = list(family)
    if not family:
        raise ValueError("empty family")
    d = family[0].d
    if any(v.d != d for v in family):
        raise DimMismatch("family members have different control dimensions")
    acc = np.eye(d * f.shape[0], dtype=np.complex128)
    for v in family:
        acc = apply_variant(v, f) @ acc
    return max_abs_diff(acc, np.kron(np.eye(d), f))


def check_exhaustive(family, f, tol=1e-10):
    """Applying ``f`` under every member in turn equals ``id x f``."""
    return exhaustive_diff(family, f) <= check_tolerance(tol)


def functoriality_diff(fn, u, w):
    return max_abs_diff(fn(u @ w), fn(u) @ fn(w))


def random_qudit_unitary(rng, d, n=1):
    return random_unitary(rng, d**n)


def find_commute_witness(v1, v2, trials=1000, seed=COMMUTE_WITNESS_SEED, tol=1e-10):
    """First random ``(f, g)`` pair on which the two variants fail to commute."""
    rng = random.Random(seed)
    for _ in range(trials):
        f, g = random_unitary(rng, 2), random_unitary(rng, 2)
        if not check_commute(v1, v2, f, g, tol):
            return f, g
    return None


def power_map_witness(trials=1000, seed=POWER_MAP_WITNESS_SEED, d=3, tol=1e-10):
    """First random pair ``(u, w)`` breaking functoriality of :func:`power_map`."""
    rng = random.Random(seed)
    fn = lambda m: power_map(m, d)  # noqa: E731
    for _ in range(trials):
        u, w = random_unitary(rng, d), random_unitary(rng, d)
        diff = functoriality_diff(fn, u, w)
        if diff > tol:
            return u, w, diff
    return None


# ------------------------------------------------------ H from C_Z and C_X


@dataclass
class WitnessResult:
    equal: bool
    diff: float
    max_abs: float
    phase: float
    reading: str
    matrix: list

    def to_json(self):
        return dict(self.__dict__)


def czcx_hadamard_witness(tol=1e-12, phase=-math.pi / 4, z_angle=math.pi / 2, x_angle=math.pi / 2):
    """``e^{i phase} . C_Z(z) . C_X(x) . C_Z(z)`` compared with H.

    ``C_Z`` and ``C_X`` control a global phase, so each yields a one-qubit
    rotation; the control wire is the qubit acted on (one-qubit reading).
    ``diff`` is the operator norm of the difference.
    """
    tol = check_tolerance(tol)
    scalar = lambda a: np.array([[np.exp(1j * a)]])  # noqa: E731
    rz = apply_variant(CZ, scalar(z_angle))
    rx = apply_variant(CX, scalar(x_angle))
    m = np.exp(1j * phase) * (rz @ rx @ rz)
    diff = float(np.linalg.norm(m - H_MATRIX, 2))
    return WitnessResult(
        diff <= tol,
        diff,
        max_abs_diff(m, H_MATRIX),
        phase,
        "one-qubit",
        [[[float(z.real), float(z.imag)] for z in row] for row in m],
    )


# ------------------------------------------------------------ conformance


def variants_for(dim):
    if dim == 2:
        return [C1, C0, Cminus, CZ, CX, Csharp, Ck(2, 0), Ck(2, 1)]
    return [Ck(dim, k) for k in range(dim)]


def conformance(dim=2, samples=20, seed=0, tol=1e-10):
    """JSON-ready table of every check for the variants of control dimension ``dim``."""
    if dim not in (2, 3):
        raise DimMismatch(f"control dimension must be 2 or 3, got {dim}")
    rng = random.Random(seed)
    vs = variants_for(dim)
    fs = [random_unitary(rng, dim) for _ in range(samples)]
    gs = [random_unitary(rng, dim) for _ in range(samples)]
    rows = []
    for v in vs:
        func = max(functoriality_diff(lambda m: apply_variant(v, m), f, g) for f, g in zip(fs, gs))
        unital = max_abs_diff(apply_variant(v, np.eye(dim)), np.eye(dim * dim))
        unitary = all(is_unitary(apply_variant(v, f)) for f in fs)
        pts = check_points(v, tol, seed=seed, qubits=(1,)) if v.points() is not None else None
        rows.append(
            {
                "variant": v.name,
                "functorial": func <= tol,
                "functoriality_diff": func,
                "unital": unital <= tol,
                "unitary": unitary,
                "points": None if pts is None else pts.to_json(),
            }
        )
    pairs = []
    for i, a in enumerate(vs):
        for b in vs[i + 1:]:
            comp = max(compatible_diff(a, b, f) for f in fs)
            comm = max(commute_diff(a, b, f, g) for f, g in zip(fs, gs))
            pairs.append(
                {
                    "pair": [a.name, b.name],
                    "compatible": comp <= tol,
                    "compatible_diff": comp,
                    "commute": comm <= tol,
                    "commute_diff": comm,
                }
            )
    family = [Ck(dim, k) for k in range(dim)]
    exh = max(exhaustive_diff(family, f) for f in fs)
    out = {
        "dim": dim,
        "variants": rows,
        "pairs": pairs,
        "exhaustive": {"family": [v.name for v in family], "ok": exh <= tol, "diff": exh},
    }
    if dim == 3:
        w = power_map_witness()
        out["power_map"] = {"functorial": w is None, "witness_diff": None if w is None else w[2]}
    else:
        w = czcx_hadamard_witness()
        out["czcx_hadamard"] = {"equal": w.equal, "diff": w.diff}
    return out
