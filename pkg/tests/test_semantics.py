import cmath
import math

import numpy as np
import pytest
from conftest import angles, diagrams
from hypothesis import given

import oracles as O
from ctrlprop.circuits import lambda_circuit
from ctrlprop.diagram import CNOT, Ctrl, H, Id, Par, Phase, Seq, Swap, Z, dagger, expand_swaps, flatten, wires
from ctrlprop.errors import ArityMismatch, CapExceeded, DialectError
from ctrlprop.semantics import (
    equiv,
    interpret,
    is_unitary,
    kron,
    matmul,
    matrix_from_json,
    matrix_to_json,
    max_abs_diff,
)


def test_generator_matrices():
    assert max_abs_diff(interpret(H), O.H) < 1e-15
    assert max_abs_diff(interpret(Ctrl(H)), np.block([[np.eye(2), np.zeros((2, 2))], [np.zeros((2, 2)), O.H]])) < 1e-15
    assert max_abs_diff(interpret(Swap(1, 1)), [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]) == 0
    assert max_abs_diff(interpret(CNOT), O.CNOT) == 0
    assert max_abs_diff(interpret(Z(0.7)), O.z(0.7)) == 0
    assert interpret(Phase(1.0)).shape == (1, 1)


def test_equiv_examples():
    r = equiv(Seq(H, H), Id(1))
    assert r.equal and r.max_diff < 1e-15
    assert equiv(Phase(2 * math.pi), Id(0)).equal
    r = equiv(Phase(math.pi), Id(0))
    assert not r.equal and abs(r.max_diff - 2.0) < 1e-15
    with pytest.raises(ArityMismatch):
        equiv(H, Id(2))


def test_global_phase_is_observable():
    assert not equiv(Par(Phase(0.5), H), H).equal


def test_dialect_and_cap_errors(monkeypatch):
    with pytest.raises(DialectError):
        interpret(Z(1.0), "cqc")
    with pytest.raises(DialectError):
        interpret(Ctrl(H), "qc")
    monkeypatch.setenv("CTRLPROP_MAX_WIRES", "3")
    with pytest.raises(CapExceeded):
        interpret(Id(4))
    assert interpret(Id(3)).shape == (8, 8)


def test_tolerance_bounds():
    with pytest.raises(ValueError):
        equiv(H, H, tol=0.0)
    with pytest.raises(ValueError):
        equiv(H, H, tol=0.1)


def test_unitarity():
    assert not is_unitary(2 * np.eye(2))
    assert is_unitary(interpret(lambda_circuit(4, 1.3), "qc"))


def test_matrix_algebra():
    a = cmath.exp(0.4j)
    assert max_abs_diff(kron(np.eye(2), np.array([[a]])), a * np.eye(2)) < 1e-15
    assert max_abs_diff(matmul(O.H, O.H), np.eye(2)) < 1e-15
    assert max_abs_diff(kron(O.z(math.pi), np.eye(2)), np.diag([1, 1, -1, -1])) < 1e-15


def test_matrix_json_round_trip():
    m = interpret(Ctrl(H))
    assert max_abs_diff(matrix_from_json(matrix_to_json(m)), m) == 0


@given(diagrams(max_wires=4))
def test_interpret_matches_oracle_cqc(d):
    assert max_abs_diff(interpret(d, "cqc"), O.matrix(d)) < 1e-12


@given(diagrams(dialect="qc", max_wires=4))
def test_interpret_matches_oracle_qc(d):
    assert max_abs_diff(interpret(d, "qc"), O.matrix(d)) < 1e-12


@given(diagrams(min_wires=2, max_wires=2, depth=4), diagrams(min_wires=2, max_wires=2, depth=4))
def test_composition_order_convention(a, b):
    # the first Seq child is applied first; Par is the Kronecker product
    ma, mb = interpret(a, "cqc"), interpret(b, "cqc")
    assert max_abs_diff(interpret(Seq(a, b), "cqc"), mb @ ma) < 1e-12
    assert max_abs_diff(interpret(Par(a, b), "cqc"), np.kron(ma, mb)) < 1e-12


@given(diagrams(max_wires=4))
def test_dagger_is_adjoint_cqc(d):
    assert max_abs_diff(interpret(dagger(d), "cqc"), interpret(d, "cqc").conj().T) < 1e-12


@given(diagrams(dialect="qc", max_wires=4))
def test_dagger_is_adjoint_qc(d):
    assert max_abs_diff(interpret(dagger(d), "qc"), interpret(d, "qc").conj().T) < 1e-12


@given(diagrams(max_wires=4, depth=8))
def test_flatten_and_swap_expansion_are_exact(d):
    m = interpret(d, "cqc")
    assert max_abs_diff(interpret(flatten(d), "cqc"), m) <= 1e-12
    assert max_abs_diff(interpret(expand_swaps(d), "cqc"), m) <= 1e-12


@given(diagrams(max_wires=3, depth=4), diagrams(max_wires=3, depth=4))
def test_control_is_functorial(f, g):
    if wires(f) != wires(g):
        g = Id(wires(f))
    assert equiv(Ctrl(Seq(f, g)), Seq(Ctrl(f), Ctrl(g)), tol=1e-10).equal


@pytest.mark.parametrize("n", range(5))
def test_control_of_identity(n):
    assert max_abs_diff(interpret(Ctrl(Id(n))), np.eye(2 ** (n + 1))) == 0


@given(diagrams(max_wires=4))
def test_interpretations_are_unitary(d):
    assert is_unitary(interpret(d))


@given(angles)
def test_phase_scalar(a):
    assert abs(interpret(Phase(a))[0, 0] - cmath.exp(1j * a)) < 1e-15
