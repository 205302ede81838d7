import math
import random

import numpy as np
import pytest
from conftest import angles, diagrams
from hypothesis import given
from hypothesis import strategies as st

import oracles as O
from ctrlprop.circuits import lambda_circuit, mu_circuit
from ctrlprop.diagram import CNOT, Ctrl, H, Id, Par, Phase, Seq, Swap, ctrl_n, dagger, flatten, wires
from ctrlprop.errors import NoMatch, NotInFragment
from ctrlprop.random_diagrams import random_diagram
from ctrlprop.rules import BWD, conjugation, get_rule
from ctrlprop.semantics import equiv, interpret, max_abs_diff
from ctrlprop.structure import (
    NAMED,
    SCHEMAS,
    Layer,
    assemble,
    check_conjugation_condition,
    conjugate_control,
    gate_kind,
    in_fragment,
    layerize,
    pad_gate,
    padded_pair,
    swap_conjugation,
)
from ctrlprop.translate import g_reduce

CZ = Ctrl(Ctrl(Phase(math.pi)))


def test_gate_kinds():
    assert gate_kind(Id(3)) == "id"
    assert gate_kind(Phase(1.0)) == "phase"
    assert gate_kind(H) == "h"
    assert gate_kind(Ctrl(Phase(1.0))) == "cphase"
    assert gate_kind(CZ) == "ccpi"
    assert gate_kind(Ctrl(Ctrl(Phase(1.0)))) is None
    assert gate_kind(Ctrl(H)) is None


def test_lambda_closed_form_small():
    assert max_abs_diff(interpret(lambda_circuit(0, 0.7), "qc"), [[np.exp(0.7j)]]) < 1e-15
    assert max_abs_diff(interpret(lambda_circuit(2, math.pi), "qc"), np.diag([1, 1, 1, -1])) < 1e-12


def test_mu_examples():
    assert equiv(mu_circuit(1, 0.4), Ctrl(Phase(0.4))).max_diff == 0
    assert max_abs_diff(interpret(mu_circuit(2, 2 * math.pi)), np.eye(4)) < 1e-12
    rng = random.Random(5)
    for _ in range(20):
        a = rng.uniform(0, 2 * math.pi)
        assert equiv(mu_circuit(3, a), ctrl_n(Phase(a), 3), tol=1e-10).equal


@pytest.mark.parametrize("n", range(1, 7))
def test_lambda_mu_bridge(n):
    rng = random.Random(n)
    for _ in range(5):
        a = rng.uniform(0, 2 * math.pi)
        ref = O.mc_phase(n, a)
        assert max_abs_diff(interpret(lambda_circuit(n, a), "qc"), ref) <= 1e-9
        assert max_abs_diff(interpret(mu_circuit(n, a), "cqc"), ref) <= 1e-9


def test_pad_gate():
    d = pad_gate(H, 1, 2)
    assert wires(d) == 4
    assert max_abs_diff(interpret(d), np.kron(np.kron(np.eye(2), O.H), np.eye(4))) < 1e-15
    assert pad_gate(H, 0, 0) == H


def test_layerize_examples():
    layers = layerize(Par(H, H))
    assert layers == [Layer(0, H, 1), Layer(1, H, 0)]
    d = Seq(Par(H, Id(1)), Par(Id(1), Ctrl(Phase(0.3))), CZ)
    layers = layerize(d)
    assert [l.gate for l in layers] == [H, Ctrl(Phase(0.3)), CZ]
    assert max_abs_diff(interpret(assemble(layers, 2)), interpret(d)) <= 1e-12
    with pytest.raises(NotInFragment):
        layerize(Ctrl(H))
    with pytest.raises(NotInFragment):
        layerize(CNOT)


@given(diagrams(min_wires=1, max_wires=3, depth=5, max_ctrl=1))
def test_layerize_reassembles_exactly(d):
    r = g_reduce(d)
    assert in_fragment(r)
    assert max_abs_diff(interpret(assemble(layerize(r), wires(r))), interpret(r)) <= 1e-12


def test_conjugate_control_forward_and_back():
    f = Ctrl(Ctrl(Phase(0.9)))
    d = Ctrl(Seq(Par(H, Id(1)), f, Par(H, Id(1))))
    out = conjugate_control(d)
    assert out == flatten(Seq(Par(Id(1), H, Id(1)), Ctrl(f), Par(Id(1), H, Id(1))))
    assert equiv(d, out).equal
    back = conjugate_control(out, direction=BWD)
    assert equiv(back, d).equal and isinstance(back, Ctrl)
    with pytest.raises(NoMatch):
        conjugate_control(Ctrl(Seq(H, H, H)), g=Par(Phase(1.0), H))


def test_conjugate_control_with_given_g():
    g = Par(H, Id(1))
    d = Ctrl(Seq(g, CZ, g))
    assert equiv(conjugate_control(d, g=g), d).equal
    with pytest.raises(NoMatch):
        conjugate_control(d, g=Par(Id(1), H))


@given(diagrams(min_wires=1, max_wires=2, depth=4), diagrams(min_wires=1, max_wires=2, depth=4))
def test_conjugation_law(f, g):
    if wires(f) != wires(g):
        g = Id(wires(f))
    lhs, rhs = conjugation(f, g)
    assert equiv(lhs, rhs, tol=1e-10).equal


def test_swap_conjugation():
    rng = random.Random(2)
    f = random_diagram(rng, wires=2, depth=4)
    b = {"k": 0, "p": 1, "q": 1, "l": 0, "f": f}
    d = get_rule("swapconjugation").build("lhs", b)
    out = swap_conjugation(d)
    assert interpret(out).shape == (8, 8)
    assert equiv(d, out, tol=1e-12).equal
    assert equiv(swap_conjugation(out, direction=BWD), d, tol=1e-12).equal
    with pytest.raises(NoMatch):
        swap_conjugation(Seq(H, H))


@given(
    diagrams(min_wires=1, max_wires=2, depth=3),
    st.integers(1, 2),
    st.integers(0, 2),
    st.integers(0, 2),
)
def test_coherence_laws(f, k, p, q):
    n = wires(f)
    # strength
    assert equiv(Ctrl(Par(f, Id(k))), Par(Ctrl(f), Id(k)), tol=1e-10).equal
    # control swap
    lhs = Seq(Par(Swap(1, 1), Id(n)), Ctrl(Ctrl(f)))
    rhs = Seq(Ctrl(Ctrl(f)), Par(Swap(1, 1), Id(n)))
    assert equiv(lhs, rhs, tol=1e-10).equal
    # swap conjugation on a random body of matching width
    if p + q:
        g = random_diagram(random.Random(n * 7 + p), wires=p + q, depth=3)
        s, t = Swap(q, p), Swap(p, q)
        lhs = Seq(Par(Id(1), s), Ctrl(g), Par(Id(1), t))
        assert equiv(lhs, Ctrl(Seq(s, g, t)), tol=1e-10).equal


def test_padded_pair_offsets():
    f, g = padded_pair(CZ, H, 2)
    assert (wires(f), wires(g)) == (2, 2)
    assert f == CZ and equiv(g, Par(H, Id(1))).equal
    f, g = padded_pair(CZ, H, 1)
    assert equiv(g, Par(Id(1), H)).equal


def test_condition_table_is_green():
    report = check_conjugation_condition(angle_samples=20)
    assert report.passed
    table = report.table()
    assert set(table) == {(x, y) for x in SCHEMAS for y in SCHEMAS}
    assert all(all(cell.values()) for cell in table.values())
    assert table[("phase", "phase")] == {"heart": True}
    assert table[("cphase", "ccpi")] == {"club": True}
    assert table[("cphase", "h")] == {"i=1:conjhcalpha": True}
    assert table[("ccpi", "h")] == {"i=1:conjhccpi_var": True, "i=2:conjhccpi": True}
    named = {c.category for c in report.cases} - {"heart", "club"}
    assert named <= set(NAMED.values())


@given(angles)
def test_condition_named_case_cphase_h(a):
    f, g = padded_pair(Ctrl(Phase(a)), H, 1)
    lhs, rhs = conjugation(f, dagger(g))
    assert equiv(lhs, rhs, tol=1e-10).equal
