import json
import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles as O
from ctrlprop.errors import DimMismatch
from ctrlprop.multicontrol import (
    C0,
    C1,
    CX,
    CZ,
    Ck,
    ControlVariant,
    Cminus,
    Csharp,
    apply_variant,
    check_commute,
    check_compatible,
    check_exhaustive,
    check_nested_points,
    check_points,
    commute_diff,
    conformance,
    czcx_hadamard_witness,
    find_commute_witness,
    functoriality_diff,
    power_map,
    power_map_witness,
)
from ctrlprop.random_diagrams import random_unitary

seeds = st.integers(0, 2**31)


def _ctrl_block(u):
    n = u.shape[0]
    out = np.eye(2 * n, dtype=complex)
    out[n:, n:] = u
    return out


def test_c1_is_block_diagonal():
    u = random_unitary(random.Random(0), 4)
    assert np.allclose(apply_variant(C1, u), _ctrl_block(u))
    x = np.array([[0, 1], [1, 0]])
    c0 = np.kron(x, np.eye(4)) @ _ctrl_block(u) @ np.kron(x, np.eye(4))
    assert np.allclose(apply_variant(C0, u), c0)
    hh = np.kron(O.H, np.eye(4))
    # Cminus fires on |->, i.e. C1 conjugated by H on the control
    assert np.allclose(apply_variant(Cminus, u), hh @ _ctrl_block(u) @ hh)


def test_tag_aliases_share_semantics():
    u = random_unitary(random.Random(1), 2)
    assert np.allclose(apply_variant(CZ, u), apply_variant(C1, u))
    assert np.allclose(apply_variant(CX, u), apply_variant(Cminus, u))


def test_variant_validation():
    with pytest.raises(ValueError):
        ControlVariant("nope")
    with pytest.raises(ValueError):
        Ck(3, 3)
    with pytest.raises(ValueError):
        ControlVariant("C1", d=3)
    with pytest.raises(DimMismatch):
        apply_variant(C1, np.eye(3))
    with pytest.raises(DimMismatch):
        apply_variant(Ck(3, 1), np.eye(2))
    with pytest.raises(DimMismatch):
        apply_variant(C1, np.eye(2)[:1])


@pytest.mark.parametrize("v", [C1, C0, Cminus, CZ, CX, Ck(2, 0), Ck(3, 2)])
def test_points_pass(v):
    rep = check_points(v, qubits=(1, 2) if v.d == 2 else (1,))
    assert rep.ok and rep.true_diff <= 1e-10 and rep.false_diff <= 1e-10
    json.dumps(rep.to_json())


def test_csharp_has_no_points():
    rep = check_points(Csharp)
    assert not rep.ok and rep.true_point is None


def test_swapped_points_fail():
    t, f = C1.points()
    assert not check_points(C1, points=(f, t)).ok
    with pytest.raises(ValueError):
        check_points(C1, points=(2 * t, f))


def test_nested_points():
    assert check_nested_points(C1, C0)
    assert check_nested_points(Cminus, C1)


@given(seeds)
def test_c1_c0_compatible_and_commuting(seed):
    rng = random.Random(seed)
    f, g = random_unitary(rng, 2), random_unitary(rng, 2)
    assert check_compatible(C1, C0, f)
    assert check_commute(C1, C0, f, g)


@given(seeds)
def test_same_variant_self_compatible(seed):
    f = random_unitary(random.Random(seed), 2)
    for v in (C1, C0, Cminus, Csharp):
        assert check_compatible(v, v, f)


def test_recorded_c1_cminus_witness():
    w = find_commute_witness(C1, Cminus)
    assert w is not None
    f, g = w
    assert not check_commute(C1, Cminus, f, g)
    assert commute_diff(C1, Cminus, f, g) > 1e-3
    # the witness is reproducible
    f2, g2 = find_commute_witness(C1, Cminus)
    assert np.array_equal(f, f2) and np.array_equal(g, g2)


@pytest.mark.parametrize("d", [2, 3])
@given(seed=seeds)
def test_ck_family_exhaustive(d, seed):
    f = random_unitary(random.Random(seed), d)
    assert check_exhaustive([Ck(d, k) for k in range(d)], f)


def test_partial_family_not_exhaustive():
    f = random_unitary(random.Random(4), 3)
    assert not check_exhaustive([Ck(3, 0), Ck(3, 1)], f)


@given(seeds)
def test_ck_functorial(seed):
    rng = random.Random(seed)
    u, w = random_unitary(rng, 3), random_unitary(rng, 3)
    assert functoriality_diff(lambda m: apply_variant(Ck(3, 1), m), u, w) <= 1e-12


def test_power_map_witness_breaks_functoriality():
    w = power_map_witness()
    assert w is not None
    u, v, diff = w
    assert diff > 1e-3
    assert functoriality_diff(lambda m: power_map(m, 3), u, v) == pytest.approx(diff)
    # the qubit power map is plain control and stays functorial
    rng = random.Random(0)
    a, b = random_unitary(rng, 2), random_unitary(rng, 2)
    assert functoriality_diff(lambda m: power_map(m, 2), a, b) <= 1e-12


def test_czcx_generates_hadamard():
    w = czcx_hadamard_witness()
    assert w.equal and w.diff <= 1e-12 and w.max_abs <= 1e-12
    m = np.array([[complex(*z) for z in row] for row in w.matrix])
    assert np.allclose(m, O.H)


def test_czcx_negative_controls():
    w = czcx_hadamard_witness(phase=0.0)
    assert not w.equal
    assert w.diff == pytest.approx(abs(1 - np.exp(1j * math.pi / 4)), abs=1e-12)
    assert not czcx_hadamard_witness(x_angle=0.0).equal


@given(seeds)
def test_variants_are_unitary(seed):
    u = random_unitary(random.Random(seed), 4)
    for v in (C1, C0, Cminus, Csharp):
        m = apply_variant(v, u)
        assert np.allclose(m.conj().T @ m, np.eye(8))


def test_conformance_tables():
    t2 = json.loads(json.dumps(conformance(2, samples=5)))
    names = [r["variant"] for r in t2["variants"]]
    assert {"C1", "C0", "Cminus", "CZ", "CX", "Csharp"} <= set(names)
    assert all(r["functorial"] and r["unital"] and r["unitary"] for r in t2["variants"])
    pairs = {tuple(p["pair"]): p for p in t2["pairs"]}
    assert pairs[("C1", "C0")]["compatible"] and pairs[("C1", "C0")]["commute"]
    assert not pairs[("C1", "Cminus")]["commute"]
    assert t2["exhaustive"]["ok"] and t2["czcx_hadamard"]["equal"]
    t3 = conformance(3, samples=5)
    assert t3["exhaustive"]["ok"] and not t3["power_map"]["functorial"]
    with pytest.raises(DimMismatch):
        conformance(4)
