"""Acceptance criteria 1-9 at their stated sample sizes and tolerances.

Each test records a one-line PASS/FAIL summary, printed at the end of the run.
"""

import math
import random
import time

import numpy as np
import pytest

import oracles as O
from conftest import ACCEPTANCE
from ctrlprop.circuits import euler_lhs, euler_rhs, lambda_circuit, mu_circuit
from ctrlprop.diagram import Ctrl, Id, Par, Seq, Swap, ctrl_n, dagger, wires
from ctrlprop.diagram import Phase
from ctrlprop.euler import apply_euler, euler_params
from ctrlprop.multicontrol import (
    C0,
    C1,
    Ck,
    Cminus,
    check_commute,
    check_compatible,
    check_exhaustive,
    check_points,
    czcx_hadamard_witness,
    find_commute_witness,
    power_map_witness,
)
from ctrlprop.perturb import equal_pair, unequal_pair
from ctrlprop.random_diagrams import random_diagram, random_unitary
from ctrlprop.rules import builtin_rules, conjugation, derived_rules, soundness_check
from ctrlprop.semantics import equiv, interpret, max_abs_diff
from ctrlprop.structure import check_conjugation_condition, in_fragment
from ctrlprop.translate import completeness_pipeline, decode, encode, g_reduce


def record(n, title, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}  ({detail})"
    ACCEPTANCE.append(line)
    print(line)
    assert ok, line


def test_criterion_1_rule_soundness():
    t0 = time.perf_counter()
    rules = {}
    for r in builtin_rules("qc") + builtin_rules("cqc") + derived_rules():
        rules.setdefault(r.name, r)
    assert {f"mc2pibare_{n}" for n in range(3, 7)} <= set(rules)
    reports = [soundness_check(r, samples=100, tol=1e-9) for r in rules.values()]
    failed = [r.rule for r in reports if not r.passed]
    worst = max(r.max_diff for r in reports)
    dt = time.perf_counter() - t0
    record(1, "rule soundness", not failed and dt < 60,
           f"{len(reports)} rules, worst {worst:.1e}, {dt:.1f}s, failed={failed}")


def test_criterion_2_control_coherence():
    rng = random.Random(2)
    worst = 0.0
    for _ in range(100):
        f = random_diagram(rng, wires=rng.randint(1, 4), depth=5)
        n = wires(f)
        g = random_diagram(rng, wires=n, depth=5)
        k = rng.randint(1, 2)
        checks = [
            (Ctrl(Par(f, Id(k))), Par(Ctrl(f), Id(k))),
            (Seq(Par(Swap(1, 1), Id(n)), Ctrl(Ctrl(f))), Seq(Ctrl(Ctrl(f)), Par(Swap(1, 1), Id(n)))),
            (Ctrl(Seq(f, g)), Seq(Ctrl(f), Ctrl(g))),
            (Ctrl(Id(n)), Id(n + 1)),
        ]
        if n >= 2:
            p = rng.randint(1, n - 1)
            s, t = Swap(n - p, p), Swap(p, n - p)
            h = random_diagram(rng, wires=n, depth=5)
            checks.append((Seq(Par(Id(1), s), Ctrl(h), Par(Id(1), t)), Ctrl(Seq(s, h, t))))
        for a, b in checks:
            worst = max(worst, equiv(a, b).max_diff)
    record(2, "control coherence and functor laws", worst <= 1e-10, f"100 diagrams, worst {worst:.1e}")


def test_criterion_3_euler():
    rng = random.Random(3)
    worst, in_range = 0.0, True
    for _ in range(1000):
        a1, a2 = rng.uniform(0, 2 * math.pi), rng.uniform(0, 2 * math.pi)
        p = euler_params(a1, a2)
        in_range &= all(0 <= b < 2 * math.pi for b in p.betas)
        for dialect in ("qc", "cqc"):
            lhs = euler_lhs(a1, a2, dialect)
            worst = max(worst, max_abs_diff(interpret(lhs, dialect), interpret(euler_rhs(*p.betas, dialect), dialect)))
    anchors = True
    for (a1, a2), want in O.EULER_ANCHORS.items():
        p = euler_params(a1, a2)
        anchors &= p.case == want["case"]
        if "betas" in want:
            anchors &= np.allclose(p.betas, want["betas"], atol=1e-12)
        assert equiv(euler_lhs(a1, a2, "cqc"), apply_euler(euler_lhs(a1, a2, "cqc")), tol=1e-9).equal
    record(3, "Euler decomposition", worst <= 1e-9 and in_range and anchors,
           f"1000 pairs x 2 dialects, worst {worst:.1e}, anchors={'ok' if anchors else 'bad'}")


def test_criterion_4_lambda_mu():
    t0 = time.perf_counter()
    rng = random.Random(4)
    worst = 0.0
    for n in range(0, 7):
        for _ in range(20):
            a = rng.uniform(0, 2 * math.pi)
            ref = O.mc_phase(n, a)
            lam = interpret(lambda_circuit(n, a), "qc")
            worst = max(worst, max_abs_diff(lam, ref))
            if n >= 1:
                worst = max(worst, max_abs_diff(interpret(mu_circuit(n, a), "cqc"), lam))
            worst = max(worst, max_abs_diff(interpret(ctrl_n(Phase(a), n), "cqc"), lam))
    dt = time.perf_counter() - t0
    record(4, "lambda/mu multi-controlled phases", worst <= 1e-9 and dt < 30, f"n<=6, worst {worst:.1e}, {dt:.1f}s")


def test_criterion_5_translation():
    rng = random.Random(0)
    red = enc = dec = 0.0
    frag = True
    for _ in range(200):
        d = random_diagram(rng, wires=rng.randint(1, 4), depth=10)
        r = g_reduce(d)
        frag &= in_fragment(r)
        m_r = interpret(r)
        red = max(red, max_abs_diff(interpret(d), m_r))
        e = encode(r)
        enc = max(enc, max_abs_diff(interpret(e, "qc"), m_r))
        dec = max(dec, max_abs_diff(interpret(decode(e)), m_r))
    lam = max(
        max_abs_diff(interpret(decode(lambda_circuit(n, a))), interpret(mu_circuit(n, a)))
        for n in range(1, 5)
        for a in (0.3, math.pi, 5.1)
    )
    ok = frag and red <= 1e-9 and enc <= 1e-12 and dec <= 1e-9 and lam <= 1e-9
    record(5, "translation lemmas", ok,
           f"200 diagrams, reduce {red:.1e}, encode {enc:.1e}, decode.encode {dec:.1e}, decode(lambda) {lam:.1e}")


def test_criterion_6_conjugation():
    rng = random.Random(6)
    worst = 0.0
    for _ in range(100):
        n = rng.randint(1, 3)
        f, g = random_diagram(rng, wires=n, depth=5), random_diagram(rng, wires=n, depth=5)
        lhs, rhs = conjugation(f, g)
        worst = max(worst, equiv(lhs, rhs).max_diff)
    report = check_conjugation_condition(angle_samples=20)
    record(6, "conjugation law and condition table", worst <= 1e-9 and report.passed,
           f"100 pairs worst {worst:.1e}, {len(report.cases)} table cases, table {'green' if report.passed else 'red'}")


def test_criterion_7_dagger():
    rng = random.Random(7)
    adj = ident = 0.0
    for _ in range(200):
        d = random_diagram(rng, wires=rng.randint(0, 4), depth=6)
        m = interpret(d)
        adj = max(adj, max_abs_diff(interpret(dagger(d)), m.conj().T))
        ident = max(ident, equiv(Seq(d, dagger(d)), Id(wires(d))).max_diff)
    record(7, "dagger", adj <= 1e-9 and ident <= 1e-9, f"200 diagrams, adjoint {adj:.1e}, identity {ident:.1e}")


def test_criterion_8_multicontrol():
    rng = random.Random(8)
    f, g = random_unitary(rng, 2), random_unitary(rng, 2)
    points = all(check_points(v).ok for v in (C1, C0, Cminus))
    c1c0 = check_compatible(C1, C0, f) and check_commute(C1, C0, f, g)
    wf, wg = find_commute_witness(C1, Cminus)
    noncomm = not check_commute(C1, Cminus, wf, wg)
    exh = all(check_exhaustive([Ck(d, k) for k in range(d)], random_unitary(rng, d)) for d in (2, 3))
    pm = power_map_witness()
    pm_fails = pm is not None and pm[2] > 1e-10
    had = czcx_hadamard_witness(tol=1e-12)
    ok = points and c1c0 and noncomm and exh and pm_fails and had.equal
    record(8, "multicontrol suite", ok,
           f"points={points} C1/C0={c1c0} C1/Cminus witness={noncomm} exhaustive={exh} "
           f"power map diff {pm[2]:.2f}, czcx diff {had.diff:.1e}")


def test_criterion_9_pipeline():
    t0 = time.perf_counter()
    rng = random.Random(9)
    eq_ok = neq_ok = 0
    for _ in range(50):
        c, c2, _ = equal_pair(rng)
        rep = completeness_pipeline(c, c2)
        eq_ok += rep.equal and rep.chain_valid
    for _ in range(50):
        c1, c2 = unequal_pair(rng)
        rep = completeness_pipeline(c1, c2)
        neq_ok += (not rep.equal) and rep.chain_valid
    dt = time.perf_counter() - t0
    record(9, "completeness pipeline", eq_ok == 50 and neq_ok == 50 and dt < 120,
           f"equal {eq_ok}/50, unequal {neq_ok}/50, {dt:.1f}s")
