import math

import pytest
from conftest import angles, diagrams
from hypothesis import given

from ctrlprop.angles import format_angle, normalize_angle
from ctrlprop.diagram import CNOT, Ctrl, H, Id, Par, Phase, Seq, Swap, Z
from ctrlprop.errors import ParseError
from ctrlprop.syntax import diagram_hash, parse, to_text


def test_parse_examples():
    assert parse("H") == H
    assert parse("seq(H, H)") == Seq(H, H)
    assert parse("C(ph(pi/3))") == Ctrl(Phase(math.pi / 3))
    assert parse("par(id(1), swap(1,2))") == Par(Id(1), Swap(1, 2))
    assert parse("Z(-pi/2)") == Z(3 * math.pi / 2)
    assert parse("CNOT") == CNOT
    assert parse("ph(3*pi/4)") == Phase(3 * math.pi / 4)
    assert parse("ph(0.25)") == Phase(0.25)


def test_dag_is_eliminated():
    assert parse("dag(seq(H, C(ph(pi/4))))") == Seq(Ctrl(Phase(-math.pi / 4)), H)


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("seq(H,\n  par(H,))", 2, 9),
        ("seq(H,", 1, 7),
        ("Q", 1, 2),
        ("H H", 1, 3),
        ("ph(pi/0)", 1, 8),
    ],
)
def test_parse_errors_carry_position(text, line, column):
    with pytest.raises(ParseError) as exc:
        parse(text)
    assert (exc.value.line, exc.value.column) == (line, column)


def test_angle_printing():
    assert format_angle(math.pi / 2) == "pi/2"
    assert format_angle(3 * math.pi / 2) == "3*pi/2"
    assert format_angle(0.0) == "0"
    assert float(format_angle(0.1234)) == 0.1234


@given(angles)
def test_angle_round_trip_is_lossless(a):
    a = normalize_angle(a)
    assert parse(f"ph({format_angle(a)})").angle == a


@given(diagrams(max_wires=5, depth=8))
def test_round_trip_cqc(d):
    assert parse(to_text(d)) == d


@given(diagrams(dialect="qc", max_wires=5, depth=8))
def test_round_trip_qc(d):
    assert parse(to_text(d)) == d


def test_hash_is_stable_and_structural():
    assert diagram_hash(Seq(H, H)) == diagram_hash(parse("seq(H,H)"))
    assert diagram_hash(Seq(H, H)) != diagram_hash(Par(H, H))
    assert len(diagram_hash(H)) == 16
