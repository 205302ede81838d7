"""Text syntax for diagrams.

::

    term  := "id(" nat ")" | "swap(" nat "," nat ")" | "ph(" angle ")" | "H"
           | "Z(" angle ")" | "CNOT" | "C(" term ")" | "dag(" term ")"
           | "seq(" term ("," term)+ ")" | "par(" term ("," term)+ ")"
    angle := decimal | ["-"] [nat "*"] "pi" ["/" nat]

Whitespace is ignored. ``dag(...)`` is eliminated while parsing.
"""

import hashlib
import math
import re

from .angles import format_angle
from .diagram import CNOT, H, Cnot, Ctrl, Diagram, Hadamard, Id, Par, Phase, Seq, Swap, Z, dagger
from .errors import ParseError

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)"
    r"|(?P<word>[A-Za-z_]+)|(?P<sym>[(),*/+-]))"
)


class _Lexer:
    def __init__(self, text):
        self.text = text
        self.pos = 0
        self.tokens = []
        while True:
            m = _TOKEN.match(text, self.pos)
            if not m or m.end() == self.pos:
                rest = text[self.pos:]
                if rest.strip():
                    offset = self.pos + len(rest) - len(rest.lstrip())
                    raise ParseError(f"unexpected character {text[offset]!r}", *self._where(offset))
                break
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            self.pos = m.end()
        self.i = 0

    def _where(self, offset):
        line = self.text.count("\n", 0, offset) + 1
        col = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        return line, col

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def next(self):
        tok = self.peek()
        if tok[0] is None:
            raise ParseError("unexpected end of input", *self._where(len(self.text)))
        self.i += 1
        return tok

    def expect(self, value):
        kind, text, pos = self.next()
        if text != value:
            raise ParseError(f"expected {value!r}, found {text!r}", *self._where(pos))

    def error(self, message, tok=None):
        pos = (tok or self.peek())[2]
        return ParseError(message, *self._where(pos))


def parse(text):
    """Parse one term; raise ParseError with line and column on failure."""
    lex = _Lexer(text)
    d = _term(lex)
    if lex.peek()[0] is not None:
        raise lex.error(f"trailing input {lex.peek()[1]!r}")
    return d


def _nat(lex):
    tok = lex.next()
    if tok[0] != "num" or not tok[1].isdigit():
        raise lex.error(f"expected a natural number, found {tok[1]!r}", tok)
    return int(tok[1])


def _angle(lex):
    sign = 1.0
    if lex.peek()[1] == "-":
        lex.next()
        sign = -1.0
    tok = lex.next()
    if tok[0] == "num":
        if lex.peek()[1] == "*":
            if not tok[1].isdigit():
                raise lex.error("pi coefficient must be a natural number", tok)
            lex.next()
            word = lex.next()
            if word[1] != "pi":
                raise lex.error(f"expected 'pi', found {word[1]!r}", word)
            return sign * int(tok[1]) * math.pi / _denominator(lex)
        return sign * float(tok[1])
    if tok[1] == "pi":
        return sign * math.pi / _denominator(lex)
    raise lex.error(f"expected an angle, found {tok[1]!r}", tok)


def _denominator(lex):
    if lex.peek()[1] == "/":
        lex.next()
        den = _nat(lex)
        if den == 0:
            raise lex.error("zero denominator")
        return den
    return 1


def _term(lex):
    tok = lex.next()
    kind, word, _ = tok
    if kind != "word":
        raise lex.error(f"expected a term, found {word!r}", tok)
    if word == "H":
        return H
    if word == "CNOT":
        return CNOT
    lex.expect("(")
    if word == "id":
        d = Id(_nat(lex))
    elif word == "swap":
        n = _nat(lex)
        lex.expect(",")
        d = Swap(n, _nat(lex))
    elif word == "ph":
        d = Phase(_angle(lex))
    elif word == "Z":
        d = Z(_angle(lex))
    elif word == "C":
        d = Ctrl(_term(lex))
    elif word == "dag":
        d = dagger(_term(lex))
    elif word in ("seq", "par"):
        kids = [_term(lex)]
        while lex.peek()[1] == ",":
            lex.next()
            kids.append(_term(lex))
        if len(kids) < 2:
            raise lex.error(f"{word} needs at least two terms")
        d = Seq(kids) if word == "seq" else Par(kids)
    else:
        raise lex.error(f"unknown constructor {word!r}", tok)
    lex.expect(")")
    return d


def to_text(d):
    if isinstance(d, Phase):
        return f"ph({format_angle(d.angle)})"
    if isinstance(d, Hadamard):
        return "H"
    if isinstance(d, Z):
        return f"Z({format_angle(d.angle)})"
    if isinstance(d, Cnot):
        return "CNOT"
    if isinstance(d, Id):
        return f"id({d.n})"
    if isinstance(d, Swap):
        return f"swap({d.n},{d.m})"
    if isinstance(d, Ctrl):
        return f"C({to_text(d.body)})"
    if isinstance(d, (Seq, Par)):
        name = "seq" if isinstance(d, Seq) else "par"
        kids = [to_text(c) for c in d.children]
        if len(kids) == 1:
            # one-child lists are not in the grammar; they denote the child
            return kids[0]
        if not kids:
            return "id(0)"
        return f"{name}({','.join(kids)})"
    raise TypeError(f"not a diagram: {d!r}")


def diagram_hash(d: Diagram) -> str:
    return hashlib.sha256(to_text(d).encode()).hexdigest()[:16]
