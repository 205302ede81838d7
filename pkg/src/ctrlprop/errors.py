"""Exception hierarchy shared by every module."""


class CtrlPropError(Exception):
    """Base class for all errors raised by ctrlprop."""


class DiagramTypeError(CtrlPropError, TypeError):
    """A sequential composition whose wire counts do not line up."""

    def __init__(self, message, path=()):
        super().__init__(f"{message} (at path {list(path)})")
        self.path = tuple(path)


class InvalidPath(CtrlPropError, LookupError):
    pass


class ArityMismatch(CtrlPropError, ValueError):
    pass


class DialectError(CtrlPropError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        shown = ", ".join(f"{list(p)}: {why}" for p, why in self.violations[:5])
        super().__init__(f"dialect violation(s): {shown}")


class CapExceeded(CtrlPropError, ValueError):
    def __init__(self, wires, cap):
        super().__init__(f"diagram has {wires} wires, cap is {cap}")
        self.wires = wires
        self.cap = cap


class DimMismatch(CtrlPropError, ValueError):
    pass


class NoMatch(CtrlPropError, ValueError):
    pass


# the Euler rewrite historically raised PatternMismatch; keep both names usable
PatternMismatch = NoMatch


class SemanticDriftError(CtrlPropError, AssertionError):
    """A rewrite changed the interpretation. Always an implementation bug."""

    def __init__(self, what, diff):
        super().__init__(f"{what}: interpretation drifted by {diff:.3e}")
        self.diff = diff


class RegistrationFailed(CtrlPropError):
    def __init__(self, rule, max_diff):
        super().__init__(f"rule {rule!r} failed validation (max diff {max_diff:.3e})")
        self.rule = rule
        self.max_diff = max_diff


class NotInFragment(CtrlPropError, ValueError):
    def __init__(self, path, node=None):
        super().__init__(f"subterm at {list(path)} is not in the G fragment: {node}")
        self.path = tuple(path)


class NonTermination(CtrlPropError, RuntimeError):
    def __init__(self, limit):
        super().__init__(f"step budget of {limit} exhausted")
        self.limit = limit


class ParseError(CtrlPropError, ValueError):
    def __init__(self, message, line, column):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column
