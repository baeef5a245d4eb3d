"""Exception hierarchy shared by every zonecheck module."""

from __future__ import annotations


class ZoneCheckError(Exception):
    """Base class for all errors raised by zonecheck."""


class ParseError(ZoneCheckError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        if line:
            super().__init__(f"line {line}, col {column}: {message}")
        else:
            super().__init__(message)


class ModelError(ZoneCheckError):
    """The automaton is well formed but its semantics hit an invalid state."""


class NegativeClock(ModelError):
    def __init__(self, clock: str):
        self.clock = clock
        super().__init__(f"update drives clock {clock} below zero")


class ClassMismatch(ZoneCheckError):
    """The chosen algorithm does not support this class of automata."""


class NotDiagonalFree(ClassMismatch):
    def __init__(self, detail: str = ""):
        msg = "automaton has diagonal constraints; extrapolation is unsound on it"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class NotResetOnly(ClassMismatch):
    def __init__(self, detail: str = ""):
        msg = "automaton has non-reset updates; extrapolation requires resets only"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class Inconclusive(ZoneCheckError):
    """Raised when an analysis stops before reaching a verdict."""


class BudgetExhausted(Inconclusive):
    def __init__(self, budget: int, stats=None):
        self.budget = budget
        self.stats = stats
        super().__init__(f"node budget of {budget} exhausted before saturation")


class Diverged(Inconclusive):
    def __init__(self, state: str, witness: list[str]):
        self.state = state
        self.witness = witness
        tail = ", ".join(witness[-5:])
        super().__init__(
            f"constraint map diverges at state {state} (... {tail}); "
            "use exact exploration or restructure the updates"
        )
