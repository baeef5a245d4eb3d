"""Zone-based model checking of timed automata.

Forward reachability with exact, extrapolated (Extra_K, Extra_LU) or
G-simulation based subsumption, and Buchi emptiness with restricted merging.
"""

from .dbm import INF, Bound, Dbm
from .errors import (
    BudgetExhausted,
    ClassMismatch,
    Diverged,
    NegativeClock,
    NotDiagonalFree,
    NotResetOnly,
    ParseError,
    ZoneCheckError,
)
from .liveness import buchi_check
from .model import TimedAutomaton, classify, load, parse
from .reach import Strategy, explore

__all__ = [
    "INF",
    "Bound",
    "Dbm",
    "BudgetExhausted",
    "ClassMismatch",
    "Diverged",
    "NegativeClock",
    "NotDiagonalFree",
    "NotResetOnly",
    "ParseError",
    "ZoneCheckError",
    "buchi_check",
    "TimedAutomaton",
    "classify",
    "load",
    "parse",
    "Strategy",
    "explore",
    "model_path",
]


def model_path(name: str) -> str:
    """Filesystem path of a bundled example model, e.g. ``model_path("abug.ta")``."""
    from importlib import resources

    return str(resources.files(__package__).joinpath("models", name))
