"""Atomic clock constraints ``x - y ~ c`` over clock indices.

Clock index 0 is the reference clock x0 whose value is always 0, so a
non-diagonal constraint ``x ~ c`` is stored as ``AtomicConstraint(x, 0, ~, c)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

RELATIONS = ("<", "<=", "=", ">=", ">")

_FLIP = {"<": ">", "<=": ">=", "=": "=", ">=": "<=", ">": "<"}
_NEGATE = {"<": (">=",), "<=": (">",), "=": ("<", ">"), ">=": ("<",), ">": ("<=",)}

MAX_CONSTANT = 2**30


@dataclass(frozen=True, order=True)
class AtomicConstraint:
    left: int
    right: int
    rel: str
    constant: int

    def __post_init__(self):
        if self.rel not in RELATIONS:
            raise ValueError(f"unknown relation {self.rel!r}")
        if self.left == 0 and self.right == 0:
            raise ValueError("constraint must mention at least one clock")

    def is_diagonal(self) -> bool:
        # x - x ~ c is allowed; it is constantly true or false
        return self.left != 0 and self.right != 0 and self.left != self.right

    def is_upper(self) -> bool:
        """``x < c`` or ``x <= c`` on a single clock."""
        return self.right == 0 and self.rel in ("<", "<=")

    def is_lower(self) -> bool:
        return self.right == 0 and self.rel in (">", ">=")

    def clocks(self) -> tuple[int, ...]:
        return tuple(i for i in (self.left, self.right) if i != 0)

    def normalized(self) -> AtomicConstraint:
        """Rewrite ``0 - y ~ c`` as ``y ~' -c``; other shapes are returned as is."""
        if self.left == 0:
            return AtomicConstraint(self.right, 0, _FLIP[self.rel], -self.constant)
        return self

    def key(self) -> tuple[int, int, str, int]:
        """Identity up to orientation, so ``x - y > 2`` and ``y - x < -2`` coincide."""
        a = self.normalized()
        if a.is_diagonal() and a.left > a.right:
            a = AtomicConstraint(a.right, a.left, _FLIP[a.rel], -a.constant)
        return (a.left, a.right, a.rel, a.constant)

    def negations(self) -> list[AtomicConstraint]:
        """Atoms whose union is the complement of this one."""
        return [AtomicConstraint(self.left, self.right, r, self.constant) for r in _NEGATE[self.rel]]

    def edges(self):
        """DBM edges ``(i, j, strict, value)`` meaning ``x_i - x_j <(=) value``."""
        l, r, c = self.left, self.right, self.constant
        if self.rel == "<":
            return [(l, r, True, c)]
        if self.rel == "<=":
            return [(l, r, False, c)]
        if self.rel == ">":
            return [(r, l, True, -c)]
        if self.rel == ">=":
            return [(r, l, False, -c)]
        return [(l, r, False, c), (r, l, False, -c)]

    def holds(self, valuation: Sequence) -> bool:
        """Evaluate on a valuation indexed by clock; ``valuation[0]`` is ignored."""
        lv = valuation[self.left] if self.left else 0
        rv = valuation[self.right] if self.right else 0
        return compare(lv - rv, self.rel, self.constant)

    def format(self, names: Sequence[str], eq: str = "=") -> str:
        rel = eq if self.rel == "=" else self.rel
        if self.right == 0:
            return f"{names[self.left]} {rel} {self.constant}"
        if self.left == 0:
            return f"-{names[self.right]} {rel} {self.constant}"
        return f"{names[self.left]} - {names[self.right]} {rel} {self.constant}"


def compare(value, rel: str, constant) -> bool:
    if rel == "<":
        return value < constant
    if rel == "<=":
        return value <= constant
    if rel == "=":
        return value == constant
    if rel == ">=":
        return value >= constant
    return value > constant


def flip(rel: str) -> str:
    return _FLIP[rel]


def satisfies_all(atoms, valuation) -> bool:
    return all(a.holds(valuation) for a in atoms)


def as_fractions(values) -> list[Fraction]:
    return [Fraction(v) for v in values]
