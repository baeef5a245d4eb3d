"""Extra_K and Extra_LU extrapolation with global or per-state clock bounds.

A missing bound (``None``) means the clock is compared to nothing that still
matters at this state.  It behaves like the constant ``-inf``: every entry it
would cap is dropped, so the clock is left completely free apart from being
non-negative.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import dbm
from .dbm import INF, LE0, Bound, Dbm
from .errors import NotDiagonalFree, NotResetOnly
from .model import TimedAutomaton, classify

MODES = ("global", "per_state")


@dataclass(frozen=True)
class ClockBounds:
    """``lower[q][x]`` / ``upper[q][x]`` for clocks ``x = 1..n`` (index 0 unused)."""

    lower: tuple[tuple[Optional[int], ...], ...]
    upper: tuple[tuple[Optional[int], ...], ...]
    mode: str = "per_state"

    def L(self, q: int) -> list[Optional[int]]:
        return list(self.lower[q][1:])

    def U(self, q: int) -> list[Optional[int]]:
        return list(self.upper[q][1:])

    def K(self, q: int) -> list[Optional[int]]:
        return [_max(l, u) for l, u in zip(self.lower[q][1:], self.upper[q][1:])]


def _max(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return max(a, b)


def compute_bounds(a: TimedAutomaton, mode: str = "per_state") -> ClockBounds:
    """Least fixpoint of backward bound propagation.

    A guard ``x < c`` / ``x <= c`` raises ``U(q, x)`` at its source state, a
    guard ``x > d`` / ``x >= d`` raises ``L(q, x)``, and ``x = c`` raises
    both.  Bounds at ``q'`` flow back across ``q -> q'`` for every clock the
    transition does not reset.
    """
    if mode not in MODES:
        raise ValueError(f"unknown bounds mode {mode!r}")
    cls = classify(a)
    if not cls.diagonal_free:
        raise NotDiagonalFree()
    if not cls.reset_only:
        raise NotResetOnly()
    nq, n = len(a.states), a.n
    lower = [[None] * (n + 1) for _ in range(nq)]
    upper = [[None] * (n + 1) for _ in range(nq)]
    for t in a.transitions:
        for atom in t.guard:
            atom = atom.normalized()
            x, c = atom.left, max(atom.constant, 0)
            if atom.rel in ("<", "<=", "="):
                upper[t.src][x] = _max(upper[t.src][x], c)
            if atom.rel in (">", ">=", "="):
                lower[t.src][x] = _max(lower[t.src][x], c)
    changed = True
    while changed:
        changed = False
        for t in a.transitions:
            reset = t.reset_set()
            for x in range(1, n + 1):
                if x in reset:
                    continue
                for table in (lower, upper):
                    new = _max(table[t.src][x], table[t.dst][x])
                    if new != table[t.src][x]:
                        table[t.src][x] = new
                        changed = True
    if mode == "global":
        lg = [None] * (n + 1)
        ug = [None] * (n + 1)
        for q in range(nq):
            for x in range(1, n + 1):
                lg[x] = _max(lg[x], lower[q][x])
                ug[x] = _max(ug[x], upper[q][x])
        lower = [list(lg) for _ in range(nq)]
        upper = [list(ug) for _ in range(nq)]
    for q in range(nq):
        lower[q][0] = upper[q][0] = 0
    return ClockBounds(tuple(map(tuple, lower)), tuple(map(tuple, upper)), mode)


def extra_lu(m: Dbm, lower: Sequence[Optional[int]], upper: Sequence[Optional[int]]) -> Dbm:
    """Apply Extra_LU entrywise to canonical ``m``.  The result is NOT canonical.

    ``lower`` and ``upper`` list the bounds for ``x1..xn``.
    """
    if not m.canonical:
        raise ValueError("extrapolation expects a canonical DBM")
    n = m.n
    if len(lower) != n or len(upper) != n:
        raise ValueError(f"expected {n} bounds per vector")
    lo = [0, *lower]
    up = [0, *upper]
    s = n + 1
    e = list(m.entries)
    for i in range(s):
        li = lo[i]
        relax = None if li is None else Bound.le(li)
        for j in range(s):
            if i == j:
                continue
            b = e[i * s + j]
            if b.is_inf:
                continue
            if relax is None or b > relax:
                e[i * s + j] = INF if i else LE0
                continue
            uj = up[j]
            if uj is None:
                e[i * s + j] = INF if i else LE0
            elif b < Bound.le(-uj):
                e[i * s + j] = Bound.lt(-uj)
    return Dbm(n, e, canonical=False)


def extra_k(m: Dbm, k: Sequence[Optional[int]]) -> Dbm:
    """Extra_K, which is Extra_LU with ``L = U = K``.  The result is NOT canonical."""
    return extra_lu(m, k, k)


def extrapolate(m: Dbm, bounds: ClockBounds, q: int, variant: str = "LU") -> Optional[Dbm]:
    """Extrapolate with the bounds of state ``q`` and return the canonical form."""
    if variant == "K":
        out = extra_k(m, bounds.K(q))
    elif variant == "LU":
        out = extra_lu(m, bounds.L(q), bounds.U(q))
    else:
        raise ValueError(f"unknown extrapolation variant {variant!r}")
    return dbm.canonicalize(out)
