"""Difference bound matrices and the zone operations of forward analysis.

A DBM over clocks ``x1..xn`` is an ``(n+1) x (n+1)`` matrix of :class:`Bound`
values; entry ``(i, j)`` bounds ``x_i - x_j`` and ``x0`` is the constant 0.
Operations never mutate their inputs.  Operations that can produce the empty
zone return ``None``.

Canonical DBMs here also carry the implicit facts ``x_i - x_i <= 0`` and
``x0 - x_i <= 0`` (clocks are non-negative), which makes the canonical form
the pointwise-least DBM among those denoting the same set of valuations.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from .constraints import MAX_CONSTANT, AtomicConstraint

INT32_MAX = 2**31 - 1
INT32_MIN = -(2**31)

_INF_KEY = math.inf


class Bound:
    """A DBM entry: ``(<, m)``, ``(<=, m)``, or the infinite bound ``(<, inf)``.

    Bounds are totally ordered with ``(<, m) < (<=, m) < (<, m+1)`` and
    infinity on top.  ``key`` packs this order into one integer,
    ``2*m + (0 if strict else 1)``.
    """

    __slots__ = ("value", "strict", "key")

    def __init__(self, value: Optional[int], strict: bool = False):
        if value is None:
            self.value = None
            self.strict = True
            self.key = _INF_KEY
            return
        if not INT32_MIN <= value <= INT32_MAX:
            raise OverflowError(f"bound value {value} outside 32-bit range")
        self.value = int(value)
        self.strict = bool(strict)
        self.key = 2 * self.value + (0 if self.strict else 1)

    @classmethod
    def le(cls, value: int) -> Bound:
        return cls(value, False)

    @classmethod
    def lt(cls, value: int) -> Bound:
        return cls(value, True)

    @classmethod
    def from_key(cls, key) -> Bound:
        if key == _INF_KEY:
            return INF
        return cls(key >> 1, not (key & 1))

    @property
    def is_inf(self) -> bool:
        return self.value is None

    def __add__(self, other: Bound) -> Bound:
        if self.value is None or other.value is None:
            return INF
        return Bound(self.value + other.value, self.strict or other.strict)

    def __neg__(self):
        raise TypeError("bounds cannot be negated; build the opposite bound explicitly")

    def __lt__(self, other: Bound) -> bool:
        return self.key < other.key

    def __le__(self, other: Bound) -> bool:
        return self.key <= other.key

    def __gt__(self, other: Bound) -> bool:
        return self.key > other.key

    def __ge__(self, other: Bound) -> bool:
        return self.key >= other.key

    def __eq__(self, other) -> bool:
        return isinstance(other, Bound) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __repr__(self) -> str:
        if self.value is None:
            return "INF"
        return f"Bound({'<' if self.strict else '<='}, {self.value})"

    def __str__(self) -> str:
        if self.value is None:
            return "inf"
        return f"<{self.value}" if self.strict else str(self.value)


INF = Bound(None)
LE0 = Bound(0, False)
LT0 = Bound(0, True)


def _key_sum(a, b):
    # Callers ensure neither key is infinite.
    return (a & ~1) + (b & ~1) + (a & b & 1)


class Dbm:
    """Immutable square matrix of bounds over ``n`` clocks."""

    __slots__ = ("n", "entries", "canonical", "_hash")

    def __init__(self, n: int, entries: Sequence[Bound], canonical: bool = False):
        size = n + 1
        if len(entries) != size * size:
            raise ValueError(f"expected {size * size} entries, got {len(entries)}")
        self.n = n
        self.entries = tuple(entries)
        self.canonical = canonical
        self._hash = None

    @property
    def size(self) -> int:
        return self.n + 1

    def __getitem__(self, ij: tuple[int, int]) -> Bound:
        i, j = ij
        return self.entries[i * (self.n + 1) + j]

    def rows(self) -> list[list[Bound]]:
        s = self.n + 1
        return [list(self.entries[i * s:(i + 1) * s]) for i in range(s)]

    def keys(self) -> list:
        return [b.key for b in self.entries]

    def __eq__(self, other) -> bool:
        return isinstance(other, Dbm) and self.n == other.n and self.entries == other.entries

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.n, tuple(b.key for b in self.entries)))
        return self._hash

    def __le__(self, other: Dbm) -> bool:
        """Pointwise order on entries."""
        return all(a.key <= b.key for a, b in zip(self.entries, other.entries))

    def __repr__(self) -> str:
        return f"Dbm(n={self.n}, canonical={self.canonical})\n{format_dbm(self)}"


def _from_keys(n: int, keys, canonical: bool) -> Dbm:
    return Dbm(n, [Bound.from_key(k) for k in keys], canonical)


# -- construction -------------------------------------------------------------


def from_rows(rows: Sequence[Sequence], canonical: bool = False) -> Dbm:
    """Build a DBM from rows of ints (non-strict), ``None`` (infinity) or Bounds."""
    entries = []
    for row in rows:
        if len(row) != len(rows):
            raise ValueError("DBM must be square")
        for v in row:
            if isinstance(v, Bound):
                entries.append(v)
            elif v is None or v == math.inf:
                entries.append(INF)
            else:
                entries.append(Bound.le(int(v)))
    return Dbm(len(rows) - 1, entries, canonical)


def universal(n: int) -> Dbm:
    """All non-negative valuations."""
    s = n + 1
    entries = [INF] * (s * s)
    for i in range(s):
        entries[i * s + i] = LE0
        entries[i] = LE0
    return Dbm(n, entries, canonical=True)


def zero(n: int) -> Dbm:
    """The point zone ``{0}``."""
    return Dbm(n, [LE0] * ((n + 1) ** 2), canonical=True)


def from_guard(guard: Iterable[AtomicConstraint], n: int) -> Optional[Dbm]:
    """Canonical DBM of a conjunction of atoms, or ``None`` if unsatisfiable."""
    s = n + 1
    u = universal(n)
    entries = list(u.entries)
    for atom in guard:
        if abs(atom.constant) > MAX_CONSTANT:
            raise OverflowError(f"constant {atom.constant} exceeds {MAX_CONSTANT}")
        if max(atom.left, atom.right) > n:
            raise ValueError(f"atom mentions clock {max(atom.left, atom.right)} but n = {n}")
        for i, j, strict, value in atom.edges():
            b = Bound(value, strict)
            if b < entries[i * s + j]:
                entries[i * s + j] = b
    return canonicalize(Dbm(n, entries))


# -- normal form --------------------------------------------------------------


def _close(keys: list, s: int) -> bool:
    """Floyd-Warshall on packed keys, in place.  False on a negative cycle."""
    inf = _INF_KEY
    for k in range(s):
        row_k = k * s
        for i in range(s):
            ik = keys[i * s + k]
            if ik == inf:
                continue
            row_i = i * s
            base = ik & ~1
            flag = ik & 1
            for j in range(s):
                kj = keys[row_k + j]
                if kj == inf:
                    continue
                cand = base + (kj & ~1) + (flag & kj)
                if cand < keys[row_i + j]:
                    keys[row_i + j] = cand
        for i in range(s):
            if keys[i * s + i] < 1:
                return False
    return True


def canonicalize(m: Dbm) -> Optional[Dbm]:
    """Shortest-path closure; ``None`` when the zone is empty."""
    s = m.n + 1
    keys = m.keys()
    for i in range(s):
        if keys[i * s + i] > 1:
            keys[i * s + i] = 1
        if keys[i] > 1:
            keys[i] = 1
    if not _close(keys, s):
        return None
    return _from_keys(m.n, keys, canonical=True)


def is_included(a: Dbm, b: Dbm) -> bool:
    """``[[a]] <= [[b]]`` for canonical ``a``: a pointwise comparison."""
    if not a.canonical:
        raise ValueError("left operand of is_included must be canonical")
    return all(x.key <= y.key for x, y in zip(a.entries, b.entries))


def is_canonical(m: Dbm) -> bool:
    """Check closure directly; used by tests and assertions."""
    s = m.n + 1
    e = m.entries
    for i in range(s):
        if e[i * s + i] != LE0 or not e[i] <= LE0:
            return False
    for i in range(s):
        for k in range(s):
            for j in range(s):
                if e[i * s + k] + e[k * s + j] < e[i * s + j]:
                    return False
    return True


# -- operations ---------------------------------------------------------------


def tighten(m: Dbm, i: int, j: int, bound: Bound) -> Optional[Dbm]:
    """Intersect canonical ``m`` with ``x_i - x_j <bound>`` in O(n^2)."""
    s = m.n + 1
    e = m.entries
    if bound.is_inf or not bound < e[i * s + j]:
        return m
    if (bound + e[j * s + i]) < LE0:
        return None
    keys = [b.key for b in e]
    inf = _INF_KEY
    bk = bound.key
    col_i = [keys[k * s + i] for k in range(s)]
    row_j = keys[j * s: j * s + s]
    for k in range(s):
        ki = col_i[k]
        if ki == inf:
            continue
        via = _key_sum(ki, bk)
        base = via & ~1
        flag = via & 1
        row_k = k * s
        for l in range(s):
            jl = row_j[l]
            if jl == inf:
                continue
            cand = base + (jl & ~1) + (flag & jl)
            if cand < keys[row_k + l]:
                keys[row_k + l] = cand
    return _from_keys(m.n, keys, canonical=True)


def constrain(m: Dbm, atom: AtomicConstraint) -> Optional[Dbm]:
    """Intersect canonical ``m`` with one atomic constraint."""
    if not m.canonical:
        raise ValueError("constrain expects a canonical DBM")
    out: Optional[Dbm] = m
    for i, j, strict, value in atom.edges():
        out = tighten(out, i, j, Bound(value, strict))
        if out is None:
            return None
    return out


def constrain_all(m: Dbm, atoms: Iterable[AtomicConstraint]) -> Optional[Dbm]:
    out: Optional[Dbm] = m
    for atom in atoms:
        out = constrain(out, atom)
        if out is None:
            return None
    return out


def intersect(a: Dbm, b: Dbm) -> Optional[Dbm]:
    if a.n != b.n:
        raise ValueError("DBMs over different clock sets")
    return canonicalize(Dbm(a.n, [x if x.key <= y.key else y for x, y in zip(a.entries, b.entries)]))


def reset(m: Dbm, clocks: Iterable[int]) -> Dbm:
    """Set each clock in ``clocks`` to 0; rows/columns copy those of x0."""
    if not m.canonical:
        raise ValueError("reset expects a canonical DBM")
    clocks = sorted(set(clocks))
    if not clocks:
        return m
    s = m.n + 1
    e = list(m.entries)
    for i in clocks:
        for j in range(s):
            e[i * s + j] = e[j]
            e[j * s + i] = e[j * s]
        e[i * s + i] = LE0
    return Dbm(m.n, e, canonical=True)


def future(m: Dbm) -> Dbm:
    """Let time elapse: drop the upper bounds ``x_i - x0``."""
    if not m.canonical:
        raise ValueError("future expects a canonical DBM")
    s = m.n + 1
    e = list(m.entries)
    for i in range(1, s):
        e[i * s] = INF
    return Dbm(m.n, e, canonical=True)


def is_future_closed(m: Dbm) -> bool:
    s = m.n + 1
    return all(m.entries[i * s].is_inf for i in range(1, s))


def shift(m: Dbm, i: int, d: int) -> Dbm:
    """Translate clock ``x_i`` by ``d`` (``x_i := x_i + d``); keeps canonicity.

    The caller checks non-negativity of the result.
    """
    if not m.canonical:
        raise ValueError("shift expects a canonical DBM")
    if d == 0:
        return m
    s = m.n + 1
    e = list(m.entries)
    plus, minus = Bound.le(d), Bound.le(-d)
    for j in range(s):
        if j == i:
            continue
        e[i * s + j] = e[i * s + j] + plus
        e[j * s + i] = e[j * s + i] + minus
    return Dbm(m.n, e, canonical=True)


def submatrix(m: Dbm, clocks: Sequence[int]) -> Dbm:
    """Projection onto ``x0`` and the listed clocks (canonical if ``m`` is)."""
    idx = [0] + list(clocks)
    s = m.n + 1
    e = m.entries
    return Dbm(len(clocks), [e[i * s + j] for i in idx for j in idx], m.canonical)


def contains(m: Dbm, valuation: Sequence) -> bool:
    """Membership of a valuation given as values for ``x1..xn``."""
    v = [Fraction(0)] + [Fraction(x) for x in valuation]
    if any(x < 0 for x in v):
        return False
    s = m.n + 1
    for i in range(s):
        for j in range(s):
            b = m.entries[i * s + j]
            if b.is_inf:
                continue
            diff = v[i] - v[j]
            if diff > b.value or (b.strict and diff == b.value):
                return False
    return True


def to_constraints(m: Dbm) -> list[AtomicConstraint]:
    """Finite off-diagonal entries as atoms, skipping the implicit ``x >= 0``."""
    s = m.n + 1
    atoms = []
    for i in range(s):
        for j in range(s):
            if i == j:
                continue
            b = m.entries[i * s + j]
            if b.is_inf or (i == 0 and b == LE0):
                continue
            rel = "<" if b.strict else "<="
            if i == 0:
                atoms.append(AtomicConstraint(j, 0, ">" if b.strict else ">=", -b.value))
            else:
                atoms.append(AtomicConstraint(i, j, rel, b.value))
    return atoms


def format_zone(m: Dbm, names: Sequence[str]) -> str:
    """Conjunction of the zone's constraints, e.g. ``x1 >= 3 && x1 - x2 <= 4``."""
    atoms = to_constraints(m)
    if not atoms:
        return "true"
    return " && ".join(a.format(names) for a in atoms)


def format_dbm(m: Dbm, names: Optional[Sequence[str]] = None) -> str:
    """Matrix layout with row and column headers; infinity shows as ``inf``."""
    s = m.n + 1
    names = list(names) if names else [f"x{i}" for i in range(s)]
    cells = [[str(m.entries[i * s + j]) for j in range(s)] for i in range(s)]
    width = max(len(c) for row in cells + [names] for c in row)
    head = " " * width + " " + " ".join(n.rjust(width) for n in names)
    lines = [head]
    for i in range(s):
        lines.append(names[i].rjust(width) + " " + " ".join(c.rjust(width) for c in cells[i]))
    return "\n".join(lines)
