"""G-simulation: constraint maps and the zone simulation test.

``(q, v) <=_G (q, v')`` holds when, for every delay ``d`` and every atom
``phi`` in ``G(q)``, ``v + d |= phi`` implies ``v' + d |= phi``.

For a fixed ``v`` each atom restricts ``v'`` by one convex condition:

=========  ==========================  =========================
atom       when                        requirement on ``v'``
=========  ==========================  =========================
x < c      v(x) < c                    v'(x) <= v(x)
x <= c     v(x) <= c                   v'(x) <= v(x)
x > d      v(x) > d / v(x) <= d        v'(x) > d / v'(x) >= v(x)
x >= d     v(x) >= d / v(x) < d        v'(x) >= d / v'(x) >= v(x)
x = c      v(x) <= c                   v'(x) = v(x)
x - y ~ c  v |= x - y ~ c              v' |= x - y ~ c
=========  ==========================  =========================

so the zone test splits ``Z`` into cells on which these cases are constant and
checks each cell against the set of valuations that some ``v'`` in ``Z'``
covers.  That set is the projection of a difference system over ``v`` and
``v'`` together, hence itself a zone.  Without diagonals the test further
decomposes into independent checks on pairs of clocks.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Callable, Iterable, Mapping, Optional, Sequence

from . import dbm
from .constraints import AtomicConstraint
from .dbm import Dbm
from .errors import Diverged
from .model import TimedAutomaton, Update

DEFAULT_ITERATION_CAP = 10_000
DEFAULT_SPLIT_BUDGET = 4096


# -- pre operators ------------------------------------------------------------


def pre_reset(phi: AtomicConstraint, resets: Iterable[int]) -> set[AtomicConstraint]:
    """Weakest constraint before resetting ``resets`` that becomes ``phi`` after."""
    y = set(resets)
    x, z = phi.left, phi.right
    if not phi.is_diagonal():
        clock = x or z
        return set() if clock in y else {phi.normalized()}
    if x in y and z in y:
        return set()
    if z in y:
        return {AtomicConstraint(x, 0, phi.rel, phi.constant)}
    if x in y:
        return {AtomicConstraint(0, z, phi.rel, phi.constant).normalized()}
    return {phi}


def pre_update(phi: AtomicConstraint, updates: Sequence[Update] | Mapping[int, Update]) -> set[AtomicConstraint]:
    """Substitute each updated clock by its update expression in ``phi``.

    Variable-free results (``2 <= 3``, ``1 > 4``) carry no information about
    valuations and are dropped: an atom with constant truth value never
    distinguishes two valuations.
    """
    ups = updates if isinstance(updates, Mapping) else {u.target: u for u in updates}

    def expr(clock):
        if clock == 0:
            return 0, 0
        u = ups.get(clock)
        if u is None:
            return clock, 0
        if u.source is None:
            return 0, u.value
        return u.source, u.value

    a, ka = expr(phi.left)
    b, kb = expr(phi.right)
    if a == b:
        return set()
    return {AtomicConstraint(a, b, phi.rel, phi.constant - ka + kb).normalized()}


# -- constraint map -----------------------------------------------------------


@dataclass
class ConstraintMap:
    """Per-state atom sets, kept in insertion order."""

    automaton: TimedAutomaton
    sets: list[dict] = field(default_factory=list)

    def __getitem__(self, q: int) -> list[AtomicConstraint]:
        return list(self.sets[q].values())

    def keys(self, q: int) -> set:
        return set(self.sets[q])

    def max_constant(self, q: int) -> int:
        return max((abs(a.constant) for a in self.sets[q].values()), default=0)

    def format_state(self, q: int) -> str:
        names = self.automaton.names
        atoms = sorted(self.sets[q].values(), key=_display_order)
        body = ", ".join(a.format(names) for a in atoms)
        return f"G({self.automaton.states[q].name}) = {{{body}}}"

    def format(self) -> str:
        return "\n".join(self.format_state(q) for q in range(len(self.sets)))


def _display_order(a: AtomicConstraint):
    return (a.is_diagonal(), a.left, a.right, a.rel, a.constant)


def compute_constraint_map(a: TimedAutomaton, iteration_cap: int = DEFAULT_ITERATION_CAP) -> ConstraintMap:
    """Least fixpoint of backward guard propagation, by a worklist.

    Raises :class:`Diverged` once a state holds more than ``iteration_cap``
    atoms or an atom constant exceeds ``iteration_cap`` in absolute value.
    """
    sets: list[dict] = [dict() for _ in a.states]
    parent: dict = {}
    work: deque = deque()

    def add(q, atom, why):
        k = atom.key()
        if k in sets[q]:
            return
        sets[q][k] = atom
        parent[(q, k)] = why
        if len(sets[q]) > iteration_cap or abs(atom.constant) > iteration_cap:
            raise Diverged(a.states[q].name, _derivation(a, parent, q, k))
        work.append((q, atom))

    for t in a.transitions:
        for atom in t.guard:
            add(t.src, atom, None)
    while work:
        q, atom = work.popleft()
        for t in a.incoming(q):
            for pre in pre_update(atom, t.updates):
                add(t.src, pre, (q, atom.key()))
    return ConstraintMap(a, sets)


def _derivation(a, parent, q, k) -> list[str]:
    chain = []
    node = (q, k)
    seen = set()
    while node is not None and node not in seen:
        seen.add(node)
        state, key = node
        atom = AtomicConstraint(*key)
        chain.append(f"{a.states[state].name}: {atom.format(a.names)}")
        node = parent.get(node)
    return list(reversed(chain))


# -- zone simulation test -----------------------------------------------------


class _SplitBudget(Exception):
    pass


Heuristic = Callable[[Dbm, Dbm, list], list]


def simulates(q: int, z: Dbm, z2: Dbm, g: ConstraintMap, **kwargs) -> bool:
    """``(q, z) <=_G (q, z2)`` for canonical non-empty zones."""
    return simulates_atoms(z, z2, g[q], **kwargs)


def simulates_atoms(
    z: Dbm,
    z2: Dbm,
    atoms: Iterable[AtomicConstraint],
    split_budget: int = DEFAULT_SPLIT_BUDGET,
    heuristic: Optional[Heuristic] = None,
    pairwise: bool = True,
) -> bool:
    """Every valuation of ``z`` is simulated by one of ``z2`` w.r.t. ``atoms``.

    Diagonal atoms are handled by splitting ``z`` on each of them; past
    ``split_budget`` leaves the answer is ``False`` (never a wrong ``True``).
    ``heuristic`` may reorder or thin the diagonal list before splitting.
    ``pairwise=False`` runs the cell test on all clocks at once.
    """
    if dbm.is_included(z, z2):
        return True
    atoms = list(atoms)
    diags = [a for a in atoms if a.is_diagonal()]
    plain = [a.normalized() for a in atoms if not a.is_diagonal()]
    if heuristic is not None:
        diags = heuristic(z, z2, diags)
    leaves = [0]
    try:
        return _split(z, z2, diags, plain, leaves, split_budget, pairwise)
    except _SplitBudget:
        return False


def _split(z, z2, diags, plain, leaves, budget, pairwise) -> bool:
    if not diags:
        leaves[0] += 1
        if leaves[0] > budget:
            raise _SplitBudget
        if pairwise:
            return _pairwise_test(z, z2, plain)
        return _cell_test(z, z2, plain)
    phi, rest = diags[0], diags[1:]
    inside = dbm.constrain(z, phi)
    if inside is not None:
        inside2 = dbm.constrain(z2, phi)
        if inside2 is None:
            return False
        if not _split(inside, inside2, rest, plain, leaves, budget, pairwise):
            return False
    for neg in phi.negations():
        outside = dbm.constrain(z, neg)
        if outside is not None and not _split(outside, z2, rest, plain, leaves, budget, pairwise):
            return False
    return True


def _pairwise_test(z: Dbm, z2: Dbm, atoms: list[AtomicConstraint]) -> bool:
    by_clock: dict[int, list[AtomicConstraint]] = {}
    for a in atoms:
        by_clock.setdefault(a.left, []).append(a)
    clocks = sorted(by_clock)
    if not clocks:
        return True
    groups = [(clocks[0],)] if len(clocks) == 1 else list(combinations(clocks, 2))
    for group in groups:
        renum = {c: i + 1 for i, c in enumerate(group)}
        sub_atoms = [
            AtomicConstraint(renum[a.left], 0, a.rel, a.constant) for c in group for a in by_clock[c]
        ]
        if not _cell_test(dbm.submatrix(z, group), dbm.submatrix(z2, group), sub_atoms):
            return False
    return True


def _pieces(atoms: list[AtomicConstraint]):
    """Intervals of one clock on which every atom's case is constant.

    Yields ``(constraints, representative)`` pairs.
    """
    x = atoms[0].left
    ts = sorted({a.constant for a in atoms})
    yield [AtomicConstraint(x, 0, "<", ts[0])], Fraction(ts[0]) - Fraction(1, 2)
    for i, t in enumerate(ts):
        yield [AtomicConstraint(x, 0, "=", t)], Fraction(t)
        if i + 1 < len(ts):
            nxt = ts[i + 1]
            yield [AtomicConstraint(x, 0, ">", t), AtomicConstraint(x, 0, "<", nxt)], Fraction(t + nxt, 2)
    yield [AtomicConstraint(x, 0, ">", ts[-1])], Fraction(ts[-1]) + 1


def _requirements(atoms, value):
    """(v' <= v, v' >= v, constant atoms on v') for one clock at ``value``."""
    le = ge = False
    consts = []
    for a in atoms:
        c = a.constant
        if a.rel == "<":
            le |= value < c
        elif a.rel == "<=":
            le |= value <= c
        elif a.rel == "=":
            if value <= c:
                le = ge = True
        elif a.rel == ">":
            if value > c:
                consts.append(a)
            else:
                ge = True
        else:
            if value >= c:
                consts.append(a)
            else:
                ge = True
    return le, ge, consts


def _cell_test(z: Dbm, z2: Dbm, atoms: list[AtomicConstraint]) -> bool:
    by_clock: dict[int, list[AtomicConstraint]] = {}
    for a in atoms:
        by_clock.setdefault(a.left, []).append(a)
    clocks = sorted(by_clock)

    def walk(k, cell, reqs):
        if k == len(clocks):
            return _covered(cell, z2, reqs)
        x = clocks[k]
        for constraints, rep in _pieces(by_clock[x]):
            sub = dbm.constrain_all(cell, constraints)
            if sub is None:
                continue
            if not walk(k + 1, sub, reqs + [(x, _requirements(by_clock[x], rep))]):
                return False
        return True

    return walk(0, z, [])


def _covered(cell: Dbm, z2: Dbm, reqs) -> bool:
    """Each valuation of ``cell`` has a partner in ``z2`` meeting ``reqs``."""
    w = z2
    links = []
    for x, (le, ge, consts) in reqs:
        w = dbm.constrain_all(w, consts)
        if w is None:
            return False
        if le:
            links.append((x, x + cell.n))
        if ge:
            links.append((x + cell.n, x))
    if not links:
        return True
    n = cell.n
    s = 2 * n + 1
    inf = dbm.INF.key
    keys = [inf] * (s * s)
    wk = w.keys()
    for i in range(n + 1):
        for j in range(n + 1):
            keys[i * s + j] = wk[i * (n + 1) + j]
    for i in range(s):
        keys[i * s + i] = 1
    for x in range(n + 1, s):
        keys[x] = 1
    for i, j in links:
        keys[i * s + j] = min(keys[i * s + j], 1)
    if not dbm._close(keys, s):
        return False
    idx = [0] + list(range(n + 1, s))
    ck = cell.keys()
    p = 0
    for i in idx:
        for j in idx:
            if ck[p] > keys[i * s + j]:
                return False
            p += 1
    return True


def mutually_simulates(q: int, z: Dbm, z2: Dbm, g: ConstraintMap, **kwargs) -> bool:
    return simulates(q, z, z2, g, **kwargs) and simulates(q, z2, z, g, **kwargs)
