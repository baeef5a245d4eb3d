"""Timed automata with diagonal guards and clock updates, plus the text format.

The format is line oriented, ``#`` starts a comment::

    system toy
    clock x y
    state q0 [initial]
    state q1 [accepting, label=goal]
    trans q0 -> q1 { guard: x <= 3 && y - x > 1; do: x = 0, y = x + 2; }
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from . import dbm
from .constraints import MAX_CONSTANT, AtomicConstraint
from .dbm import Dbm
from .errors import NegativeClock, ParseError


@dataclass(frozen=True)
class Update:
    """``target := value`` when ``source`` is None, else ``target := source + value``."""

    target: int
    source: Optional[int] = None
    value: int = 0

    @classmethod
    def reset(cls, clock: int) -> Update:
        return cls(clock, None, 0)

    @property
    def is_reset(self) -> bool:
        return self.source is None and self.value == 0

    def format(self, names: Sequence[str]) -> str:
        if self.source is None:
            return f"{names[self.target]} = {self.value}"
        if self.value < 0:
            return f"{names[self.target]} = {names[self.source]} - {-self.value}"
        return f"{names[self.target]} = {names[self.source]} + {self.value}"


@dataclass(frozen=True)
class Transition:
    src: int
    guard: tuple[AtomicConstraint, ...]
    updates: tuple[Update, ...]
    dst: int
    index: int = 0

    def reset_set(self) -> frozenset[int]:
        return frozenset(u.target for u in self.updates if u.is_reset)


@dataclass(frozen=True)
class State:
    name: str
    initial: bool = False
    accepting: bool = False
    labels: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Classification:
    diagonal_free: bool
    reset_only: bool


@dataclass(frozen=True)
class TimedAutomaton:
    name: str
    clocks: tuple[str, ...]
    states: tuple[State, ...]
    transitions: tuple[Transition, ...]
    _index: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        if not self.clocks:
            raise ValueError("an automaton needs at least one clock")
        initial = [i for i, s in enumerate(self.states) if s.initial]
        if len(initial) != 1:
            raise ValueError(f"expected exactly one initial state, found {len(initial)}")
        out: list[list[Transition]] = [[] for _ in self.states]
        inc: list[list[Transition]] = [[] for _ in self.states]
        for t in self.transitions:
            out[t.src].append(t)
            inc[t.dst].append(t)
        self._index.update(
            initial=initial[0],
            by_name={s.name: i for i, s in enumerate(self.states)},
            outgoing=out,
            incoming=inc,
        )

    @property
    def n(self) -> int:
        return len(self.clocks)

    @property
    def initial(self) -> int:
        return self._index["initial"]

    @property
    def names(self) -> list[str]:
        """Clock names indexed like DBM rows; index 0 is the zero clock."""
        return ["0", *self.clocks]

    def state_id(self, name: str) -> int:
        return self._index["by_name"][name]

    def outgoing(self, q: int) -> list[Transition]:
        return self._index["outgoing"][q]

    def incoming(self, q: int) -> list[Transition]:
        return self._index["incoming"][q]

    def matching(self, target: str) -> set[int]:
        """States whose name or one of whose labels equals ``target``.

        The word ``accepting`` also selects every state with that attribute.
        """
        return {
            i
            for i, s in enumerate(self.states)
            if s.name == target or target in s.labels or (target == "accepting" and s.accepting)
        }

    def describe(self, t: Transition) -> str:
        return f"{self.states[t.src].name} -> {self.states[t.dst].name}"


def classify(a: TimedAutomaton) -> Classification:
    diagonal_free = all(not atom.is_diagonal() for t in a.transitions for atom in t.guard)
    reset_only = all(u.is_reset for t in a.transitions for u in t.updates)
    return Classification(diagonal_free, reset_only)


# -- semantics on zones -------------------------------------------------------


def apply_update(m: Dbm, updates: Sequence[Update], names: Optional[Sequence[str]] = None) -> Dbm:
    """Image of canonical ``m`` under simultaneous updates.

    Raises :class:`NegativeClock` when some valuation of ``m`` would assign a
    negative value.
    """
    if not updates:
        return m
    if all(u.is_reset for u in updates):
        return dbm.reset(m, [u.target for u in updates])
    if all(u.source is None for u in updates):
        out = dbm.reset(m, [u.target for u in updates])
        for u in updates:
            if u.value < 0:
                raise NegativeClock(_name(names, u.target))
            out = dbm.shift(out, u.target, u.value)
        return out
    return _substitute(m, updates, names)


def _name(names, i):
    return names[i] if names else f"x{i}"


def _substitute(m: Dbm, updates: Sequence[Update], names) -> Dbm:
    # Old clocks occupy 1..n, new clocks n+1..2n; the new ones are linked to the
    # old ones by difference equalities and the closure is projected back.
    n = m.n
    s = 2 * n + 1
    inf = dbm.INF.key
    keys = [inf] * (s * s)
    src = m.keys()
    for i in range(n + 1):
        for j in range(n + 1):
            keys[i * s + j] = src[i * (n + 1) + j]
    for i in range(s):
        keys[i * s + i] = 1
    by_target = {u.target: u for u in updates}

    def link(i, j, value):
        keys[i * s + j] = min(keys[i * s + j], 2 * value + 1)
        keys[j * s + i] = min(keys[j * s + i], -2 * value + 1)

    for x in range(1, n + 1):
        u = by_target.get(x)
        new = n + x
        if u is None:
            link(new, x, 0)
        elif u.source is None:
            link(new, 0, u.value)
        else:
            link(new, u.source, u.value)
    if not dbm._close(keys, s):
        raise AssertionError("update image of a non-empty zone cannot be empty")
    for x in range(1, n + 1):
        if keys[n + x] > 1:
            raise NegativeClock(_name(names, x))
    idx = [0] + list(range(n + 1, s))
    out = [keys[i * s + j] for i in idx for j in idx]
    return dbm._from_keys(n, out, canonical=True)


def apply_update_point(valuation: Sequence, updates: Sequence[Update]) -> list:
    """Valuation-level update; ``valuation[0]`` is the zero clock."""
    v = list(valuation)
    out = list(v)
    for u in updates:
        out[u.target] = u.value if u.source is None else v[u.source] + u.value
    return out


# -- text format --------------------------------------------------------------


_TOKEN = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<op><=|>=|==|&&|[<>=+\-{}\[\],;:])|(?P<int>\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_.]*)|(?P<bad>\S))"
)

_RELS = {"<": "<", "<=": "<=", "==": "=", ">=": ">=", ">": ">"}


class _Line:
    def __init__(self, text: str, lineno: int):
        self.lineno = lineno
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            mt = _TOKEN.match(text, pos)
            if mt is None or mt.end() == pos:
                break
            kind = mt.lastgroup
            value = mt.group(kind)
            col = mt.start(kind) + 1
            if kind == "bad":
                raise ParseError(f"unexpected character {value!r}", lineno, col)
            if kind == "arrow":
                kind = "op"
            self.tokens.append((kind, value, col))
            pos = mt.end()
        self.pos = 0
        self.end_col = len(text) + 1

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else ("eol", "", self.end_col)

    def next(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ParseError(message, self.lineno, tok[2])

    def expect(self, value):
        tok = self.next()
        if tok[1] != value or tok[0] == "eol":
            raise self.error(f"expected {value!r}, got {tok[1] or 'end of line'!r}", tok)
        return tok

    def ident(self):
        tok = self.next()
        if tok[0] != "id":
            raise self.error(f"expected identifier, got {tok[1] or 'end of line'!r}", tok)
        return tok

    def integer(self):
        sign = 1
        if self.peek()[1] == "-":
            self.next()
            sign = -1
        tok = self.next()
        if tok[0] != "int":
            raise self.error(f"expected integer, got {tok[1] or 'end of line'!r}", tok)
        value = sign * int(tok[1])
        if abs(value) > MAX_CONSTANT:
            raise self.error(f"constant {value} out of range (|c| <= 2^30)", tok)
        return value

    def at_end(self):
        return self.pos >= len(self.tokens)


def parse(text: str) -> TimedAutomaton:
    """Parse the textual format; raises :class:`ParseError` with a position."""
    name = None
    clocks: list[str] = []
    clock_ix: dict[str, int] = {}
    states: list[State] = []
    state_ix: dict[str, int] = {}
    pending = []  # (line, src_tok, dst_tok, guard, updates)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        if not body.strip():
            continue
        ln = _Line(body, lineno)
        kw = ln.ident()
        if kw[1] == "system":
            if name is not None:
                raise ln.error("duplicate system declaration", kw)
            name = ln.ident()[1]
        elif kw[1] == "clock":
            while not ln.at_end():
                tok = ln.ident()
                if tok[1] in clock_ix or tok[1] in state_ix:
                    raise ln.error(f"duplicate id {tok[1]!r}", tok)
                clocks.append(tok[1])
                clock_ix[tok[1]] = len(clocks)
            if not clocks:
                raise ln.error("clock declaration needs at least one id", kw)
        elif kw[1] == "state":
            tok = ln.ident()
            if tok[1] in state_ix or tok[1] in clock_ix:
                raise ln.error(f"duplicate id {tok[1]!r}", tok)
            initial = accepting = False
            labels = set()
            if ln.peek()[1] == "[":
                ln.next()
                while True:
                    attr = ln.ident()
                    if attr[1] == "initial":
                        initial = True
                    elif attr[1] == "accepting":
                        accepting = True
                    elif attr[1] == "label":
                        ln.expect("=")
                        labels.add(ln.ident()[1])
                    else:
                        raise ln.error(f"unknown state attribute {attr[1]!r}", attr)
                    sep = ln.next()
                    if sep[1] == "]":
                        break
                    if sep[1] != ",":
                        raise ln.error("expected ',' or ']'", sep)
            if initial and any(s.initial for s in states):
                raise ln.error("multiple initial states", tok)
            state_ix[tok[1]] = len(states)
            states.append(State(tok[1], initial, accepting, frozenset(labels)))
        elif kw[1] == "trans":
            src = ln.ident()
            ln.expect("->")
            dst = ln.ident()
            ln.expect("{")
            guard, updates = [], []
            while ln.peek()[1] != "}":
                section = ln.ident()
                ln.expect(":")
                if section[1] == "guard":
                    guard.extend(_parse_conj(ln, clock_ix))
                elif section[1] == "do":
                    updates.extend(_parse_updates(ln, clock_ix))
                else:
                    raise ln.error(f"unknown section {section[1]!r}", section)
                ln.expect(";")
            ln.expect("}")
            targets = [u.target for u in updates]
            if len(set(targets)) != len(targets):
                raise ln.error("a clock is updated twice on one transition", src)
            pending.append((ln, src, dst, tuple(guard), tuple(updates)))
        else:
            raise ln.error(f"unknown declaration {kw[1]!r}", kw)
        if not ln.at_end():
            raise ln.error(f"unexpected {ln.peek()[1]!r}")

    if not clocks:
        raise ParseError("no clocks declared")
    if not states:
        raise ParseError("no states declared")
    if not any(s.initial for s in states):
        raise ParseError("no initial state declared")
    transitions = []
    for ln, src, dst, guard, updates in pending:
        for tok in (src, dst):
            if tok[1] not in state_ix:
                raise ParseError(f"undeclared state {tok[1]!r}", ln.lineno, tok[2])
        transitions.append(Transition(state_ix[src[1]], guard, updates, state_ix[dst[1]], len(transitions)))
    return TimedAutomaton(name or "system", tuple(clocks), tuple(states), tuple(transitions))


def _clock(ln: _Line, clock_ix):
    tok = ln.ident()
    if tok[1] not in clock_ix:
        raise ParseError(f"undeclared clock {tok[1]!r}", ln.lineno, tok[2])
    return clock_ix[tok[1]]


def _parse_conj(ln: _Line, clock_ix) -> list[AtomicConstraint]:
    if ln.peek()[1] == "true":
        ln.next()
        return []
    atoms = [_parse_atom(ln, clock_ix)]
    while ln.peek()[1] == "&&":
        ln.next()
        atoms.append(_parse_atom(ln, clock_ix))
    return atoms


def _parse_atom(ln: _Line, clock_ix) -> AtomicConstraint:
    start = ln.peek()
    x = _clock(ln, clock_ix)
    y = 0
    if ln.peek()[1] == "-":
        ln.next()
        y = _clock(ln, clock_ix)
    rel_tok = ln.next()
    if rel_tok[1] not in _RELS or rel_tok[0] != "op":
        raise ln.error(f"expected relation, got {rel_tok[1] or 'end of line'!r}", rel_tok)
    rel = _RELS[rel_tok[1]]
    if y == 0 and ln.peek()[0] == "id":
        y = _clock(ln, clock_ix)
        c = 0
        if ln.peek()[1] in ("+", "-"):
            sign = 1 if ln.next()[1] == "+" else -1
            c = sign * ln.integer()
    else:
        c = ln.integer()
    if x == y:
        raise ln.error("constraint compares a clock with itself", start)
    return AtomicConstraint(x, y, rel, c)


def _parse_updates(ln: _Line, clock_ix) -> list[Update]:
    ups = [_parse_update(ln, clock_ix)]
    while ln.peek()[1] == ",":
        ln.next()
        ups.append(_parse_update(ln, clock_ix))
    return ups


def _parse_update(ln: _Line, clock_ix) -> Update:
    x = _clock(ln, clock_ix)
    ln.expect("=")
    if ln.peek()[0] == "id":
        y = _clock(ln, clock_ix)
        d = 0
        if ln.peek()[1] in ("+", "-"):
            sign = 1 if ln.next()[1] == "+" else -1
            d = sign * ln.integer()
        return Update(x, y, d)
    tok = ln.peek()
    c = ln.integer()
    if c < 0:
        raise ln.error("constant update must be a natural number", tok)
    return Update(x, None, c)


def format_automaton(a: TimedAutomaton) -> str:
    """Canonical text form; :func:`parse` inverts it."""
    names = a.names
    lines = [f"system {a.name}", "clock " + " ".join(a.clocks)]
    for s in a.states:
        attrs = []
        if s.initial:
            attrs.append("initial")
        if s.accepting:
            attrs.append("accepting")
        attrs.extend(f"label={lab}" for lab in sorted(s.labels))
        lines.append(f"state {s.name}" + (f" [{', '.join(attrs)}]" if attrs else ""))
    for t in a.transitions:
        parts = []
        if t.guard:
            parts.append("guard: " + " && ".join(_format_atom(g, names) for g in t.guard) + ";")
        if t.updates:
            parts.append("do: " + ", ".join(u.format(names) for u in t.updates) + ";")
        body = " ".join(parts)
        lines.append(f"trans {a.states[t.src].name} -> {a.states[t.dst].name} {{{' ' + body + ' ' if body else ' '}}}")
    return "\n".join(lines) + "\n"


def _format_atom(atom: AtomicConstraint, names) -> str:
    rel = "==" if atom.rel == "=" else atom.rel
    if atom.right == 0:
        return f"{names[atom.left]} {rel} {atom.constant}"
    if atom.left == 0:
        # 0 - y ~ c has no direct surface syntax; write it as y ~' -c.
        a = atom.normalized()
        return f"{names[a.left]} {'==' if a.rel == '=' else a.rel} {a.constant}"
    return f"{names[atom.left]} - {names[atom.right]} {rel} {atom.constant}"


def load(path) -> TimedAutomaton:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())


def guard_atoms(transitions: Iterable[Transition]) -> Iterable[AtomicConstraint]:
    for t in transitions:
        yield from t.guard
