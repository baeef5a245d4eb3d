"""Forward zone-graph exploration for control-state reachability.

Three saturation rules are available:

* ``exact``: store a successor unless an existing zone at the same state
  includes it.  May not terminate.
* ``extra``: extrapolate (Extra_K or Extra_LU), canonicalize, then apply the
  same inclusion check.  Needs a diagonal-free, reset-only automaton.
* ``sim``: keep zones as computed and skip a successor simulated by a stored
  zone under the G-simulation.

Exploration is deterministic for a fixed automaton, strategy and order.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Union

from . import dbm, gsim
from .dbm import Dbm
from .errors import BudgetExhausted, NotDiagonalFree, NotResetOnly
from .extrapolation import ClockBounds, compute_bounds, extrapolate
from .model import TimedAutomaton, Transition, apply_update, classify

DEFAULT_BUDGET = 1_000_000

Target = Union[str, Iterable[int], Callable[[int], bool]]


@dataclass(frozen=True)
class Strategy:
    kind: str = "sim"
    variant: str = "LU"
    bounds_mode: str = "per_state"
    split_budget: int = gsim.DEFAULT_SPLIT_BUDGET
    iteration_cap: int = gsim.DEFAULT_ITERATION_CAP

    def __post_init__(self):
        if self.kind not in ("exact", "extra", "sim"):
            raise ValueError(f"unknown strategy {self.kind!r}")

    @classmethod
    def exact(cls) -> Strategy:
        return cls("exact")

    @classmethod
    def extra(cls, variant: str = "LU", bounds_mode: str = "per_state") -> Strategy:
        return cls("extra", variant, bounds_mode)

    @classmethod
    def sim(cls, **kwargs) -> Strategy:
        return cls("sim", **kwargs)

    @classmethod
    def from_algo(cls, algo: str, bounds_mode: str = "per_state") -> Strategy:
        table = {
            "exact": cls.exact(),
            "extra-k": cls.extra("K", bounds_mode),
            "extra-lu": cls.extra("LU", bounds_mode),
            "gsim": cls.sim(),
        }
        if algo not in table:
            raise ValueError(f"unknown algorithm {algo!r}")
        return table[algo]

    @property
    def algo_id(self) -> str:
        if self.kind == "extra":
            return f"extra-{self.variant.lower()}"
        return "gsim" if self.kind == "sim" else "exact"


@dataclass(eq=False)
class SymbolicState:
    id: int
    state: int
    zone: Dbm
    parent: Optional[SymbolicState] = None
    via: Optional[Transition] = None
    active: bool = True

    def path(self) -> list[Transition]:
        out = []
        node = self
        while node.via is not None:
            out.append(node.via)
            node = node.parent
        return out[::-1]


@dataclass
class Stats:
    visited: int = 0
    stored: int = 0
    subsumed: int = 0
    stored_at: Counter = field(default_factory=Counter)

    def line(self) -> str:
        return f"visited={self.visited} stored={self.stored} subsumed={self.subsumed}"


@dataclass
class Edge:
    src: int
    dst: int
    transition: Optional[Transition]
    kind: str  # "post" or "subsumed"


@dataclass
class ZoneGraph:
    automaton: TimedAutomaton
    nodes: list[SymbolicState] = field(default_factory=list)
    edges: list[Edge] = field(default_factory=list)

    def to_dot(self) -> str:
        a = self.automaton
        names = a.names
        lines = [f'digraph "{a.name}" {{', "  node [shape=box];"]
        for node in self.nodes:
            label = f"{a.states[node.state].name}:{dbm.format_zone(node.zone, names)}"
            style = "" if node.active else ", style=dashed"
            lines.append(f'  n{node.id} [label="{_escape(label)}"{style}];')
        for e in self.edges:
            label = a.describe(e.transition) if e.transition is not None else ""
            style = ", style=dashed" if e.kind == "subsumed" else ""
            lines.append(f'  n{e.src} -> n{e.dst} [label="{_escape(label)}"{style}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')


@dataclass
class ReachResult:
    reachable: bool
    stats: Stats
    witness: Optional[list[Transition]] = None
    node: Optional[SymbolicState] = None
    graph: Optional[ZoneGraph] = None

    @property
    def verdict(self) -> str:
        return "REACHABLE" if self.reachable else "UNREACHABLE"


class Engine:
    """Successor computation, abstraction and covering for one strategy."""

    def __init__(self, a: TimedAutomaton, strategy: Strategy):
        self.a = a
        self.strategy = strategy
        self.bounds: Optional[ClockBounds] = None
        self.g: Optional[gsim.ConstraintMap] = None
        if strategy.kind == "extra":
            cls = classify(a)
            if not cls.diagonal_free:
                raise NotDiagonalFree("Extra_K / Extra_LU cannot handle diagonal guards")
            if not cls.reset_only:
                raise NotResetOnly()
            self.bounds = compute_bounds(a, strategy.bounds_mode)
        elif strategy.kind == "sim":
            self.g = gsim.compute_constraint_map(a, strategy.iteration_cap)

    def initial_zone(self) -> Dbm:
        return self.abstract(self.a.initial, dbm.future(dbm.zero(self.a.n)))

    def post(self, zone: Dbm, t: Transition) -> Optional[Dbm]:
        z = dbm.constrain_all(zone, t.guard)
        if z is None:
            return None
        z = apply_update(z, t.updates, self.a.names)
        return dbm.future(z)

    def abstract(self, q: int, zone: Dbm) -> Dbm:
        if self.strategy.kind == "extra":
            return extrapolate(zone, self.bounds, q, self.strategy.variant)
        return zone

    def successor(self, zone: Dbm, t: Transition) -> Optional[Dbm]:
        z = self.post(zone, t)
        return None if z is None else self.abstract(t.dst, z)

    def covers(self, q: int, small: Dbm, big: Dbm) -> bool:
        """Side condition of the saturation rule: ``small`` need not be stored."""
        if self.strategy.kind == "sim":
            return gsim.simulates(q, small, big, self.g, split_budget=self.strategy.split_budget)
        return dbm.is_included(small, big)


def initial(a: TimedAutomaton) -> SymbolicState:
    return SymbolicState(0, a.initial, dbm.future(dbm.zero(a.n)))


def post(a: TimedAutomaton, s: SymbolicState, t: Transition) -> Optional[SymbolicState]:
    """Exact successor of a symbolic state along ``t``, or ``None`` if empty."""
    if t.src != s.state:
        raise ValueError("transition does not leave this state")
    z = dbm.constrain_all(s.zone, t.guard)
    if z is None:
        return None
    z = dbm.future(apply_update(z, t.updates, a.names))
    return SymbolicState(s.id + 1, t.dst, z, s, t)


def target_predicate(a: TimedAutomaton, target: Target) -> Callable[[int], bool]:
    if callable(target):
        return target
    if isinstance(target, str):
        ids = a.matching(target)
        if not ids:
            raise ValueError(f"no state or label named {target!r}")
    else:
        ids = set(target)
    return ids.__contains__


def explore(
    a: TimedAutomaton,
    strategy: Strategy,
    target: Target,
    order: str = "bfs",
    budget: int = DEFAULT_BUDGET,
    record_graph: bool = False,
    prune_waiting: bool = False,
    start: Optional[tuple[int, Dbm]] = None,
) -> ReachResult:
    """Saturate the symbolic state space until ``target`` is hit.

    ``budget`` caps stored nodes; running out raises :class:`BudgetExhausted`
    rather than returning a verdict.  ``start`` replaces the initial symbolic
    state by an arbitrary ``(state, zone)`` pair.
    """
    if order not in ("bfs", "dfs"):
        raise ValueError(f"unknown order {order!r}")
    is_target = target_predicate(a, target)
    engine = Engine(a, strategy)
    stats = Stats()
    graph = ZoneGraph(a) if record_graph else None
    store: list[list[SymbolicState]] = [[] for _ in a.states]

    if start is None:
        root = SymbolicState(0, a.initial, engine.initial_zone())
    else:
        root = SymbolicState(0, start[0], engine.abstract(start[0], start[1]))
    store[root.state].append(root)
    stats.stored = 1
    stats.stored_at[root.state] += 1
    if graph is not None:
        graph.nodes.append(root)
    if is_target(root.state):
        return ReachResult(True, stats, [], root, graph)

    waiting: deque[SymbolicState] = deque([root])
    pop = waiting.popleft if order == "bfs" else waiting.pop
    while waiting:
        s = pop()
        if prune_waiting and not s.active:
            continue
        for t in a.outgoing(s.state):
            stats.visited += 1
            z = engine.successor(s.zone, t)
            if z is None:
                continue
            q = t.dst
            cover = next((o for o in store[q] if o.active and engine.covers(q, z, o.zone)), None)
            if cover is not None:
                stats.subsumed += 1
                if graph is not None:
                    graph.edges.append(Edge(s.id, cover.id, t, "subsumed"))
                continue
            if stats.stored >= budget:
                raise BudgetExhausted(budget, stats)
            node = SymbolicState(stats.stored, q, z, s, t)
            for old in store[q]:
                if old.active and engine.covers(q, old.zone, z):
                    old.active = False
                    if graph is not None:
                        graph.edges.append(Edge(old.id, node.id, None, "subsumed"))
            store[q].append(node)
            stats.stored += 1
            stats.stored_at[q] += 1
            if graph is not None:
                graph.nodes.append(node)
                graph.edges.append(Edge(s.id, node.id, t, "post"))
            if is_target(q):
                return ReachResult(True, stats, node.path(), node, graph)
            waiting.append(node)
    return ReachResult(False, stats, None, None, graph)


def reachable_states(a: TimedAutomaton, strategy: Strategy, start=None, budget: int = DEFAULT_BUDGET) -> set[int]:
    """Control states reachable from the initial (or given) symbolic state."""
    res = explore(a, strategy, lambda q: False, budget=budget, record_graph=True, start=start)
    return {n.state for n in res.graph.nodes}
