"""Buchi emptiness on zone graphs with restricted node merging.

A successor is merged into an existing node only when the zones are equal
(exact and extrapolation strategies) or mutually G-simulated (simulation
strategy).  One-way subsumption can close cycles that no run follows; it is
available here as ``merge="subsume"`` for experiments and tests, never from
the command line.  Emptiness is decided by a nested depth-first search over
the finished graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import gsim
from .dbm import Dbm
from .errors import BudgetExhausted
from .model import TimedAutomaton, Transition
from .reach import DEFAULT_BUDGET, Engine, Stats, Strategy, Target, target_predicate

MERGES = ("equal", "bisim", "subsume")


@dataclass
class Node:
    id: int
    state: int
    zone: Dbm
    succ: list[tuple[Transition, int]] = field(default_factory=list)


@dataclass
class BuchiResult:
    empty: bool
    stats: Stats
    stem: list[Transition] = field(default_factory=list)
    lasso: list[Transition] = field(default_factory=list)
    stem_nodes: list[int] = field(default_factory=list)
    lasso_nodes: list[int] = field(default_factory=list)
    nodes: list[Node] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        return "EMPTY" if self.empty else "BUCHI-RUN"


def default_merge(strategy: Strategy) -> str:
    return "bisim" if strategy.kind == "sim" else "equal"


def build_graph(
    a: TimedAutomaton,
    strategy: Strategy,
    merge: Optional[str] = None,
    budget: int = DEFAULT_BUDGET,
) -> tuple[list[Node], Stats, Engine]:
    """Zone graph where successors merge into existing nodes per ``merge``."""
    merge = merge or default_merge(strategy)
    if merge not in MERGES:
        raise ValueError(f"unknown merge mode {merge!r}")
    engine = Engine(a, strategy)
    stats = Stats()
    root = Node(0, a.initial, engine.initial_zone())
    nodes = [root]
    by_state: list[list[Node]] = [[] for _ in a.states]
    by_state[root.state].append(root)
    exact_index = {(root.state, root.zone): root}
    stats.stored = 1
    stats.stored_at[root.state] += 1

    def find(q, z) -> Optional[Node]:
        if merge == "equal":
            return exact_index.get((q, z))
        for other in by_state[q]:
            if merge == "bisim":
                if gsim.mutually_simulates(q, z, other.zone, engine.g, split_budget=strategy.split_budget):
                    return other
            elif engine.covers(q, z, other.zone):
                return other
        return None

    stack = [root]
    while stack:
        node = stack.pop()
        for t in a.outgoing(node.state):
            stats.visited += 1
            z = engine.successor(node.zone, t)
            if z is None:
                continue
            other = find(t.dst, z)
            if other is not None:
                stats.subsumed += 1
                node.succ.append((t, other.id))
                continue
            if stats.stored >= budget:
                raise BudgetExhausted(budget, stats)
            new = Node(len(nodes), t.dst, z)
            nodes.append(new)
            by_state[t.dst].append(new)
            exact_index[(t.dst, z)] = new
            stats.stored += 1
            stats.stored_at[t.dst] += 1
            node.succ.append((t, new.id))
            stack.append(new)
    # Successor lists were filled in discovery order; DFS below follows them.
    return nodes, stats, engine


def nested_dfs(nodes: list[Node], accepting) -> Optional[tuple[list[tuple], list[tuple]]]:
    """Find an accepting lasso; returns ``(stem, cycle)`` as lists of
    ``(transition, node_id)`` steps, or ``None``."""
    visited = set()
    flagged = set()
    on_stack: dict[int, int] = {}
    # Each frame: (node id, next successor index, transition used to enter).
    frames: list[list] = []

    def push(nid, via):
        visited.add(nid)
        on_stack[nid] = len(frames)
        frames.append([nid, 0, via])

    push(0, None)
    while frames:
        frame = frames[-1]
        nid, k = frame[0], frame[1]
        succ = nodes[nid].succ
        if k < len(succ):
            frame[1] += 1
            t, m = succ[k]
            if m not in visited:
                push(m, t)
            continue
        if accepting(nodes[nid].state):
            cycle = _inner(nodes, nid, on_stack, flagged)
            if cycle is not None:
                stem = [(f[2], f[0]) for f in frames[1:]]
                target = cycle[-1][1]
                # Close the loop through the part of the outer stack above target.
                tail = [(f[2], f[0]) for f in frames[on_stack[target] + 1:]]
                return stem, cycle + tail
        frames.pop()
        del on_stack[nid]
    return None


def _inner(nodes, seed, on_stack, flagged):
    """Second search from ``seed`` for a node on the outer stack."""
    path: list[tuple] = []
    frames = [[seed, 0]]
    flagged.add(seed)
    while frames:
        frame = frames[-1]
        nid, k = frame
        succ = nodes[nid].succ
        if k < len(succ):
            frame[1] += 1
            t, m = succ[k]
            if m in on_stack:
                return path + [(t, m)]
            if m not in flagged:
                flagged.add(m)
                frames.append([m, 0])
                path.append((t, m))
            continue
        frames.pop()
        if path:
            path.pop()
    return None


def buchi_check(
    a: TimedAutomaton,
    strategy: Strategy,
    accepting: Optional[Target] = None,
    budget: int = DEFAULT_BUDGET,
    merge: Optional[str] = None,
) -> BuchiResult:
    """Is there an infinite run visiting an accepting state infinitely often?

    ``accepting`` defaults to the states carrying the ``accepting`` attribute;
    a string matches a state name or label.
    """
    if accepting is None:
        acc = {i for i, s in enumerate(a.states) if s.accepting}
        is_acc = acc.__contains__
    else:
        is_acc = target_predicate(a, accepting)
    nodes, stats, _ = build_graph(a, strategy, merge, budget)
    found = nested_dfs(nodes, is_acc)
    if found is None:
        return BuchiResult(True, stats, nodes=nodes)
    stem, cycle = found
    return BuchiResult(
        False,
        stats,
        stem=[t for t, _ in stem],
        lasso=[t for t, _ in cycle],
        stem_nodes=[0] + [m for _, m in stem],
        lasso_nodes=[m for _, m in cycle],
        nodes=nodes,
    )


def replay(a: TimedAutomaton, strategy: Strategy, result: BuchiResult) -> tuple[Dbm, Dbm]:
    """Re-run successors along stem and lasso.

    Returns ``(entry zone, zone reached after one lap of the lasso)``.  The
    lap starts from the stored zone of the loop entry node.
    """
    if result.empty:
        raise ValueError("no lasso to replay")
    engine = Engine(a, strategy)
    entry = result.nodes[result.stem_nodes[-1]].zone
    z = entry
    for t in result.lasso:
        z = engine.successor(z, t)
        if z is None:
            raise AssertionError("lasso is not executable")
    return entry, z


def same_zone(strategy: Strategy, g, q: int, z1: Dbm, z2: Dbm) -> bool:
    """The merge test of ``strategy``: equality, or mutual simulation for Sim."""
    if strategy.kind == "sim":
        return gsim.mutually_simulates(q, z1, z2, g, split_budget=strategy.split_budget)
    return z1 == z2


def lasso_closes(a: TimedAutomaton, strategy: Strategy, result: BuchiResult) -> bool:
    """Replaying the lasso from its entry node lands on a zone the graph would merge."""
    entry, end = replay(a, strategy, result)
    q = result.nodes[result.stem_nodes[-1]].state
    g = gsim.compute_constraint_map(a, strategy.iteration_cap) if strategy.kind == "sim" else None
    return same_zone(strategy, g, q, entry, end)
