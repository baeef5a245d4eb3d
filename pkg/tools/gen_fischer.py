"""Generate the flattened two-process Fischer model shipped with zonecheck.

Usage: python3 tools/gen_fischer.py [set_bound enter_bound] > out.ta

Process i owns clock xi.  The shared variable id (0, 1 or 2) is folded into
the control state, so the product is a single automaton.  Without state
invariants the usual "stay in req at most k" is a guard on the move to wait.
Mutual exclusion holds when set_bound <= enter_bound.
"""

import sys
from itertools import product

LOCS = ("idle", "req", "wait", "cs")


def name(l1, l2, ident):
    return f"{l1}_{l2}_{ident}"


def moves(i, loc, ident, set_bound, enter_bound):
    """Local steps of process i: (new loc, new id, guard atoms, reset?)."""
    x = f"x{i}"
    if loc == "idle" and ident == 0:
        yield "req", ident, [], True
    if loc == "req":
        yield "wait", i, [f"{x} <= {set_bound}"], True
    if loc == "wait" and ident == i:
        yield "cs", ident, [f"{x} > {enter_bound}"], False
    if loc == "wait" and ident != i:
        yield "idle", ident, [], False
    if loc == "cs":
        yield "idle", 0, [], False


def generate(set_bound=1, enter_bound=1):
    out = [
        f"# Fischer mutual exclusion, two processes, set within {set_bound}, enter after {enter_bound}.",
        "# Generated by tools/gen_fischer.py; the shared id is part of the state name.",
        "system fischer",
        "clock x1 x2",
    ]
    for l1, l2, ident in product(LOCS, LOCS, range(3)):
        attrs = []
        if (l1, l2, ident) == ("idle", "idle", 0):
            attrs.append("initial")
        if l1 == l2 == "cs":
            attrs.append("label=Bad")
        if l1 == "cs":
            attrs.append("label=CS1")
        if l2 == "cs":
            attrs.append("label=CS2")
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        out.append(f"state {name(l1, l2, ident)}{suffix}")
    for l1, l2, ident in product(LOCS, LOCS, range(3)):
        for i in (1, 2):
            loc = l1 if i == 1 else l2
            for new, new_id, guard, reset in moves(i, loc, ident, set_bound, enter_bound):
                dst = name(new, l2, new_id) if i == 1 else name(l1, new, new_id)
                body = ""
                if guard:
                    body += f" guard: {' && '.join(guard)};"
                if reset:
                    body += f" do: x{i} = 0;"
                out.append(f"trans {name(l1, l2, ident)} -> {dst} {{{body} }}")
    return "\n".join(out) + "\n"


if __name__ == "__main__":
    bounds = [int(v) for v in sys.argv[1:3]] or [1, 1]
    sys.stdout.write(generate(*bounds))
