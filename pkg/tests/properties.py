"""Property checks shared by the property suite and the acceptance run.

Each ``prop_*`` takes generated inputs and raises ``AssertionError`` on a
violation.  ``SUITE`` pairs every property with its hypothesis strategy.
"""

from __future__ import annotations

import random

from hypothesis import strategies as st

import oracles
from gen import dbm_pair, random_atoms, random_dbm, seeds
from zonecheck import dbm, gsim
from zonecheck.extrapolation import extra_k, extra_lu


def _gen(seed, n, future=False):
    return random_dbm(random.Random(seed), n, future=future)


def _bounds(rng, n, cmax=5):
    pick = lambda: None if rng.random() < 0.2 else rng.randint(0, cmax)  # noqa: E731
    return [pick() for _ in range(n)], [pick() for _ in range(n)]


def _lu(m, lower, upper):
    return dbm.canonicalize(extra_lu(m, lower, upper))


def _loosen(rng, m):
    """A zone containing ``m``: entries only grow."""
    size = m.n + 1
    e = list(m.entries)
    for k, b in enumerate(e):
        i, j = divmod(k, size)
        if i == j or b.is_inf or rng.random() < 0.5:
            continue
        if i and rng.random() < 0.3:
            e[k] = dbm.INF
            continue
        v = min(b.value + rng.randint(0, 2), 0) if i == 0 else b.value + rng.randint(0, 2)
        e[k] = dbm.Bound(v, b.strict and v == b.value)
    return dbm.canonicalize(dbm.Dbm(m.n, e))


def _kmax(lower, upper):
    return [u if lo is None else lo if u is None else max(lo, u) for lo, u in zip(lower, upper)]


case = st.tuples(seeds, st.integers(min_value=1, max_value=3))


def prop_canonicalize_idempotent(args):
    seed, n = args
    rng = random.Random(seed)
    s = n + 1
    e = [dbm.INF] * (s * s)
    for i in range(s):
        for j in range(s):
            if i == j:
                e[i * s + j] = dbm.LE0
            elif rng.random() < 0.6:
                e[i * s + j] = dbm.Bound(rng.randint(-4, 4), rng.random() < 0.5)
    c = dbm.canonicalize(dbm.Dbm(n, e))
    if c is None:
        assert not oracles.grid_nonempty(dbm.Dbm(n, e))
        return
    assert dbm.is_canonical(c) and dbm.canonicalize(c) == c


def prop_future_idempotent(args):
    seed, n = args
    m = _gen(seed, n)
    f = dbm.future(m)
    assert dbm.future(f) == f and dbm.is_future_closed(f)


def prop_reset_future_canonical(args):
    seed, n = args
    rng = random.Random(seed)
    m = random_dbm(rng, n)
    clocks = {x for x in range(1, n + 1) if rng.random() < 0.5}
    assert dbm.is_canonical(dbm.reset(m, clocks))
    assert dbm.is_canonical(dbm.future(m))
    assert dbm.is_canonical(dbm.future(dbm.reset(m, clocks)))


def prop_extrapolation_extensive(args):
    seed, n = args
    rng = random.Random(seed)
    m = random_dbm(rng, n)
    lower, upper = _bounds(rng, n)
    out = _lu(m, lower, upper)
    assert dbm.is_included(m, out) and oracles.grid_included(m, out)
    k = dbm.canonicalize(extra_k(m, _kmax(lower, upper)))
    assert dbm.is_included(m, k)
    # Extra_LU is coarser than Extra_K with K = max(L, U)
    assert dbm.is_included(k, out)


def prop_extrapolation_monotone(args):
    seed, n = args
    rng = random.Random(seed)
    a = random_dbm(rng, n)
    b = _loosen(rng, a)
    lower, upper = _bounds(rng, n)
    assert oracles.grid_included(a, b)
    assert oracles.grid_included(_lu(a, lower, upper), _lu(b, lower, upper))


def prop_extrapolation_finite_range(args):
    seed, n = args
    rng = random.Random(seed)
    m = random_dbm(rng, n, cmax=12)
    lower, upper = _bounds(rng, n)
    raw = extra_lu(m, lower, upper)
    # every finite entry is fixed by the bounds, so only finitely many outputs exist
    top = max([c for c in lower + upper if c is not None], default=0)
    for i in range(n + 1):
        for j in range(n + 1):
            b = raw[i, j]
            if i != j and not b.is_inf:
                assert abs(b.value) <= top, (i, j, b)
    out = dbm.canonicalize(raw)
    assert _lu(out, lower, upper) == out


def prop_simulation_reflexive(args):
    seed, n = args
    rng = random.Random(seed)
    z = random_dbm(rng, n, future=True)
    atoms = random_atoms(rng, n, rng.randint(0, 3), diagonals=int(n >= 2 and rng.random() < 0.3))
    assert gsim.simulates_atoms(z, z, atoms)


def prop_simulation_transitive(args):
    seed, n = args
    rng = random.Random(seed)
    z1 = random_dbm(rng, n, future=True)
    z2 = dbm.future(_loosen(rng, z1)) if rng.random() < 0.6 else random_dbm(rng, n, future=True)
    z3 = dbm.future(_loosen(rng, z2)) if rng.random() < 0.6 else random_dbm(rng, n, future=True)
    atoms = random_atoms(rng, n, rng.randint(0, 3), diagonals=int(n >= 2 and rng.random() < 0.3))
    if gsim.simulates_atoms(z1, z2, atoms) and gsim.simulates_atoms(z2, z3, atoms):
        assert gsim.simulates_atoms(z1, z3, atoms)


def prop_inclusion_implies_simulation(args):
    seed, n = args
    rng = random.Random(seed)
    a, b = dbm_pair(rng, n, future=True)
    atoms = random_atoms(rng, n, rng.randint(0, 3), diagonals=int(n >= 2 and rng.random() < 0.3))
    if dbm.is_included(a, b):
        assert gsim.simulates_atoms(a, b, atoms)


# name -> (property, strategy, examples in the acceptance run)
SUITE = {
    "canonicalize idempotence": (prop_canonicalize_idempotent, case, 1500),
    "future idempotence": (prop_future_idempotent, case, 1500),
    "reset/future canonicity": (prop_reset_future_canonical, case, 1500),
    "extrapolation extensive": (prop_extrapolation_extensive, case, 1000),
    "extrapolation monotone": (prop_extrapolation_monotone, case, 1000),
    "extrapolation finite range": (prop_extrapolation_finite_range, case, 1000),
    "simulation reflexive": (prop_simulation_reflexive, case, 1000),
    "simulation transitive": (prop_simulation_transitive, case, 1000),
    "inclusion implies simulation": (prop_inclusion_implies_simulation, case, 800),
}


def stored_zone_points(a, denom: int, cap: int):
    """Grid points of every zone stored by the simulation explorer, with a
    verdict on whether the capped concrete system reaches each of them."""
    from zonecheck.reach import Strategy, explore

    res = explore(a, Strategy.sim(), lambda q: False, record_graph=True)
    concrete = oracles.concrete_reachable(a, denom, cap)
    out = []
    for node in res.graph.nodes:
        for p in oracles.zone_grid_points(node.zone, denom, cap):
            out.append(((node.state, tuple(int(x) for x in p[1:])), (node.state, tuple(int(x) for x in p[1:])) in concrete))
    return out
