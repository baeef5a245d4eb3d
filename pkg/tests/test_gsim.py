import random

import pytest

import oracles
from gen import sim_instance
from zonecheck import dbm, gsim, model_path
from zonecheck.constraints import AtomicConstraint as A
from zonecheck.errors import Diverged
from zonecheck.model import Update, load, parse

X, Y, Z = 1, 2, 3


def gset(g, a, name):
    """Atoms of ``G(name)`` as formatted strings."""
    text = g.format_state(a.state_id(name))
    body = text.split("= {", 1)[1].rstrip("}")
    return set(body.split(", ")) if body else set()


# -- pre operators ----------------------------------------------------------------


def test_pre_reset_diagonal_with_one_side_reset():
    assert gsim.pre_reset(A(4, 3, "<", 2), {1, 3}) == {A(4, 0, "<", 2)}


def test_pre_reset_cases():
    assert gsim.pre_reset(A(1, 0, "<=", 3), {1}) == set()
    assert gsim.pre_reset(A(X, Y, "<=", 3), set()) == {A(X, Y, "<=", 3)}
    assert gsim.pre_reset(A(X, Y, "<=", 3), {X, Y}) == set()
    # x - y <= 3 with x reset becomes -y <= 3, that is y >= -3
    assert gsim.pre_reset(A(X, Y, "<=", 3), {X}) == {A(Y, 0, ">=", -3)}


def test_pre_update_substitution():
    assert gsim.pre_update(A(X, Y, "<=", 5), [Update(X, Z, -2)]) == {A(Z, Y, "<=", 7)}


def test_pre_update_identity_and_constant():
    assert gsim.pre_update(A(X, 0, "<=", 3), [Update(X, X, 0)]) == {A(X, 0, "<=", 3)}
    assert gsim.pre_update(A(X, 0, "<=", 3), [Update(X, None, 2)]) == set()
    assert gsim.pre_update(A(X, 0, ">=", 3), [Update(X, None, 2)]) == set()


def test_pre_reset_is_pre_update_with_zero_resets():
    rng = random.Random(0)
    for _ in range(200):
        x, y = rng.sample(range(0, 4), 2)
        phi = A(x, y, rng.choice(["<", "<=", "=", ">=", ">"]), rng.randint(-3, 3))
        ys = {c for c in range(1, 4) if rng.random() < 0.5}
        assert gsim.pre_reset(phi, ys) == gsim.pre_update(phi, [Update(c) for c in sorted(ys)])


@pytest.mark.parametrize("seed", range(20))
def test_constant_atoms_carry_no_information(seed):
    # x - x <= 0 is constantly true and x - x < 0 constantly false: adding
    # either to G never changes the oracle's verdict, which is why
    # variable-free results of pre_update are dropped.
    rng = random.Random(seed)
    z, z2, atoms = sim_instance(rng, 1, rng.randint(0, 2))
    base = oracles.grid_simulates(z, z2, atoms)
    assert oracles.grid_simulates(z, z2, atoms + [A(1, 1, "<=", 0)]) == base
    assert oracles.grid_simulates(z, z2, atoms + [A(1, 1, "<", 0)]) == base


# -- constraint map ------------------------------------------------------------------


def test_abug_constraint_map():
    a = load(model_path("abug.ta"))
    g = gsim.compute_constraint_map(a)
    assert gset(g, a, "q6") == {"x2 - x1 > 2", "x4 - x3 < 2"}
    assert gset(g, a, "q2") == {"x1 = 2", "x2 = 2", "x4 - x3 < 2"}
    assert gset(g, a, "q0") == {"x3 <= 3", "x2 = 3", "x4 < 2"}


def test_guard_free_map_is_empty():
    a = parse("system s\nclock x\nstate q [initial]\nstate r\ntrans q -> r { do: x = 0; }\n")
    g = gsim.compute_constraint_map(a)
    assert g[0] == [] and g[1] == []


def test_increment_loop_diverges():
    a = parse("system s\nclock x\nstate q [initial]\ntrans q -> q { guard: x <= 1; do: x = x + 1; }\n")
    with pytest.raises(Diverged) as err:
        gsim.compute_constraint_map(a, iteration_cap=50)
    chain = err.value.witness
    assert chain[:3] == ["q: x <= 1", "q: x <= 0", "q: x <= -1"]
    assert err.value.state == "q"


def test_non_growing_update_loop_converges():
    a = parse("system s\nclock x y\nstate q [initial]\ntrans q -> q { guard: x <= 1; do: x = y + 1; }\n")
    g = gsim.compute_constraint_map(a)
    assert {atom.key() for atom in g[0]} == {A(X, 0, "<=", 1).key(), A(Y, 0, "<=", 0).key()}


@pytest.mark.parametrize("name", ["abug.ta", "fischer.ta", "guard_chain.ta", "train_gate.ta", "counter.ta"])
def test_map_is_a_supported_fixpoint(name):
    a = load(model_path(name))
    g = gsim.compute_constraint_map(a)
    for t in a.transitions:
        keys = g.keys(t.src)
        assert {atom.key() for atom in t.guard} <= keys
        for phi in g[t.dst]:
            assert {p.key() for p in gsim.pre_update(phi, t.updates)} <= keys
    # every atom is justified by a guard or by a pre image
    for q in range(len(a.states)):
        for atom in g[q]:
            support = set()
            for t in a.outgoing(q):
                support |= {p.key() for p in t.guard}
                for phi in g[t.dst]:
                    support |= {p.key() for p in gsim.pre_update(phi, t.updates)}
            assert atom.key() in support


def test_adding_a_guard_never_shrinks_the_map():
    a = load(model_path("guard_chain.ta"))
    g = gsim.compute_constraint_map(a)
    text = open(model_path("guard_chain.ta")).read().replace("guard: y >= 1 && x <= 4;", "guard: y >= 1 && x <= 4 && y < 2;")
    b = parse(text)
    h = gsim.compute_constraint_map(b)
    for q in range(len(a.states)):
        assert g.keys(q) <= h.keys(q)


def test_format():
    a = load(model_path("abug.ta"))
    text = gsim.compute_constraint_map(a).format()
    assert text.splitlines()[6] == "G(q6) = {x2 - x1 > 2, x4 - x3 < 2}"
    assert text.splitlines()[7] == "G(q7) = {}"


# -- simulation test -----------------------------------------------------------------


def z_alpha(alpha):
    c = 2 * alpha + 5
    return dbm.from_guard(
        [A(2, 1, ">=", 1), A(2, 1, "<=", 3), A(4, 3, ">=", 1), A(4, 3, "<=", 3), A(4, 2, "=", c), A(3, 1, "=", c)], 4
    )


def test_abug_zone_alpha_simulated():
    a = load(model_path("abug.ta"))
    g = gsim.compute_constraint_map(a)
    q6 = a.state_id("q6")
    z1, z2 = z_alpha(1), z_alpha(2)
    assert z1 is not None and dbm.is_future_closed(z1)
    assert not dbm.is_included(z1, z2)
    assert gsim.simulates(q6, z1, z2, g)
    assert gsim.mutually_simulates(q6, z1, z2, g)


def test_reflexive():
    rng = random.Random(4)
    for _ in range(30):
        z, _, atoms = sim_instance(rng, 3, 3, diagonals=1)
        assert gsim.simulates_atoms(z, z, atoms)


def test_strongest_atom_normalisation_changes_the_relation():
    # x < 2 does not make x < 3 redundant: at v(x) = 2.5 only x < 3 forces v'(x) <= v(x).
    z = dbm.future(dbm.from_guard([A(1, 0, "=", 0)], 1))
    z = dbm.constrain(z, A(1, 0, ">", 2))  # 2 < x
    big = dbm.future(dbm.from_guard([A(1, 0, "=", 3)], 1))  # x >= 3
    assert gsim.simulates_atoms(z, big, [A(1, 0, "<", 2)])
    assert not gsim.simulates_atoms(z, big, [A(1, 0, "<", 2), A(1, 0, "<", 3)])
    assert oracles.grid_simulates(z, big, [A(1, 0, "<", 2)])
    assert not oracles.grid_simulates(z, big, [A(1, 0, "<", 2), A(1, 0, "<", 3)])


def test_equality_is_not_its_split():
    # x = 2 says nothing once x > 2; x >= 2 keeps demanding v'(x) >= 2.
    z = dbm.from_guard([A(1, 0, ">", 2)], 1)
    z2 = dbm.from_guard([A(1, 0, "<", 2)], 1)
    assert gsim.simulates_atoms(z, z2, [A(1, 0, "=", 2)])
    assert not gsim.simulates_atoms(z, z2, [A(1, 0, "<=", 2), A(1, 0, ">=", 2)])
    assert oracles.grid_simulates(z, z2, [A(1, 0, "=", 2)])
    assert not oracles.grid_simulates(z, z2, [A(1, 0, "<=", 2), A(1, 0, ">=", 2)])


def test_split_budget_falls_back_to_false():
    z = dbm.future(dbm.zero(2))
    z2 = dbm.future(dbm.from_guard([A(1, 0, "=", 1), A(2, 0, "=", 0)], 2))
    diags = [A(1, 2, "<", 1), A(1, 2, ">", -1), A(2, 1, "<=", 2)]
    assert gsim.simulates_atoms(z, z2, diags) == oracles.grid_simulates(z, z2, diags)
    assert not gsim.simulates_atoms(z, z2, diags, split_budget=0)


def test_heuristic_hook_is_used():
    seen = []

    def reverse(z, z2, diags):
        seen.append(len(diags))
        return list(reversed(diags))

    z = dbm.future(dbm.from_guard([A(1, 0, "=", 1), A(2, 0, "=", 0)], 2))
    z2 = dbm.future(dbm.zero(2))
    diags = [A(1, 2, "<", 1), A(2, 1, "<=", 0)]
    assert gsim.simulates_atoms(z, z2, diags, heuristic=reverse) == gsim.simulates_atoms(z, z2, diags)
    assert seen == [2]


@pytest.mark.parametrize("seed", range(60))
def test_agrees_with_oracle(seed):
    rng = random.Random(1000 + seed)
    n = rng.randint(1, 3)
    diag = 1 if n >= 2 and seed % 3 == 0 else 0
    z, z2, atoms = sim_instance(rng, n, rng.randint(0, 4 - diag), diagonals=diag)
    expect = oracles.grid_simulates(z, z2, atoms)
    assert gsim.simulates_atoms(z, z2, atoms) == expect
    assert gsim.simulates_atoms(z, z2, atoms, pairwise=False) == expect


@pytest.mark.parametrize("seed", range(30))
def test_inclusion_implies_simulation(seed):
    rng = random.Random(seed)
    z, z2, atoms = sim_instance(rng, 3, 4, diagonals=seed % 2)
    if dbm.is_included(z, z2):
        assert gsim.simulates_atoms(z, z2, atoms)
