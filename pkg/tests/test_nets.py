import random

import pytest

from petrimod import (
    Kind,
    NodeId,
    evaluate,
    factorize,
    is_monolithic,
    net_to_module,
    transition_atom,
    validate_net,
)
from petrimod.errors import AbstractNodePresent, IsolatedElement, NotBipartite, UnknownTransition
from petrimod.generate import random_net
from petrimod.nets import NetView

from conftest import module, node


def small_net():
    p0, p1 = NodeId.single("n", "p0"), NodeId.single("n", "p1")
    t = NodeId.single("n", "t0")
    return NetView(
        places=frozenset({p0, p1}),
        transitions=frozenset({t}),
        flow=frozenset({(p0, t), (t, p1)}),
        marking={p0: 1},
    )


def test_validate_net_accepts_fixture(phil_env):
    m = evaluate(phil_env, "phils_in_a_cycle")
    view = validate_net(m)
    assert len(view.places) == 15 and len(view.transitions) == 10
    assert sum(view.marking.values()) == 10


def test_abstract_node_rejected():
    a = module([node("a", "x", "alpha")])
    with pytest.raises(AbstractNodePresent) as exc:
        validate_net(a)
    assert len(exc.value.nodes) == 1


def test_same_kind_edge_rejected():
    p0, p1 = node("a", "p0", "p"), node("a", "p1", "p")
    a = module([p0, p1], edges=[(p0.id, p1.id)])
    with pytest.raises(NotBipartite) as exc:
        validate_net(a)
    assert exc.value.bad_edges == ((p0.id, p1.id),)


def test_net_to_module_is_monolithic_with_identity_labels():
    n = small_net()
    m = net_to_module(n)
    assert is_monolithic(m)
    assert set(m.left) == n.places == set(m.right)
    for p in n.places:
        assert m.label_of(p) == str(p)
    assert dict(m.marking) == dict(n.marking)
    assert m.edges == n.flow


def test_transition_atom_shape():
    n = small_net()
    t = next(iter(n.transitions))
    atom = transition_atom(n, t)
    assert is_monolithic(atom)
    assert atom.interior() == {t}
    assert set(atom.left) == n.pre(t) | n.post(t)
    assert sum(atom.marking.values()) == 0
    assert atom.edges == n.flow


def test_transition_atom_errors():
    n = small_net()
    with pytest.raises(UnknownTransition):
        transition_atom(n, NodeId.single("n", "missing"))
    lonely = NodeId.single("n", "t_l")
    n2 = NetView(n.places, n.transitions | {lonely}, n.flow, {})
    with pytest.raises(IsolatedElement):
        transition_atom(n2, lonely)


def test_factorize_rejects_isolated_elements():
    n = small_net()
    orphan = NodeId.single("n", "p_orphan")
    n2 = NetView(n.places | {orphan}, n.transitions, n.flow, {})
    with pytest.raises(IsolatedElement) as exc:
        factorize(n2)
    assert orphan in exc.value.nodes


def test_factorize_small_net_round_trips():
    result = factorize(small_net())
    assert len(result.atoms) == 1
    assert result.matches
    assert result.witness is not None


def test_factorize_philosophers(phil_env):
    view = validate_net(evaluate(phil_env, "phils_in_a_cycle"))
    result = factorize(view)
    assert len(result.atoms) == 10
    assert result.matches
    # every atom covers one transition and both of its place rings
    for atom in result.atoms:
        inner = atom.interior()
        assert len(inner) == 1
        t = next(iter(inner))
        assert atom.kind_of(t) is Kind.TRANSITION


def test_factorize_random_sweep():
    rng = random.Random(99)
    for _ in range(30):
        assert factorize(random_net(rng, "n", max_transitions=6, max_places=8)).matches
