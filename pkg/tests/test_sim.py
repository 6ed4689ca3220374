import pytest

from petrimod import NodeId, check_invariant, enabled, evaluate, fire, reachability, validate_net
from petrimod.errors import NotEnabled, UnknownTransition
from petrimod.nets import NetView
from petrimod.sim import Counterexample


@pytest.fixture(scope="module")
def phil(phil_env):
    m = evaluate(phil_env, "phils_in_a_cycle")
    return m, validate_net(m)


def takes(m, net):
    return [t for t in sorted(net.transitions) if m.label_of(t) == "take"]


def test_initially_every_take_is_enabled(phil):
    m, net = phil
    ts = enabled(net, net.marking)
    assert len(ts) == 5
    assert all(m.label_of(t) == "take" for t in ts)


def test_firing_a_take_blocks_the_neighbours(phil):
    m, net = phil
    first, *rest = takes(m, net)
    after = fire(net, net.marking, first)
    forks = {p for p in net.pre(first) if m.label_of(p) == "available"}
    neighbours = [t for t in rest if net.pre(t) & forks]
    assert len(neighbours) == 2
    still = set(enabled(net, after))
    assert not still & set(neighbours)
    assert set(rest) - set(neighbours) <= still


def test_fire_moves_tokens(phil):
    m, net = phil
    t = takes(m, net)[0]
    after = fire(net, net.marking, t)
    assert sum(net.marking.values()) == 10
    assert sum(after.values()) == 8  # two forks and a thinking token for one eating
    ret = [r for r in net.transitions if m.label_of(r) == "return" and net.pre(r) == net.post(t)]
    assert len(ret) == 1
    assert fire(net, after, ret[0]) == dict(net.marking)


def test_fire_errors(phil):
    m, net = phil
    eater = next(t for t in net.transitions if m.label_of(t) == "return")
    with pytest.raises(NotEnabled):
        fire(net, net.marking, eater)
    with pytest.raises(UnknownTransition):
        fire(net, net.marking, NodeId.single("x", "ghost"))


def test_philosopher_state_space(phil):
    _, net = phil
    g = reachability(net)
    assert len(g) == 11
    assert not g.truncated


def test_production_state_spaces(prod_env):
    two = validate_net(evaluate(prod_env, "two_steps"))
    assert len(reachability(two)) == 4
    mixed = validate_net(evaluate(prod_env, "line_mixed"))
    assert len(reachability(mixed)) == 18


def test_paths_replay_to_their_markings(phil):
    _, net = phil
    g = reachability(net)
    for i in range(len(g)):
        m = dict(net.marking)
        for t in g.path_to(i):
            m = fire(net, m, t)
        assert m == g.marking(i)


def test_graph_is_complete_when_untruncated(phil):
    _, net = phil
    g = reachability(net)
    outgoing = {}
    for src, t, _ in g.arcs:
        outgoing.setdefault(src, set()).add(t)
    for i in range(len(g)):
        assert outgoing.get(i, set()) == set(enabled(net, g.marking(i)))


def test_initial_marking_is_a_home_state(phil):
    # state 0 is reachable from every state: walk the arcs backwards
    _, net = phil
    g = reachability(net)
    back = {}
    for src, _, dst in g.arcs:
        back.setdefault(dst, set()).add(src)
    seen = {0}
    frontier = [0]
    while frontier:
        fresh = {x for s in frontier for x in back.get(s, ()) if x not in seen}
        seen |= fresh
        frontier = list(fresh)
    assert seen == set(range(len(g)))


def test_trivially_false_invariant_fails_at_the_root(phil):
    _, net = phil
    g = reachability(net)
    ce = check_invariant(g, lambda m: False)
    assert isinstance(ce, Counterexample)
    assert ce.path == ()
    assert ce.marking == dict(net.marking)


def test_neighbouring_philosophers_never_eat_together(phil):
    m, net = phil
    g = reachability(net)
    eat_of = {}
    for t in takes(m, net):
        eat = next(p for p in net.post(t) if m.label_of(p) == "eating")
        forks = frozenset(p for p in net.pre(t) if m.label_of(p) == "available")
        eat_of[eat] = forks

    def exclusive(marking):
        eating = [e for e in eat_of if marking.get(e, 0)]
        return all(
            not (eat_of[a] & eat_of[b]) for i, a in enumerate(eating) for b in eating[i + 1 :]
        )

    assert check_invariant(g, exclusive) is None


def test_each_philosopher_thinks_or_eats(phil):
    m, net = phil
    g = reachability(net)
    state_places = [p for p in net.places if m.label_of(p) in ("thinking", "eating")]
    assert check_invariant(g, lambda mk: sum(mk.get(p, 0) for p in state_places) == 5) is None


def test_caps_mark_the_graph_truncated():
    t, p = NodeId.single("g", "t"), NodeId.single("g", "p")
    growing = NetView(frozenset({p}), frozenset({t}), frozenset({(t, p)}), {})
    g = reachability(growing)
    assert g.truncated
    assert len(g) == 17  # 0..16 tokens, further growth cut off

    g2 = reachability(growing, max_markings=5)
    assert g2.truncated and len(g2) == 5


def test_initial_marking_must_name_places(phil):
    _, net = phil
    with pytest.raises(ValueError):
        reachability(net, {NodeId.single("x", "alien"): 1})
