"""Acceptance gate: one criterion per test, one printed verdict line each.

Run with `pytest tests/test_acceptance.py -s` to see the verdict lines.
Criteria with a time bound measure wall-clock time and fail when over it.
"""

import random
import time
from collections import deque

from petrimod import (
    IsoOptions,
    abstract_of,
    closure,
    compose,
    dumps,
    empty_module,
    evaluate,
    factorize,
    fixture_path,
    isomorphic,
    loads,
    net_to_module,
    parse,
    reachability,
    structural_equal,
    to_pnml,
    validate_net,
    validate_pnml,
    verify_well_formed,
)
from petrimod.generate import random_module, random_net

SEED = 1105


def _report(num, name, ok, detail=""):
    tail = f"  [{detail}]" if detail else ""
    print(f"{'PASS' if ok else 'FAIL'}  criterion {num:>2}: {name}{tail}")
    assert ok, f"criterion {num} ({name}) failed{tail}"


def _rng(tag):
    return random.Random(f"{SEED}:{tag}")


def test_criterion_01_associativity():
    rng = _rng("assoc")
    start = time.perf_counter()
    bad = 0
    for _ in range(1000):
        a, b, c = (random_module(rng, t) for t in ("a", "b", "c"))
        if not structural_equal(compose(compose(a, b), c), compose(a, compose(b, c))):
            bad += 1
    elapsed = time.perf_counter() - start
    _report(
        1,
        "composition associative on 1000 random triples",
        bad == 0 and elapsed < 10.0,
        f"{bad} failures, {elapsed:.2f}s (limit 10s)",
    )


def test_criterion_02_identity():
    rng = _rng("ident")
    e = empty_module()
    bad = sum(
        1
        for _ in range(1000)
        if not (
            structural_equal(compose(e, (a := random_module(rng, "a"))), a)
            and structural_equal(compose(a, e), a)
        )
    )
    _report(2, "empty module is a two-sided identity for 1000 random modules", bad == 0, f"{bad} failures")


def test_criterion_03_closure_idempotent_and_label_split():
    rng = _rng("clos")
    bad_idem = bad_split = 0
    for _ in range(1000):
        c = closure(random_module(rng, "a"))
        if not structural_equal(closure(c), c):
            bad_idem += 1
        d = closure(random_module(rng, "b", shared_interfaces=False))
        if set(d.left.labels(d.label_of)) & set(d.right.labels(d.label_of)):
            bad_split += 1
    _report(
        3,
        "closure idempotent, no label on both sides, 1000 random modules",
        bad_idem == 0 and bad_split == 0,
        f"{bad_idem} idempotence / {bad_split} label-split failures",
    )


def test_criterion_04_abstraction_laws():
    rng = _rng("abst")
    rename = IsoOptions(rename_abstract_cores=True)
    bad = 0
    for _ in range(300):
        a = random_module(rng, "a", name="A")
        b = random_module(rng, "b", name="B")
        once = abstract_of(a)
        ok = isomorphic(abstract_of(once), once, rename) is not None
        lhs = abstract_of(compose(a, b).with_name("AB"))
        rhs = abstract_of(compose(abstract_of(a), abstract_of(b)).with_name("AB"))
        ok = ok and isomorphic(lhs, rhs, rename) is not None
        bad += 0 if ok else 1
    _report(4, "abstraction laws on 300 random named pairs", bad == 0, f"{bad} failures")


def test_criterion_05_factorization_completeness():
    rng = _rng("fact")
    start = time.perf_counter()
    bad = 0
    for _ in range(300):
        net = random_net(rng, "n", max_transitions=15, max_places=20)
        result = factorize(net)
        if not result.matches or isomorphic(result.recomposed, net_to_module(net)) is None:
            bad += 1
    elapsed = time.perf_counter() - start
    _report(
        5,
        "300 random nets recompose from their transition atoms",
        bad == 0 and elapsed < 30.0,
        f"{bad} failures, {elapsed:.2f}s (limit 30s)",
    )


def test_criterion_06_philosopher_cycles_coincide():
    env = parse(fixture_path("philosophers.hkl").read_text(encoding="utf-8"))
    forks = evaluate(env, "forks_in_a_cycle")
    phils = evaluate(env, "phils_in_a_cycle")
    ok = len(forks.left) == 0 and len(forks.right) == 0
    ok = ok and len(phils.left) == 0 and len(phils.right) == 0
    witness = isomorphic(forks, phils)
    _report(
        6,
        "both cycle assemblies evaluate, close completely, and are isomorphic",
        ok and witness is not None,
        f"{len(phils.nodes)} nodes each",
    )


def _oracle_reach(module):
    """Brute-force BFS over the token game, written against the module's raw
    edges on purpose: it must not share code with the simulator it checks."""
    places = {n for n, node in module.nodes.items() if node.kind.value == "place"}
    transitions = {n for n, node in module.nodes.items() if node.kind.value == "transition"}
    pre = {t: {s for s, d in module.edges if d == t} for t in transitions}
    post = {t: {d for s, d in module.edges if s == t} for t in transitions}

    def freeze(m):
        return frozenset((p, k) for p, k in m.items() if k)

    start = {p: module.marking.get(p, 0) for p in places}
    seen = {freeze(start)}
    queue = deque([start])
    while queue:
        m = queue.popleft()
        for t in transitions:
            if all(m.get(p, 0) > 0 for p in pre[t]):
                nxt = dict(m)
                for p in pre[t]:
                    nxt[p] -= 1
                for p in post[t]:
                    nxt[p] = nxt.get(p, 0) + 1
                key = freeze(nxt)
                if key not in seen:
                    seen.add(key)
                    queue.append(nxt)
    return seen


def test_criterion_07_philosopher_behavior():
    env = parse(fixture_path("philosophers.hkl").read_text(encoding="utf-8"))
    m = evaluate(env, "phils_in_a_cycle")
    net = validate_net(m)
    g = reachability(net)

    oracle = _oracle_reach(m)
    counts_match = not g.truncated and len(g) == len(oracle) == 11

    eat_of = {}
    for t in net.transitions:
        if m.label_of(t) != "take":
            continue
        eat = next(p for p in net.post(t) if m.label_of(p) == "eating")
        eat_of[eat] = frozenset(p for p in net.pre(t) if m.label_of(p) == "available")
    exclusive = True
    for state in oracle:
        eating = [p for p, k in state if p in eat_of and k]
        for i, a in enumerate(eating):
            for b in eating[i + 1 :]:
                if eat_of[a] & eat_of[b]:
                    exclusive = False
    _report(
        7,
        "cycle reachability untruncated, matches brute-force oracle, neighbours never eat together",
        counts_match and exclusive,
        f"simulator {len(g)} vs oracle {len(oracle)} markings",
    )


def test_criterion_08_interface_multiplicities():
    env = parse(fixture_path("production.hkl").read_text(encoding="utf-8"))
    two = evaluate(env, "two_steps")
    sides_ok = [(s.label, s.index) for s in two.left.indexed(two.label_of)] == [
        ("material", 1),
        ("material", 2),
    ] and [(s.label, s.index) for s in two.right.indexed(two.label_of)] == [
        ("product", 1),
        ("product", 2),
    ]

    grouped = evaluate(env, "line_grouped")
    mixed = evaluate(env, "line_mixed")
    grouped_ok = [(s.label, s.index) for s in grouped.right.indexed(grouped.label_of)] == [
        ("parcel", 1),
        ("parcel", 2),
        ("product", 1),
    ]
    mixed_ok = [(s.label, s.index) for s in mixed.right.indexed(mixed.label_of)] == [
        ("product", 1),
        ("parcel", 1),
        ("parcel", 2),
    ]
    _report(
        8,
        "production lines expose duplicate labels with hand-derived slot orders",
        sides_ok and grouped_ok and mixed_ok,
        "two_steps, line_grouped, line_mixed",
    )


def test_criterion_09_well_formedness_everywhere():
    rng = _rng("wf")
    bad = 0
    checked = 0

    def check(m):
        nonlocal bad, checked
        checked += 1
        if verify_well_formed(m):
            bad += 1
            return
        for side in (m.left, m.right):
            per_label = {}
            for slot in side.indexed(m.label_of):
                per_label.setdefault(slot.label, []).append(slot.index)
            if any(idx != list(range(1, len(idx) + 1)) for idx in per_label.values()):
                bad += 1

    for _ in range(300):
        a = random_module(rng, "a", name="A")
        b = random_module(rng, "b")
        check(compose(a, b))
        check(closure(a))
        check(abstract_of(a))
    for name in ("philosophers.hkl", "production.hkl"):
        env = parse(fixture_path(name).read_text(encoding="utf-8"))
        for binding in env.names():
            check(evaluate(env, binding))
    _report(
        9,
        "per-label indices are exactly 1..n on every operation output",
        bad == 0,
        f"{checked} modules checked",
    )


def test_criterion_10_export_conformance():
    bad_pnml = bad_dump = 0
    total = 0
    for name in ("philosophers.hkl", "production.hkl"):
        env = parse(fixture_path(name).read_text(encoding="utf-8"))
        for binding in env.names():
            total += 1
            m = evaluate(env, binding)
            try:
                validate_pnml(to_pnml(m))
            except Exception:
                bad_pnml += 1
            text = dumps(m)
            back = loads(text)
            if not structural_equal(back, m) or dumps(back) != text:
                bad_dump += 1
    _report(
        10,
        "PNML validates and dumps round-trip byte-stable for every fixture binding",
        bad_pnml == 0 and bad_dump == 0,
        f"{total} bindings",
    )
