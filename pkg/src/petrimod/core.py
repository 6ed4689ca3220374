"""Directed labeled graphs with ordered interfaces and the algebra that glues them.

A Module is a directed graph whose nodes carry a label and a kind, plus two
ordered interfaces (left and right) referencing some of its nodes.  Equally
labeled interface slots are numbered 1..n by their position in the slot
sequence; these per-label indices are always derived from the order and are
never stored.  Composition merges index-matched slot pairs of the left
operand's right interface with the right operand's left interface; closure
does the same between a module's own two interfaces.

Node identity is an atom set.  Merging two nodes unions their atoms, so a
node produced by several merges in any grouping ends up with the same
identity, which is what makes composition associative as plain structural
equality rather than merely up to isomorphism.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Callable, Iterable, Iterator, Mapping, NamedTuple

from .errors import (
    KindMismatch,
    MalformedModule,
    NonDisjointInterfaces,
    NonDisjointOperands,
    UnnamedModule,
)

__all__ = [
    "Kind",
    "Alphabet",
    "AtomicNodeId",
    "NodeId",
    "Node",
    "Interface",
    "InterfaceSlot",
    "HarmonicPair",
    "Module",
    "harmonic_pairs",
    "compose",
    "closure",
    "abstract_of",
    "empty_module",
    "is_monolithic",
    "seam",
    "verify_well_formed",
]


class Kind(Enum):
    """What a node is: net place, net transition, or anything else."""

    PLACE = "place"
    TRANSITION = "transition"
    ABSTRACT = "abstract"


@dataclass(frozen=True)
class Alphabet:
    """Label universe split into place labels, transition labels, and the rest."""

    places: frozenset[str] = frozenset()
    transitions: frozenset[str] = frozenset()
    other: frozenset[str] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "places", frozenset(self.places))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        object.__setattr__(self, "other", frozenset(self.other))
        overlap = (self.places & self.transitions) | (self.places & self.other) | (self.transitions & self.other)
        if overlap:
            raise ValueError(f"labels declared in more than one group: {sorted(overlap)}")

    def __contains__(self, label: str) -> bool:
        return label in self.places or label in self.transitions or label in self.other

    def kind_of(self, label: str) -> Kind:
        if label in self.places:
            return Kind.PLACE
        if label in self.transitions:
            return Kind.TRANSITION
        return Kind.ABSTRACT


# Atom fields feed the canonical "instance:name" text form, so they must not
# contain the separator characters or whitespace.
_ATOM_FIELD = re.compile(r"[^\s:+]+\Z")


@dataclass(frozen=True, order=True)
class AtomicNodeId:
    """Indivisible unit of node identity, minted once per instantiation."""

    instance: str
    name: str

    def __post_init__(self):
        for part in (self.instance, self.name):
            if not _ATOM_FIELD.match(part):
                raise MalformedModule(f"bad atom field {part!r}: must be non-empty, no whitespace, ':' or '+'")

    def __str__(self) -> str:
        return f"{self.instance}:{self.name}"


@dataclass(frozen=True)
class NodeId:
    """Node identity: a non-empty set of atoms, flattened across merges."""

    atoms: frozenset[AtomicNodeId]

    def __post_init__(self):
        object.__setattr__(self, "atoms", frozenset(self.atoms))
        if not self.atoms:
            raise MalformedModule("NodeId needs at least one atom")

    @staticmethod
    def single(instance: str, name: str) -> "NodeId":
        return NodeId(frozenset((AtomicNodeId(instance, name),)))

    def merge(self, other: "NodeId") -> "NodeId":
        return NodeId(self.atoms | other.atoms)

    @cached_property
    def key(self) -> tuple[tuple[str, str], ...]:
        return tuple(sorted((a.instance, a.name) for a in self.atoms))

    def __lt__(self, other: "NodeId") -> bool:
        return self.key < other.key

    def __str__(self) -> str:
        return "+".join(f"{i}:{n}" for i, n in self.key)

    def __repr__(self) -> str:
        return f"NodeId({self})"


@dataclass(frozen=True)
class Node:
    """A graph node: identity, label, kind."""

    id: NodeId
    label: str
    kind: Kind

    def __post_init__(self):
        if not self.label:
            raise MalformedModule("node label must be non-empty")


class InterfaceSlot(NamedTuple):
    node: NodeId
    label: str
    index: int


@dataclass(frozen=True)
class Interface:
    """Ordered slot sequence; a node may fill at most one slot per interface."""

    slots: tuple[NodeId, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(self.slots))
        if len(set(self.slots)) != len(self.slots):
            raise MalformedModule("a node appears twice in one interface")

    def __iter__(self) -> Iterator[NodeId]:
        return iter(self.slots)

    def __len__(self) -> int:
        return len(self.slots)

    def __contains__(self, nid: object) -> bool:
        return nid in self.slots

    def __getitem__(self, i: int) -> NodeId:
        return self.slots[i]

    def indexed(self, label_of: Callable[[NodeId], str]) -> tuple[InterfaceSlot, ...]:
        """Slots with their labels and derived per-label indices (1..n top-down)."""
        seen: dict[str, int] = {}
        out = []
        for nid in self.slots:
            label = label_of(nid)
            seen[label] = seen.get(label, 0) + 1
            out.append(InterfaceSlot(nid, label, seen[label]))
        return tuple(out)

    def index_of(self, nid: NodeId, label_of: Callable[[NodeId], str]) -> int:
        for slot in self.indexed(label_of):
            if slot.node == nid:
                return slot.index
        raise KeyError(nid)

    def labels(self, label_of: Callable[[NodeId], str]) -> tuple[str, ...]:
        return tuple(label_of(nid) for nid in self.slots)


@dataclass(frozen=True)
class HarmonicPair:
    """Index-matched, equally labeled slot pair ready to be merged."""

    left: NodeId  # slot from the first interface handed in
    right: NodeId  # slot from the second
    label: str
    index: int


def _slots_by_label(slots: Iterable[NodeId], label_of: Callable[[NodeId], str]) -> dict[str, list[NodeId]]:
    by: dict[str, list[NodeId]] = {}
    for nid in slots:
        by.setdefault(label_of(nid), []).append(nid)
    return by


def harmonic_pairs(
    r: Interface,
    s: Interface,
    label_of: Callable[[NodeId], str],
) -> tuple[HarmonicPair, ...]:
    """All pairs (x in r, y in s) with equal label and equal per-label index.

    The two interfaces must not share a node; for each label the pairs are
    simply the first min(|r_l|, |s_l|) slots of each side zipped together,
    because per-label indices count 1..n in slot order.
    """
    shared = set(r.slots) & set(s.slots)
    if shared:
        raise NonDisjointInterfaces(shared)
    by_r = _slots_by_label(r, label_of)
    by_s = _slots_by_label(s, label_of)
    pairs = []
    for label in by_r:
        for i, (x, y) in enumerate(zip(by_r[label], by_s.get(label, ())), start=1):
            pairs.append(HarmonicPair(x, y, label, i))
    pairs.sort(key=lambda p: (p.label, p.index))
    return tuple(pairs)


class Module:
    """Immutable directed labeled graph with a left and a right interface.

    `nodes` maps NodeId to Node, `edges` is a set of (src, dst) NodeId pairs,
    `marking` holds positive token counts on places.  Construction validates
    every structural invariant; instances are never mutated afterwards.
    """

    __slots__ = ("nodes", "edges", "left", "right", "marking", "name", "__weakref__", "_atoms")

    def __init__(
        self,
        nodes: Iterable[Node] | Mapping[NodeId, Node] = (),
        edges: Iterable[tuple[NodeId, NodeId]] = (),
        left: Interface | Iterable[NodeId] = (),
        right: Interface | Iterable[NodeId] = (),
        marking: Mapping[NodeId, int] | None = None,
        name: str | None = None,
    ):
        if isinstance(nodes, Mapping):
            nodes = nodes.values()
        node_map: dict[NodeId, Node] = {}
        for node in nodes:
            if node.id in node_map:
                raise MalformedModule(f"node {node.id} defined twice")
            node_map[node.id] = node

        atoms: set[AtomicNodeId] = set()
        total = 0
        for nid in node_map:
            atoms |= nid.atoms
            total += len(nid.atoms)
        if len(atoms) != total:
            raise MalformedModule("distinct nodes share atoms")

        kind_by_label: dict[str, Kind] = {}
        for node in node_map.values():
            prev = kind_by_label.setdefault(node.label, node.kind)
            if prev is not node.kind:
                raise MalformedModule(f"label {node.label!r} used with kinds {prev.value} and {node.kind.value}")

        edge_set = frozenset((src, dst) for src, dst in edges)
        for src, dst in edge_set:
            if src not in node_map or dst not in node_map:
                raise MalformedModule(f"edge ({src}, {dst}) references unknown node")

        left_if = left if isinstance(left, Interface) else Interface(tuple(left))
        right_if = right if isinstance(right, Interface) else Interface(tuple(right))
        for side in (left_if, right_if):
            for nid in side:
                if nid not in node_map:
                    raise MalformedModule(f"interface references unknown node {nid}")

        mark: dict[NodeId, int] = {}
        for nid, count in (marking or {}).items():
            if count == 0:
                continue
            if nid not in node_map:
                raise MalformedModule(f"marking on unknown node {nid}")
            if node_map[nid].kind is not Kind.PLACE:
                raise MalformedModule(f"marking on non-place node {nid}")
            if not isinstance(count, int) or count < 0:
                raise MalformedModule(f"marking of {nid} must be a non-negative int")
            mark[nid] = count

        object.__setattr__(self, "nodes", node_map)
        object.__setattr__(self, "edges", edge_set)
        object.__setattr__(self, "left", left_if)
        object.__setattr__(self, "right", right_if)
        object.__setattr__(self, "marking", mark)
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "_atoms", frozenset(atoms))

    def __setattr__(self, *_):
        raise AttributeError("Module is immutable")

    # -- lookups ------------------------------------------------------------

    def label_of(self, nid: NodeId) -> str:
        return self.nodes[nid].label

    def kind_of(self, nid: NodeId) -> Kind:
        return self.nodes[nid].kind

    def tokens(self, nid: NodeId) -> int:
        return self.marking.get(nid, 0)

    @property
    def atom_set(self) -> frozenset[AtomicNodeId]:
        return self._atoms

    def interior(self) -> frozenset[NodeId]:
        """Nodes in no interface."""
        boundary = set(self.left) | set(self.right)
        return frozenset(nid for nid in self.nodes if nid not in boundary)

    def is_empty(self) -> bool:
        return not self.nodes

    # -- derived copies -------------------------------------------------------

    def with_name(self, name: str | None) -> "Module":
        return Module(self.nodes, self.edges, self.left, self.right, self.marking, name)

    def retagged(self, prefix: str) -> "Module":
        """Fresh copy whose every atom instance is namespaced under `prefix`.

        Labels, kinds, structure and markings are untouched, so the copy is
        isomorphic to the original but atom-disjoint from it.
        """
        remap: dict[NodeId, NodeId] = {
            nid: NodeId(frozenset(AtomicNodeId(f"{prefix}/{a.instance}", a.name) for a in nid.atoms))
            for nid in self.nodes
        }
        return Module(
            [Node(remap[n.id], n.label, n.kind) for n in self.nodes.values()],
            [(remap[s], remap[d]) for s, d in self.edges],
            [remap[n] for n in self.left],
            [remap[n] for n in self.right],
            {remap[n]: c for n, c in self.marking.items()},
            self.name,
        )

    def __repr__(self) -> str:
        name = self.name or "<anon>"
        return f"<Module {name}: {len(self.nodes)} nodes, {len(self.edges)} edges, L{len(self.left)}/R{len(self.right)}>"


def empty_module() -> Module:
    """The neutral element: no nodes, no edges, empty interfaces."""
    return Module()


def is_monolithic(a: Module) -> bool:
    """True when both interfaces reference exactly the same node set."""
    return set(a.left) == set(a.right)


def _merged_node(members: Iterable[NodeId]) -> NodeId:
    out: frozenset[AtomicNodeId] = frozenset()
    for nid in members:
        out |= nid.atoms
    return NodeId(out)


def compose(a: Module, b: Module) -> Module:
    """Glue `a` and `b` by merging the harmonic pairs of a's right and b's left interface.

    The operands must have disjoint atom sets.  Merged nodes take the union of
    their atoms and the sum of their tokens.  The result's left interface is
    a's left interface (merge-mapped) followed by b's unmatched left slots in
    order; the right interface is b's right interface followed by a's
    unmatched right slots.  With per-label indices derived from slot order,
    the appended leftovers land exactly at index p + n - m, where p counts the
    label on the kept side, n is the leftover's old index and m the number of
    merged pairs of that label.  Composition is total: without any harmonic
    pair it degrades to a disjoint union with concatenated interfaces.
    """
    shared = a.atom_set & b.atom_set
    if shared:
        raise NonDisjointOperands(shared)

    pairs = harmonic_pairs(a.right, b.left, lambda n: (a if n in a.nodes else b).label_of(n))
    merged: dict[NodeId, NodeId] = {}
    for p in pairs:
        if a.kind_of(p.left) is not b.kind_of(p.right):
            raise KindMismatch(
                f"pair {p.label!r}@{p.index} merges {a.kind_of(p.left).value} with {b.kind_of(p.right).value}"
            )
        m = p.left.merge(p.right)
        merged[p.left] = m
        merged[p.right] = m

    def mp(nid: NodeId) -> NodeId:
        return merged.get(nid, nid)

    nodes: dict[NodeId, Node] = {}
    for mod in (a, b):
        for node in mod.nodes.values():
            nid = mp(node.id)
            nodes[nid] = Node(nid, node.label, node.kind)

    edges = {(mp(s), mp(d)) for s, d in a.edges | b.edges}
    left = tuple(mp(n) for n in a.left) + tuple(n for n in b.left if n not in merged)
    right = tuple(mp(n) for n in b.right) + tuple(n for n in a.right if n not in merged)

    marking: dict[NodeId, int] = {}
    for mod in (a, b):
        for nid, count in mod.marking.items():
            key = mp(nid)
            marking[key] = marking.get(key, 0) + count

    return Module(nodes.values(), edges, left, right, marking)


def closure(a: Module) -> Module:
    """Merge the harmonic pairs of a's own right and left interface.

    A node sitting at the same label and index in both interfaces is its own
    counterpart; such a slot is left alone (nothing to merge with) and the
    node stays in both interfaces.  Distinct-node pairs merge; because one
    node can be the partner of one slot and the occupant of another, merges
    may chain, so the merge classes are computed with union-find.  Closure is
    total and idempotent.
    """
    by_r = _slots_by_label(a.right, a.label_of)
    by_l = _slots_by_label(a.left, a.label_of)

    pairs: list[tuple[NodeId, NodeId]] = []  # (right slot, left slot)
    for label, rs in by_r.items():
        for r, l in zip(rs, by_l.get(label, ())):
            if r != l:
                pairs.append((r, l))

    parent: dict[NodeId, NodeId] = {}

    def find(x: NodeId) -> NodeId:
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(x, x) != x:
            parent[x], x = root, parent[x]
        return root

    for r, l in pairs:
        parent.setdefault(r, r)
        parent.setdefault(l, l)
        parent[find(r)] = find(l)

    classes: dict[NodeId, list[NodeId]] = {}
    for nid in parent:
        classes.setdefault(find(nid), []).append(nid)
    remap: dict[NodeId, NodeId] = {}
    for members in classes.values():
        target = _merged_node(members)
        for nid in members:
            remap[nid] = target

    def mp(nid: NodeId) -> NodeId:
        return remap.get(nid, nid)

    dropped_left = {l for _, l in pairs}
    dropped_right = {r for r, _ in pairs}

    nodes: dict[NodeId, Node] = {}
    for node in a.nodes.values():
        nid = mp(node.id)
        nodes[nid] = Node(nid, node.label, node.kind)
    edges = {(mp(s), mp(d)) for s, d in a.edges}
    left = tuple(mp(n) for n in a.left if n not in dropped_left)
    right = tuple(mp(n) for n in a.right if n not in dropped_right)
    marking: dict[NodeId, int] = {}
    for nid, count in a.marking.items():
        key = mp(nid)
        marking[key] = marking.get(key, 0) + count

    return Module(nodes.values(), edges, left, right, marking)


def abstract_of(a: Module) -> Module:
    """Collapse a module to one abstract core node behind its own interfaces.

    The core is labeled with the module's name; every left slot gets an edge
    into the core and every right slot an edge out of it.  Interface slots,
    their order and their markings are kept, interior structure is dropped.
    The core's atom is derived from the module's atom listing, so equal
    modules abstract to the identical result.
    """
    if not a.name:
        raise UnnamedModule("abstraction needs a named module")
    listing = "\n".join(sorted(str(nid) for nid in a.nodes))
    digest = hashlib.sha1(f"{a.name}\n{listing}".encode()).hexdigest()[:12]
    core = NodeId.single(f"abstr.{digest}", a.name)

    boundary = set(a.left) | set(a.right)
    nodes = [Node(core, a.name, Kind.ABSTRACT)]
    nodes += [a.nodes[nid] for nid in a.nodes if nid in boundary]
    edges = {(nid, core) for nid in a.left} | {(core, nid) for nid in a.right}
    marking = {nid: c for nid, c in a.marking.items() if nid in boundary}
    return Module(nodes, edges, a.left, a.right, marking, a.name)


def seam(parts: Iterable[Module]) -> Module:
    """Fold composition over the abstract versions of the given modules."""
    acc = empty_module()
    for part in parts:
        acc = compose(acc, abstract_of(part))
    return acc


def verify_well_formed(a: Module) -> list[str]:
    """Re-derive every structural invariant from the public surface.

    Returns a list of human-readable violations, empty when the module is
    well formed.  Construction already enforces these; this recheck exists so
    outputs of every operation can be swept independently.
    """
    problems: list[str] = []

    atoms: set[AtomicNodeId] = set()
    total = 0
    for nid, node in a.nodes.items():
        if node.id != nid:
            problems.append(f"node map key {nid} != node id {node.id}")
        atoms |= nid.atoms
        total += len(nid.atoms)
        if not node.label:
            problems.append(f"{nid} has an empty label")
    if total != len(atoms):
        problems.append("distinct nodes share atoms")

    kind_by_label: dict[str, Kind] = {}
    for node in a.nodes.values():
        prev = kind_by_label.setdefault(node.label, node.kind)
        if prev is not node.kind:
            problems.append(f"label {node.label!r} carries two kinds")

    for src, dst in a.edges:
        if src not in a.nodes or dst not in a.nodes:
            problems.append(f"dangling edge ({src}, {dst})")

    for side_name, side in (("left", a.left), ("right", a.right)):
        seen: set[NodeId] = set()
        for nid in side:
            if nid in seen:
                problems.append(f"{side_name} interface repeats {nid}")
            seen.add(nid)
            if nid not in a.nodes:
                problems.append(f"{side_name} interface references unknown node {nid}")
        # per-label indices must come out exactly 1..n in slot order
        counters: dict[str, int] = {}
        for slot in side.indexed(a.label_of):
            counters[slot.label] = counters.get(slot.label, 0) + 1
            if slot.index != counters[slot.label]:
                problems.append(f"{side_name} interface index gap at {slot.node}")

    for nid, count in a.marking.items():
        if nid not in a.nodes:
            problems.append(f"marking on unknown node {nid}")
        elif a.nodes[nid].kind is not Kind.PLACE:
            problems.append(f"marking on non-place {nid}")
        if count < 0:
            problems.append(f"negative marking on {nid}")

    return problems
