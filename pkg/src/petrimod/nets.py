"""Viewing modules as place/transition nets and factorizing nets into transition atoms."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .core import Kind, Module, Node, NodeId, compose, empty_module
from .errors import AbstractNodePresent, IsolatedElement, NotBipartite, UnknownTransition
from .iso import IsoOptions, IsoWitness, isomorphic

__all__ = ["NetView", "Factorization", "validate_net", "net_to_module", "transition_atom", "factorize"]


@dataclass(frozen=True)
class NetView:
    """A module's content read as a net: places, transitions, flow, tokens."""

    places: frozenset[NodeId]
    transitions: frozenset[NodeId]
    flow: frozenset[tuple[NodeId, NodeId]]
    marking: Mapping[NodeId, int] = field(default_factory=dict)

    def pre(self, t: NodeId) -> frozenset[NodeId]:
        return frozenset(p for p, x in self.flow if x == t)

    def post(self, t: NodeId) -> frozenset[NodeId]:
        return frozenset(p for x, p in self.flow if x == t)


def validate_net(a: Module) -> NetView:
    """Check that every node is a place or transition and every edge crosses kinds."""
    offenders = sorted(nid for nid, node in a.nodes.items() if node.kind is Kind.ABSTRACT)
    if offenders:
        raise AbstractNodePresent(offenders)
    bad = sorted((s, d) for s, d in a.edges if a.kind_of(s) is a.kind_of(d))
    if bad:
        raise NotBipartite(bad)
    return NetView(
        places=frozenset(nid for nid, n in a.nodes.items() if n.kind is Kind.PLACE),
        transitions=frozenset(nid for nid, n in a.nodes.items() if n.kind is Kind.TRANSITION),
        flow=a.edges,
        marking=dict(a.marking),
    )


def net_to_module(n: NetView) -> Module:
    """The monolithic module of a net: every place on both interfaces, identity labels."""
    nodes = [Node(p, str(p), Kind.PLACE) for p in n.places]
    nodes += [Node(t, str(t), Kind.TRANSITION) for t in n.transitions]
    places = tuple(sorted(n.places))
    return Module(nodes, n.flow, places, places, dict(n.marking))


def transition_atom(n: NetView, t: NodeId) -> Module:
    """The atomic module of one transition: its surrounding places on both interfaces.

    Places keep their net identity as labels, so equally named places of two
    atoms merge when the atoms are composed.  Markings are structural noise
    here and are left out.
    """
    if t not in n.transitions:
        raise UnknownTransition(f"{t} is not a transition of this net")
    pre, post = n.pre(t), n.post(t)
    ring = tuple(sorted(pre | post))
    if not ring:
        raise IsolatedElement([t], f"transition {t} has no surrounding places")
    nodes = [Node(t, str(t), Kind.TRANSITION)]
    nodes += [Node(p, str(p), Kind.PLACE) for p in ring]
    edges = {(p, t) for p in pre} | {(t, p) for p in post}
    return Module(nodes, edges, ring, ring)


@dataclass(frozen=True)
class Factorization:
    """Transition atoms of a net plus the outcome of recomposing them."""

    atoms: tuple[Module, ...]
    recomposed: Module
    reference: Module
    matches: bool
    witness: IsoWitness | None


def factorize(n: NetView) -> Factorization:
    """Split a net into its transition atoms and check they compose back to it.

    Atoms are ordered by canonical transition id.  The recomposition folds
    composition over fresh copies of the atoms (composition operands must be
    atom-disjoint, while the atoms themselves share places); identity labels
    then merge shared places back together.  The fold is compared against the
    net's monolithic module up to isomorphism, which is the right equivalence
    because merged copies carry union identities.
    """
    isolated = sorted(n.places - {p for e in n.flow for p in e})
    isolated += sorted(t for t in n.transitions if not n.pre(t) and not n.post(t))
    if isolated:
        raise IsolatedElement(isolated)

    atoms = tuple(transition_atom(n, t) for t in sorted(n.transitions))
    recomposed = empty_module()
    for i, atom in enumerate(atoms, start=1):
        recomposed = compose(recomposed, atom.retagged(f"f{i}"))
    reference = net_to_module(n)
    witness = isomorphic(recomposed, reference, IsoOptions())
    return Factorization(atoms, recomposed, reference, witness is not None, witness)
