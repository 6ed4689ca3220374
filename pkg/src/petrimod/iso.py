"""Structural equality and label-respecting isomorphism with replayable witnesses."""

from __future__ import annotations

from dataclasses import dataclass

from .core import Interface, Kind, Module, NodeId
from .errors import SearchBudgetExceeded

__all__ = ["IsoOptions", "IsoWitness", "structural_equal", "isomorphic", "verify_witness"]


@dataclass(frozen=True)
class IsoOptions:
    """Mutually exclusive matching modes.

    rename_abstract_cores: labels of abstract-kind nodes are matched through
    one consistent bijective renaming instead of string equality.
    require_identical_atoms: only the identity mapping is considered, which
    turns the check into structural comparison of marking-free content.
    """

    rename_abstract_cores: bool = False
    require_identical_atoms: bool = False

    def __post_init__(self):
        if self.rename_abstract_cores and self.require_identical_atoms:
            raise ValueError("rename_abstract_cores and require_identical_atoms are mutually exclusive")


@dataclass(frozen=True)
class IsoWitness:
    """A node bijection plus the abstract-label renaming it relies on."""

    mapping: tuple[tuple[NodeId, NodeId], ...]
    label_renaming: tuple[tuple[str, str], ...] = ()

    @property
    def as_dict(self) -> dict[NodeId, NodeId]:
        return dict(self.mapping)

    @property
    def renaming(self) -> dict[str, str]:
        return dict(self.label_renaming)


def structural_equal(a: Module, b: Module) -> bool:
    """Exact coincidence of nodes, edges, interfaces, labels, kinds and markings.

    Module names are metadata and do not participate.
    """
    if set(a.nodes) != set(b.nodes):
        return False
    for nid, node in a.nodes.items():
        other = b.nodes[nid]
        if node.label != other.label or node.kind is not other.kind:
            return False
    return (
        a.edges == b.edges
        and a.left.slots == b.left.slots
        and a.right.slots == b.right.slots
        and a.marking == b.marking
    )


def _interface_positions(side: Interface, label_of) -> dict[NodeId, int]:
    return {slot.node: slot.index for slot in side.indexed(label_of)}


class _Search:
    def __init__(self, a: Module, b: Module, opts: IsoOptions, budget: int):
        self.a = a
        self.b = b
        self.opts = opts
        self.budget = budget
        self.steps = 0

        self.a_left = _interface_positions(a.left, a.label_of)
        self.a_right = _interface_positions(a.right, a.label_of)
        self.b_left = _interface_positions(b.left, b.label_of)
        self.b_right = _interface_positions(b.right, b.label_of)

        self.a_out: dict[NodeId, set[NodeId]] = {n: set() for n in a.nodes}
        self.a_in: dict[NodeId, set[NodeId]] = {n: set() for n in a.nodes}
        for s, d in a.edges:
            self.a_out[s].add(d)
            self.a_in[d].add(s)
        self.b_out: dict[NodeId, set[NodeId]] = {n: set() for n in b.nodes}
        self.b_in: dict[NodeId, set[NodeId]] = {n: set() for n in b.nodes}
        for s, d in b.edges:
            self.b_out[s].add(d)
            self.b_in[d].add(s)

        self.fwd: dict[NodeId, NodeId] = {}
        self.rev: dict[NodeId, NodeId] = {}
        self.ren: dict[str, str] = {}
        self.ren_rev: dict[str, str] = {}

    def renames(self, u: NodeId) -> bool:
        return self.opts.rename_abstract_cores and self.a.kind_of(u) is Kind.ABSTRACT

    def feasible(self, u: NodeId, v: NodeId) -> bool:
        na, nb = self.a.nodes[u], self.b.nodes[v]
        if na.kind is not nb.kind:
            return False
        if self.renames(u):
            if self.ren.get(na.label, nb.label) != nb.label:
                return False
            if self.ren_rev.get(nb.label, na.label) != na.label:
                return False
        elif na.label != nb.label:
            return False
        if self.a_left.get(u) != self.b_left.get(v) or self.a_right.get(u) != self.b_right.get(v):
            return False
        if len(self.a_out[u]) != len(self.b_out[v]) or len(self.a_in[u]) != len(self.b_in[v]):
            return False
        # edges to the already-mapped region must correspond in both directions
        for x in self.a_out[u]:
            y = self.fwd.get(x)
            if y is not None and y not in self.b_out[v]:
                return False
        for x in self.a_in[u]:
            y = self.fwd.get(x)
            if y is not None and y not in self.b_in[v]:
                return False
        for y in self.b_out[v]:
            x = self.rev.get(y)
            if x is not None and x not in self.a_out[u]:
                return False
        for y in self.b_in[v]:
            x = self.rev.get(y)
            if x is not None and x not in self.a_in[u]:
                return False
        return True

    def run(self) -> dict[NodeId, NodeId] | None:
        if self._extend():
            return dict(self.fwd)
        return None

    def _extend(self) -> bool:
        if len(self.fwd) == len(self.a.nodes):
            return True
        # most-constrained unmapped node first keeps the branching flat
        best_u: NodeId | None = None
        best_cands: list[NodeId] | None = None
        for u in self.a.nodes:
            if u in self.fwd:
                continue
            cands = [v for v in self.b.nodes if v not in self.rev and self.feasible(u, v)]
            if best_cands is None or len(cands) < len(best_cands):
                best_u, best_cands = u, cands
                if not cands:
                    return False
                if len(cands) == 1:
                    break
        assert best_u is not None and best_cands is not None
        for v in best_cands:
            self.steps += 1
            if self.steps > self.budget:
                raise SearchBudgetExceeded(f"gave up after {self.budget} candidate expansions")
            label_a, label_b = self.a.label_of(best_u), self.b.label_of(v)
            new_rename = self.renames(best_u) and label_a not in self.ren
            self.fwd[best_u] = v
            self.rev[v] = best_u
            if new_rename:
                self.ren[label_a] = label_b
                self.ren_rev[label_b] = label_a
            if self._extend():
                return True
            del self.fwd[best_u]
            del self.rev[v]
            if new_rename:
                del self.ren[label_a]
                del self.ren_rev[label_b]
        return False


def isomorphic(
    a: Module,
    b: Module,
    options: IsoOptions | None = None,
    *,
    budget: int = 1_000_000,
) -> IsoWitness | None:
    """Find a structure-preserving node bijection, or None if there is none.

    The witness preserves kinds, labels (modulo the optional abstract-core
    renaming), edges in both directions, and interface membership with side
    and per-label index.  Markings are not compared.  Raises
    SearchBudgetExceeded when the backtracking search runs out of budget,
    which means unknown rather than non-isomorphic.
    """
    opts = options or IsoOptions()

    if opts.require_identical_atoms:
        if set(a.nodes) != set(b.nodes):
            return None
        witness = IsoWitness(tuple(sorted((n, n) for n in a.nodes)))
        return witness if verify_witness(a, b, witness, opts) else None

    if len(a.nodes) != len(b.nodes) or len(a.edges) != len(b.edges):
        return None
    if len(a.left) != len(b.left) or len(a.right) != len(b.right):
        return None

    def signature(m: Module, rename: bool):
        sig = []
        for node in m.nodes.values():
            label = "*" if (rename and node.kind is Kind.ABSTRACT) else node.label
            sig.append((node.kind.value, label))
        return sorted(sig)

    if signature(a, opts.rename_abstract_cores) != signature(b, opts.rename_abstract_cores):
        return None

    search = _Search(a, b, opts, budget)
    mapping = search.run()
    if mapping is None:
        return None
    witness = IsoWitness(
        tuple(sorted(mapping.items())),
        # identity bindings constrain the search but are not renames
        tuple(sorted((x, y) for x, y in search.ren.items() if x != y)),
    )
    assert verify_witness(a, b, witness, opts), "search returned a witness that fails replay"
    return witness


def verify_witness(a: Module, b: Module, witness: IsoWitness, options: IsoOptions | None = None) -> bool:
    """Replay a witness slot-by-slot and edge-by-edge against both modules."""
    opts = options or IsoOptions()
    mapping = witness.as_dict

    if set(mapping) != set(a.nodes) or set(mapping.values()) != set(b.nodes):
        return False
    if len(set(mapping.values())) != len(mapping):
        return False
    if opts.require_identical_atoms and any(u != v for u, v in mapping.items()):
        return False

    ren: dict[str, str] = {}
    ren_rev: dict[str, str] = {}
    for u, v in mapping.items():
        na, nb = a.nodes[u], b.nodes[v]
        if na.kind is not nb.kind:
            return False
        if opts.rename_abstract_cores and na.kind is Kind.ABSTRACT:
            if ren.setdefault(na.label, nb.label) != nb.label:
                return False
            if ren_rev.setdefault(nb.label, na.label) != na.label:
                return False
        elif na.label != nb.label:
            return False

    if {(mapping[s], mapping[d]) for s, d in a.edges} != set(b.edges):
        return False

    for a_side, b_side in ((a.left, b.left), (a.right, b.right)):
        if {mapping[n] for n in a_side} != set(b_side.slots):
            return False
        b_pos = _interface_positions(b_side, b.label_of)
        for slot in a_side.indexed(a.label_of):
            if b_pos.get(mapping[slot.node]) != slot.index:
                return False
    return True
