"""Serializers: canonical JSON dump (lossless, byte-stable), Graphviz DOT, PNML.

The JSON dump is the round-trip format; DOT and PNML are one-way views.
Dumps are canonical: nodes and edges sorted, keys sorted, two-space indent,
trailing newline, so equal modules serialize to equal bytes.
"""

from __future__ import annotations

import hashlib
import json
import re
import xml.etree.ElementTree as ET
from importlib import resources

from .core import AtomicNodeId, Kind, Module, Node, NodeId
from .errors import AbstractNodePresent, NotANet, NotBipartite, ParseError, PetrimodError
from .nets import validate_net
from .relaxng import Schema, ValidationError

__all__ = [
    "DUMP_FORMAT",
    "PNML_NS",
    "PTNET_TYPE",
    "to_dict",
    "dumps",
    "loads",
    "to_dot",
    "to_pnml",
    "ptnet_schema",
    "validate_pnml",
]

DUMP_FORMAT = "petrimod-dump/1"
PNML_NS = "http://www.pnml.org/version-2009/grammar/pnml"
PTNET_TYPE = "http://www.pnml.org/version-2009/grammar/ptnet"
IDMAP_NS = "urn:petrimod:idmap"


# -- canonical JSON ------------------------------------------------------------

def to_dict(a: Module) -> dict:
    def side(interface):
        return [
            {"id": str(slot.node), "label": slot.label, "index": slot.index}
            for slot in interface.indexed(a.label_of)
        ]

    return {
        "format": DUMP_FORMAT,
        "name": a.name,
        "nodes": [
            {"id": str(n.id), "label": n.label, "kind": n.kind.value, "tokens": a.tokens(n.id)}
            for n in sorted(a.nodes.values(), key=lambda n: n.id)
        ],
        "edges": sorted([str(s), str(d)] for s, d in a.edges),
        "left": side(a.left),
        "right": side(a.right),
    }


def dumps(a: Module) -> str:
    return json.dumps(to_dict(a), indent=2, sort_keys=True) + "\n"


def _node_id(text, where: str) -> NodeId:
    if not isinstance(text, str):
        raise ParseError(f"{where}: node id must be a string, got {text!r}")
    atoms = []
    for part in text.split("+"):
        inst, sep, name = part.partition(":")
        if not sep or not inst or not name:
            raise ParseError(f"{where}: malformed node id {text!r}")
        atoms.append(AtomicNodeId(inst, name))
    return NodeId(frozenset(atoms))


def loads(text: str) -> Module:
    """Read a canonical dump back; stated interface labels/indices are re-derived
    and must agree, so a hand-edited dump cannot silently lie about them."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"not valid JSON: {e}") from None
    if not isinstance(data, dict):
        raise ParseError("dump must be a JSON object")
    if data.get("format") != DUMP_FORMAT:
        raise ParseError(f"expected format {DUMP_FORMAT!r}, got {data.get('format')!r}")

    kinds = {k.value: k for k in Kind}
    try:
        nodes = []
        marking: dict[NodeId, int] = {}
        for entry in data["nodes"]:
            nid = _node_id(entry["id"], "nodes")
            if entry["kind"] not in kinds:
                raise ParseError(f"unknown kind {entry['kind']!r}")
            nodes.append(Node(nid, entry["label"], kinds[entry["kind"]]))
            if entry.get("tokens", 0):
                marking[nid] = entry["tokens"]
        edges = [(_node_id(s, "edges"), _node_id(d, "edges")) for s, d in data["edges"]]
        left = [_node_id(e["id"], "left") for e in data["left"]]
        right = [_node_id(e["id"], "right") for e in data["right"]]
        module = Module(nodes, edges, left, right, marking, data.get("name"))
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError, AttributeError) as e:
        raise ParseError(f"malformed dump: {e}") from None
    except PetrimodError as e:
        raise ParseError(f"inconsistent dump: {e}") from None

    for side_name, interface, stated in (("left", module.left, data["left"]),
                                         ("right", module.right, data["right"])):
        for slot, entry in zip(interface.indexed(module.label_of), stated):
            if entry.get("label") != slot.label or entry.get("index") != slot.index:
                raise ParseError(
                    f"{side_name} interface states {entry.get('label')}:{entry.get('index')} "
                    f"for {slot.node}, derived {slot.label}:{slot.index}"
                )
    return module


# -- Graphviz ------------------------------------------------------------------

_SHAPE = {Kind.PLACE: "circle", Kind.TRANSITION: "box", Kind.ABSTRACT: "box"}


def _dot_label(a: Module, nid: NodeId) -> str:
    label = a.label_of(nid)
    tokens = a.tokens(nid)
    if not tokens:
        return label
    dots = "&#9679;" * tokens if tokens <= 5 else f"{tokens}&#9679;"
    return f"{label}\\n{dots}"


def to_dot(a: Module, *, title: str | None = None) -> str:
    """Render left interface as the min rank, right as the max rank, interior
    in a dashed cluster.  A node sitting in both interfaces is drawn twice,
    tied together with a double line."""
    order = sorted(a.nodes)
    dot_id = {nid: f"n{k}" for k, nid in enumerate(order)}
    left = set(a.left)
    right = set(a.right)
    doubled = left & right

    def decl(nid: NodeId, vid: str, text: str) -> str:
        node = a.nodes[nid]
        shape = _SHAPE[node.kind]
        extra = ' style=rounded' if node.kind is Kind.ABSTRACT else ""
        return f'{vid} [label="{text}" shape={shape}{extra}];'

    lines = [f'digraph "{title or a.name or "module"}" {{', "  rankdir=LR;"]
    lines.append('  node [fontsize=11 fontname="Helvetica"];')

    left_slots = {s.node: s for s in a.left.indexed(a.label_of)}
    right_slots = {s.node: s for s in a.right.indexed(a.label_of)}

    lines.append("  { rank=min;")
    for nid in a.left:
        s = left_slots[nid]
        lines.append("    " + decl(nid, dot_id[nid], f"{s.label}:{s.index}"))
    lines.append("  }")

    lines.append("  { rank=max;")
    for nid in a.right:
        s = right_slots[nid]
        vid = dot_id[nid] + ("r" if nid in doubled else "")
        lines.append("    " + decl(nid, vid, f"{s.label}:{s.index}"))
    lines.append("  }")

    interior = [nid for nid in order if nid not in left and nid not in right]
    if interior:
        lines.append("  subgraph cluster_interior {")
        lines.append("    style=dashed; label=\"\";")
        for nid in interior:
            lines.append("    " + decl(nid, dot_id[nid], _dot_label(a, nid)))
        lines.append("  }")

    for s, d in sorted(a.edges):
        src = dot_id[s]
        dst = dot_id[d] + ("r" if d in doubled else "")
        lines.append(f"  {src} -> {dst};")
    for nid in sorted(doubled):
        lines.append(f'  {dot_id[nid]} -> {dot_id[nid]}r [dir=none color="black:invis:black"];')

    lines.append("}")
    return "\n".join(lines) + "\n"


# -- PNML ----------------------------------------------------------------------

_ID_SAFE = re.compile(r"[^A-Za-z0-9_.\-]")


def _pnml_id(nid: NodeId) -> str:
    text = str(nid)
    digest = hashlib.sha1(text.encode()).hexdigest()[:8]
    return f"n-{_ID_SAFE.sub('-', text)[:40]}-{digest}"


def _text_child(parent: ET.Element, tag: str, text: str):
    holder = ET.SubElement(parent, tag)
    ET.SubElement(holder, "text").text = text


def to_pnml(a: Module, *, net_id: str = "net1") -> str:
    """Place/transition net XML.  Interfaces have no PNML counterpart and are
    dropped; the toolspecific block maps sanitized ids back to node ids."""
    try:
        view = validate_net(a)
    except (AbstractNodePresent, NotBipartite) as e:
        raise NotANet(str(e)) from e

    places = sorted(view.places)
    transitions = sorted(view.transitions)
    ids = {nid: _pnml_id(nid) for nid in places + transitions}

    root = ET.Element("pnml", {"xmlns": PNML_NS})
    net = ET.SubElement(root, "net", {"id": net_id, "type": PTNET_TYPE})
    if a.name:
        _text_child(net, "name", a.name)
    tool = ET.SubElement(net, "toolspecific", {"tool": "petrimod", "version": "1"})
    idmap = ET.SubElement(tool, "pm:idmap", {"xmlns:pm": IDMAP_NS})
    for nid in places + transitions:
        ET.SubElement(idmap, "pm:entry", {"pnml": ids[nid], "node": str(nid)})
    page = ET.SubElement(net, "page", {"id": "page1"})
    for p in places:
        el = ET.SubElement(page, "place", {"id": ids[p]})
        _text_child(el, "name", a.label_of(p))
        if view.marking.get(p, 0):
            _text_child(el, "initialMarking", str(view.marking[p]))
    for t in transitions:
        el = ET.SubElement(page, "transition", {"id": ids[t]})
        _text_child(el, "name", a.label_of(t))
    for k, (s, d) in enumerate(sorted(view.flow), 1):
        ET.SubElement(page, "arc", {"id": f"a{k}", "source": ids[s], "target": ids[d]})

    ET.indent(root)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(root, encoding="unicode") + "\n"


_schema: Schema | None = None


def ptnet_schema() -> Schema:
    global _schema
    if _schema is None:
        text = resources.files("petrimod").joinpath("schema/ptnet.rng").read_text(encoding="utf-8")
        _schema = Schema.from_string(text)
    return _schema


def validate_pnml(text: str) -> None:
    """Schema check plus the two ID semantics RELAX NG leaves out:
    id uniqueness and arc endpoint resolution."""
    ptnet_schema().validate_string(text)
    root = ET.fromstring(text)
    ids = [el.get("id") for el in root.iter() if el.get("id") is not None]
    dup = sorted({i for i in ids if ids.count(i) > 1})
    if dup:
        raise ValidationError(f"duplicate id(s): {dup}")
    known = set(ids)
    for arc in root.iter(f"{{{PNML_NS}}}arc"):
        for attr in ("source", "target"):
            if arc.get(attr) not in known:
                raise ValidationError(f"arc {arc.get('id')!r}: {attr} {arc.get(attr)!r} is not a node id")
