"""Exports: Mermaid relation diagrams and OBJ scene geometry.

Both exporters are deterministic functions of their inputs: nodes and
edges are emitted in sorted order and floats are printed with a fixed
format, so exporting the same data twice yields identical bytes.
"""

from __future__ import annotations

import re
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .geometry import corners
from .model import SpatialObject, SpatialRelation

_NODE_RE = re.compile(r"[^A-Za-z0-9_]")

# quads into the corner order produced by geometry.corners():
# vertices 1-4 are the base ring, 5-8 the top ring, both counter-clockwise
_BOX_FACES = (
    (4, 3, 2, 1),  # bottom, facing down
    (5, 6, 7, 8),  # top, facing up
    (1, 2, 6, 5),
    (2, 3, 7, 6),
    (3, 4, 8, 7),
    (4, 1, 5, 8),
)


def _node_ids(names: Sequence[str]) -> Dict[str, str]:
    """Mermaid-safe node ids, unique even when sanitizing collides."""
    mapping: Dict[str, str] = {}
    used: Dict[str, int] = {}
    for name in names:
        base = _NODE_RE.sub("_", name) or "node"
        if base[0].isdigit():
            base = "n_" + base
        count = used.get(base, 0)
        used[base] = count + 1
        mapping[name] = base if count == 0 else "%s_%d" % (base, count + 1)
    return mapping


def export_mermaid(
    relations: Iterable[SpatialRelation],
    predicates: Tuple[str, ...] = (),
    labels: Optional[Mapping[str, str]] = None,
) -> str:
    """Render relations as a Mermaid graph, optionally predicate-filtered.

    An empty predicate tuple keeps every relation.  Node text shows the
    display label when one is given, falling back to the object id.
    """
    labels = labels or {}
    kept = [
        rel for rel in relations
        if not predicates or rel.predicate in predicates
    ]
    kept.sort(key=lambda rel: (rel.subject, rel.object, rel.predicate))
    names = sorted({rel.subject for rel in kept} | {rel.object for rel in kept})
    nodes = _node_ids(names)
    lines = ["graph LR"]
    for name in names:
        text = str(labels.get(name, name)).replace('"', "'")
        lines.append('  %s["%s"]' % (nodes[name], text))
    for rel in kept:
        lines.append(
            "  %s -->|%s %.3f| %s"
            % (nodes[rel.subject], rel.predicate, rel.delta, nodes[rel.object])
        )
    return "\n".join(lines) + "\n"


def export_scene(objects: Sequence[SpatialObject]) -> str:
    """Render boxes as Wavefront OBJ text: 8 vertices and 6 quads each."""
    lines: List[str] = ["# boxes: %d" % len(objects)]
    offset = 0
    for obj in objects:
        lines.append("o %s" % _NODE_RE.sub("_", obj.id))
        for x, y, z in corners(obj):
            lines.append("v %.6f %.6f %.6f" % (x, y, z))
        for face in _BOX_FACES:
            lines.append("f " + " ".join(str(offset + i) for i in face))
        offset += 8
    return "\n".join(lines) + "\n"
