"""SWC morphology ingestion.

The accepted format is the community-standard 7-column text: one node per
line as ``id type x y z radius parent`` (whitespace separated, ``#`` starts
a comment, parent ``-1`` marks a root).  Positions and radii are µm; the
(x, y, z) order on disk is preserved in :class:`SwcNode.position`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple


class SwcParseError(ValueError):
    """Malformed SWC input; carries the 1-based line number when known."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class SwcNode:
    id: int
    structure: int
    position: Tuple[float, float, float]  # (x, y, z) µm
    radius: float
    parent: Optional[int]  # None for roots


@dataclass(frozen=True)
class Skeleton:
    """A forest of traced nodes: every parent id resolves, no cycles."""

    nodes: Tuple[SwcNode, ...]

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def roots(self) -> List[SwcNode]:
        return [n for n in self.nodes if n.parent is None]

    @property
    def tree_count(self) -> int:
        return len(self.roots)

    def edges(self) -> List[Tuple[SwcNode, SwcNode]]:
        """(parent, child) pairs in file order."""
        by_id = {n.id: n for n in self.nodes}
        return [(by_id[n.parent], n) for n in self.nodes if n.parent is not None]

    def node_by_id(self, node_id: int) -> SwcNode:
        for n in self.nodes:
            if n.id == node_id:
                return n
        raise KeyError(node_id)


def parse_swc(text: str) -> Skeleton:
    """Parse SWC text into a validated Skeleton.

    Raises :class:`SwcParseError` with the offending line number for
    malformed lines, duplicate ids, dangling parent references, and cycles.
    """
    nodes: List[SwcNode] = []
    line_of: Dict[int, int] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        cols = body.split()
        if len(cols) != 7:
            raise SwcParseError(f"expected 7 columns, got {len(cols)}", lineno)
        try:
            nid = int(cols[0])
            structure = int(cols[1])
            x, y, z, radius = (float(c) for c in cols[2:6])
            parent = int(cols[6])
        except ValueError as exc:
            raise SwcParseError(f"bad numeric field ({exc})", lineno) from None
        if nid in line_of:
            raise SwcParseError(f"duplicate node id {nid} (first seen on line {line_of[nid]})", lineno)
        line_of[nid] = lineno
        nodes.append(
            SwcNode(
                id=nid,
                structure=structure,
                position=(x, y, z),
                radius=radius,
                parent=None if parent < 0 else parent,
            )
        )

    ids = set(line_of)
    parent_of = {}
    for node in nodes:
        if node.parent is not None:
            if node.parent not in ids:
                raise SwcParseError(
                    f"node {node.id} references missing parent {node.parent}", line_of[node.id]
                )
            if node.parent == node.id:
                raise SwcParseError(f"node {node.id} is its own parent", line_of[node.id])
            parent_of[node.id] = node.parent

    # Cycle check: walk parent chains, marking finished nodes as we go.
    done = set()
    for node in nodes:
        trail = []
        cur = node.id
        seen = set()
        while cur is not None and cur not in done:
            if cur in seen:
                raise SwcParseError(f"cycle through node {cur}", line_of[cur])
            seen.add(cur)
            trail.append(cur)
            cur = parent_of.get(cur)
        done.update(trail)

    return Skeleton(nodes=tuple(nodes))


def format_swc(skeleton: Skeleton, comment: str = "") -> str:
    """Render a Skeleton back to SWC text (used by the synthetic generator)."""
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    for n in skeleton.nodes:
        x, y, z = n.position
        parent = -1 if n.parent is None else n.parent
        lines.append(f"{n.id} {n.structure} {x:.6g} {y:.6g} {z:.6g} {n.radius:.6g} {parent}")
    return "\n".join(lines) + "\n"
