"""Pajek NET and CLU file formats.

NET layout written here (and accepted back):

    *Vertices N
    1 "LABEL"
    ...
    *Edges
    i j w

Vertices are numbered 1..N in sorted label order, edge lines satisfy i < j
and are sorted, so export -> import -> export is byte-identical. A CLU file
carries one integer per vertex line, positionally aligned with the NET
vertex order; id 0 marks an unassigned vertex.
"""

from __future__ import annotations

from .graph import CoauthorNetwork


class PajekFormatError(ValueError):
    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def export_net(net: CoauthorNetwork) -> str:
    labels = net.nodes()
    index = {label: i + 1 for i, label in enumerate(labels)}
    lines = [f"*Vertices {len(labels)}"]
    lines.extend(f'{i + 1} "{label}"' for i, label in enumerate(labels))
    lines.append("*Edges")
    edge_rows = sorted((index[a], index[b], w) for a, b, w in net.edges())
    lines.extend(f"{i} {j} {w}" for i, j, w in edge_rows)
    return "\n".join(lines) + "\n"


def import_net(text: str) -> CoauthorNetwork:
    """Parse NET text; paper counts and provenance are not part of the format."""
    net = CoauthorNetwork()
    labels: dict[int, str] = {}
    expected = None
    section = None
    seen_edges: set[tuple[int, int]] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("*"):
            head = line.split()[0].lower()
            if head == "*vertices":
                parts = line.split()
                if len(parts) < 2 or not parts[1].isdigit():
                    raise PajekFormatError(line_no, "malformed *Vertices header")
                expected = int(parts[1])
                section = "vertices"
            elif head in ("*edges", "*arcs"):
                section = "edges"
            else:
                raise PajekFormatError(line_no, f"unknown section header {line.split()[0]!r}")
            continue
        if section == "vertices":
            idx_str, _, rest = line.partition(" ")
            try:
                idx = int(idx_str)
            except ValueError:
                raise PajekFormatError(line_no, "vertex line must start with an integer index")
            if expected is None or not 1 <= idx <= expected:
                raise PajekFormatError(line_no, f"vertex index {idx} out of range")
            label = rest.strip()
            if label.startswith('"') and label.endswith('"') and len(label) >= 2:
                label = label[1:-1]
            if idx in labels:
                raise PajekFormatError(line_no, f"duplicate vertex index {idx}")
            labels[idx] = label
            net.add_node(label)
        elif section == "edges":
            parts = line.split()
            if len(parts) < 2:
                raise PajekFormatError(line_no, "edge line needs two endpoints")
            try:
                i, j = int(parts[0]), int(parts[1])
                w = int(parts[2]) if len(parts) > 2 else 1
            except ValueError:
                raise PajekFormatError(line_no, "edge endpoints and weight must be integers")
            if i not in labels or j not in labels:
                raise PajekFormatError(line_no, f"edge references unknown vertex index")
            if i == j:
                raise PajekFormatError(line_no, "self-loop not allowed")
            pair = (min(i, j), max(i, j))
            if pair in seen_edges:
                raise PajekFormatError(line_no, f"duplicate edge {pair[0]} {pair[1]}")
            seen_edges.add(pair)
            net.add_edge(labels[i], labels[j], w)
        else:
            raise PajekFormatError(line_no, "content before any section header")
    if expected is not None and len(labels) != expected:
        raise PajekFormatError(len(text.splitlines()), f"expected {expected} vertices, found {len(labels)}")
    return net


def export_clu(net: CoauthorNetwork, assignment: dict[str, int]) -> str:
    """CLU text for ``net``'s vertex order; unassigned vertices get 0."""
    lines = [f"*Vertices {net.node_count}"]
    lines.extend(str(assignment.get(label, 0)) for label in net.nodes())
    return "\n".join(lines) + "\n"


def import_clu(text: str, net: CoauthorNetwork) -> dict[str, int]:
    """Positional cluster ids for ``net``'s vertex order; 0 entries are dropped.

    Raises PajekFormatError when the CLU vertex count does not match the
    network.
    """
    values: list[int] = []
    header_count = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("*"):
            parts = line.split()
            if parts[0].lower() != "*vertices" or len(parts) < 2 or not parts[1].isdigit():
                raise PajekFormatError(line_no, f"unknown section header {parts[0]!r}")
            header_count = int(parts[1])
            continue
        try:
            values.append(int(line.split()[0]))
        except ValueError:
            raise PajekFormatError(line_no, "cluster id must be an integer")
    if header_count is not None and header_count != len(values):
        raise PajekFormatError(len(text.splitlines()), f"header says {header_count} vertices, found {len(values)}")
    labels = net.nodes()
    if len(values) != len(labels):
        raise PajekFormatError(
            len(text.splitlines()),
            f"CLU carries {len(values)} entries for a {len(labels)}-vertex network",
        )
    return {label: cid for label, cid in zip(labels, values) if cid != 0}
