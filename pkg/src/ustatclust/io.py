"""CSV ingestion and dendrogram serialization (JSON, Newick, SVG).

All numbers are written with 17 significant digits so that every float
round-trips exactly; fixed inputs and seeds therefore produce byte-identical
output files.
"""

from __future__ import annotations

import csv
import math
from typing import Any, Sequence

import numpy as np

from .errors import DomainError, ParseError, TooSmallError, ValidationError
from .hierarchy import DendrogramNode
from .kernels import DataMatrix

FORMAT_JSON = "json"
FORMAT_NEWICK = "newick"
FORMAT_SVG = "svg"


def read_csv(
    path: str,
    labels: bool = False,
    header: bool = True,
    transpose: bool = False,
) -> DataMatrix:
    """Load a numeric CSV as a DataMatrix (rows are samples).

    With ``labels`` the first column holds sample labels; with ``header`` the
    first row is skipped (and supplies sample labels when transposing).
    ``transpose`` flips the orientation for tables stored features-by-samples.
    Row/column positions in error messages are 1-based file coordinates.
    """
    rows: list[list[str]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [row for row in csv.reader(fh)]
    rows = [row for row in rows if row]  # drop fully blank lines
    if not rows:
        raise ParseError(f"{path}: empty file")

    header_names: list[str] | None = None
    if header:
        header_names = [cell.strip() for cell in rows[0]]
        rows = rows[1:]

    width = len(rows[0]) if rows else 0
    row_labels: list[str] = []
    values: list[list[float]] = []
    for i, row in enumerate(rows):
        file_row = i + (2 if header else 1)
        if len(row) != width:
            raise ParseError(f"{path}: row {file_row} has {len(row)} cells, expected {width}")
        cells = row
        if labels:
            row_labels.append(cells[0].strip())
            cells = cells[1:]
        parsed: list[float] = []
        for j, cell in enumerate(cells):
            file_col = j + (2 if labels else 1)
            text = cell.strip()
            if not text:
                raise ParseError(f"{path}: blank cell at row {file_row}, column {file_col}")
            try:
                parsed.append(float(text))
            except ValueError:
                raise ParseError(
                    f"{path}: non-numeric value {text!r} at row {file_row}, column {file_col}"
                ) from None
        values.append(parsed)

    if len(values) < 2:
        raise TooSmallError(f"{path}: need at least 2 data rows, got {len(values)}")
    matrix = np.asarray(values, dtype=np.float64)
    if not np.isfinite(matrix).all():
        i, j = np.argwhere(~np.isfinite(matrix))[0]
        raise DomainError(f"{path}: non-finite value at data row {i + 1}, column {j + 1}")

    if transpose:
        matrix = matrix.T
        if header_names is not None:
            sample_labels = header_names[1:] if labels else header_names
            if len(sample_labels) != matrix.shape[0]:
                sample_labels = [f"s{i}" for i in range(matrix.shape[0])]
        else:
            sample_labels = [f"s{i}" for i in range(matrix.shape[0])]
        return DataMatrix(matrix, list(sample_labels))

    if labels:
        if len(set(row_labels)) != len(row_labels):
            raise ValidationError(f"{path}: duplicate sample labels")
        return DataMatrix(matrix, row_labels)
    return DataMatrix(matrix, [f"s{i}" for i in range(matrix.shape[0])])


def format_float(x: float) -> str:
    """17-significant-digit decimal form; exact float round-trip."""
    if math.isnan(x):
        return "NaN"
    return format(float(x), ".17g")


def dumps_json(obj: Any, indent: int = 0, compact: bool = False) -> str:
    """Minimal JSON writer with deterministic float formatting."""
    pad = " " * indent
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return f'"{out}"'
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, (list, tuple)):
        inner = ", ".join(dumps_json(v, indent, compact) for v in obj)
        return f"[{inner}]"
    if isinstance(obj, dict):
        if compact:
            inner = ", ".join(f'"{k}": {dumps_json(v, 0, True)}' for k, v in obj.items())
            return "{" + inner + "}"
        items = [f'{pad}  "{k}": {dumps_json(v, indent + 2)}' for k, v in obj.items()]
        joined = ",\n".join(items)
        return "{\n" + joined + "\n" + pad + "}"
    raise ValidationError(f"cannot serialize object of type {type(obj).__name__}")


def _node_to_dict(node: DendrogramNode, labels: Sequence[str] | None) -> dict[str, Any]:
    out: dict[str, Any] = {
        "members": [int(i) for i in node.members],
        "alpha_i": node.alpha_i,
        "p_value": node.p_value,
        "decision": node.decision,
        "height": node.height,
    }
    if labels is not None:
        out["member_labels"] = [labels[i] for i in node.members]
    out["children"] = [_node_to_dict(child, labels) for child in node.children]
    return out


def _node_from_dict(data: dict[str, Any]) -> DendrogramNode:
    return DendrogramNode(
        members=tuple(int(i) for i in data["members"]),
        alpha_i=float(data["alpha_i"]),
        p_value=None if data["p_value"] is None else float(data["p_value"]),
        decision=str(data["decision"]),
        children=tuple(_node_from_dict(c) for c in data.get("children", [])),
        height=float(data["height"]),
    )


def _annotation(node: DendrogramNode) -> str:
    parts = [f"decision={node.decision}", f"alpha_i={format_float(node.alpha_i)}"]
    if node.p_value is not None:
        parts.append(f"p={format_float(node.p_value)}")
    return "[&" + ",".join(parts) + "]"


def _newick(node: DendrogramNode, labels: Sequence[str]) -> str:
    if node.is_leaf:
        if len(node.members) == 1:
            body = labels[node.members[0]]
        else:
            body = "(" + ",".join(labels[i] for i in node.members) + ")"
        return body + _annotation(node)
    parts = []
    for child in node.children:
        length = node.height - child.height
        parts.append(_newick(child, labels) + f":{format_float(length)}")
    return "(" + ",".join(parts) + ")" + _annotation(node)


def _xml_escape(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _svg(root: DendrogramNode, labels: Sequence[str]) -> str:
    leaves = root.leaves()
    leaf_x = {id(leaf): 60.0 + 120.0 * i for i, leaf in enumerate(leaves)}
    max_h = max((n.height for n in _walk(root)), default=0.0) or 1.0
    width = 120.0 * len(leaves) + 60.0
    height_px = 420.0

    def ypos(h: float) -> float:
        return 40.0 + (1.0 - h / max_h) * 300.0

    shapes: list[str] = []

    def place(node: DendrogramNode) -> float:
        if node.is_leaf:
            x = leaf_x[id(node)]
            y = ypos(0.0)
            text = ",".join(labels[i] for i in node.members)
            if len(text) > 24:
                text = text[:21] + "..."
            shapes.append(
                f'<text x="{x:.1f}" y="{y + 16:.1f}" font-size="10" text-anchor="middle">'
                f"{_xml_escape(text)}</text>"
            )
            shapes.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="2.5" fill="black"/>')
            return x
        xs = [place(child) for child in node.children]
        y = ypos(node.height)
        for child, cx in zip(node.children, xs):
            cy = ypos(child.height if not child.is_leaf else 0.0)
            shapes.append(
                f'<line x1="{cx:.1f}" y1="{y:.1f}" x2="{cx:.1f}" y2="{cy:.1f}" stroke="black"/>'
            )
        shapes.append(
            f'<line x1="{xs[0]:.1f}" y1="{y:.1f}" x2="{xs[-1]:.1f}" y2="{y:.1f}" stroke="black"/>'
        )
        x = 0.5 * (xs[0] + xs[-1])
        note = f"p={node.p_value:.3g}, a={node.alpha_i:.3g}" if node.p_value is not None else ""
        if note:
            shapes.append(
                f'<text x="{x + 4:.1f}" y="{y - 4:.1f}" font-size="9" fill="#444">'
                f"{_xml_escape(note)}</text>"
            )
        return x

    place(root)
    body = "\n".join(shapes)
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" '
        f'height="{height_px:.0f}" viewBox="0 0 {width:.0f} {height_px:.0f}">\n'
        f"{body}\n</svg>\n"
    )


def _walk(node: DendrogramNode):
    yield node
    for child in node.children:
        yield from _walk(child)


def write_dendrogram(
    root: DendrogramNode,
    format: str,
    path: str,
    labels: Sequence[str] | None = None,
) -> None:
    """Serialize the dendrogram to ``path`` in the requested format.

    JSON keeps the full tree (members, p-value, adjusted level, decision and
    height per node) and round-trips through :func:`read_dendrogram`; Newick
    expands leaf clusters to their sample labels, carries branch lengths as
    parent-child height differences and annotates nodes in bracketed
    comments; SVG is a static drawing with the per-node test annotations.
    """
    if labels is None:
        labels = [str(i) for i in range(max(root.members) + 1)]
    if format == FORMAT_JSON:
        text = dumps_json(_node_to_dict(root, labels)) + "\n"
    elif format == FORMAT_NEWICK:
        text = _newick(root, labels) + ";\n"
    elif format == FORMAT_SVG:
        text = _svg(root, labels)
    else:
        raise ValidationError(f"unknown dendrogram format: {format!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def read_dendrogram(path: str) -> DendrogramNode:
    """Parse a JSON dendrogram written by :func:`write_dendrogram`."""
    import json

    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return _node_from_dict(data)
