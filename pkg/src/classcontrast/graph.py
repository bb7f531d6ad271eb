"""Attributed graph model and file ingestion.

Edge files are tab-separated ``src<TAB>dst[<TAB>weight]`` lines; a line with a
single token declares an isolated node. Attribute files are either sparse
``.tsv`` triples ``node<TAB>attribute<TAB>value`` or a dense ``.csv`` table
with a header row of attribute names and the node id in the first column.
Node ids are arbitrary strings and are re-indexed densely in order of first
appearance in the edge file.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

__all__ = [
    "AttributedGraph",
    "ClassLabeledNodeSet",
    "GraphFormatError",
    "load_graph",
    "write_graph",
    "one_hot_encode",
]


class GraphFormatError(ValueError):
    """Malformed or inconsistent graph input, with file and line context."""

    def __init__(self, message: str, path: str | Path | None = None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.path = path
        self.line = line


@dataclass(frozen=True, eq=False)
class AttributedGraph:
    """Undirected, weighted graph with a real-valued attribute vector per node.

    Instances are read-only after construction: the adjacency and attribute
    arrays are flagged non-writeable so they can be shared between workers.
    """

    adjacency: sparse.csr_matrix
    attributes: np.ndarray
    attribute_names: tuple[str, ...]
    node_names: tuple[str, ...]
    degrees: np.ndarray = field(init=False)
    total_edge_weight: float = field(init=False)

    def __post_init__(self):
        adj = sparse.csr_matrix(self.adjacency, dtype=float)
        adj.sum_duplicates()
        adj.eliminate_zeros()
        n = adj.shape[0]
        if adj.shape != (n, n):
            raise GraphFormatError(f"adjacency must be square, got {adj.shape}")
        if adj.diagonal().any():
            raise GraphFormatError("self-loops are not allowed")
        if (adj != adj.T).nnz:
            raise GraphFormatError("adjacency must be symmetric")
        if adj.nnz and adj.data.min() < 0:
            raise GraphFormatError("edge weights must be non-negative")

        attrs = np.array(self.attributes, dtype=float, copy=True)
        if attrs.ndim != 2 or attrs.shape[0] != n:
            raise GraphFormatError(f"attribute matrix must have shape ({n}, d), got {attrs.shape}")
        names = tuple(str(a) for a in self.attribute_names)
        if len(names) < 1 or len(names) != attrs.shape[1]:
            raise GraphFormatError("need d >= 1 attribute names matching the attribute matrix")
        if len(set(names)) != len(names):
            raise GraphFormatError("attribute names must be unique")
        node_names = tuple(str(v) for v in self.node_names)
        if len(node_names) != n or len(set(node_names)) != n:
            raise GraphFormatError("node names must be unique, one per node")

        degrees = np.asarray(adj.sum(axis=1)).ravel()
        for arr in (adj.data, adj.indices, adj.indptr, attrs, degrees):
            arr.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "attributes", attrs)
        object.__setattr__(self, "attribute_names", names)
        object.__setattr__(self, "node_names", node_names)
        object.__setattr__(self, "degrees", degrees)
        # each undirected edge is stored twice
        object.__setattr__(self, "total_edge_weight", float(adj.data.sum()) / 2.0)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[Sequence],
        attributes,
        attribute_names: Sequence[str] | None = None,
        node_names: Sequence[str] | None = None,
    ) -> "AttributedGraph":
        """Build a graph from ``(i, j)`` or ``(i, j, w)`` index tuples."""
        rows, cols, vals = [], [], []
        seen = set()
        for e in edges:
            i, j = int(e[0]), int(e[1])
            w = float(e[2]) if len(e) > 2 else 1.0
            if i == j:
                raise GraphFormatError(f"self-loop on node {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise GraphFormatError(f"edge ({i}, {j}) out of range for {n} nodes")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise GraphFormatError(f"duplicate edge ({i}, {j})")
            seen.add(key)
            rows += [i, j]
            cols += [j, i]
            vals += [w, w]
        adj = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
        attributes = np.asarray(attributes, dtype=float)
        if attributes.ndim == 1:
            attributes = attributes[:, None]
        if attribute_names is None:
            attribute_names = [f"a{k}" for k in range(attributes.shape[1])]
        if node_names is None:
            node_names = [str(i) for i in range(n)]
        return cls(adj, attributes, tuple(attribute_names), tuple(node_names))

    @property
    def node_count(self) -> int:
        return self.adjacency.shape[0]

    @property
    def attribute_count(self) -> int:
        return self.attributes.shape[1]

    def edges(self) -> list[tuple[int, int, float]]:
        """Undirected edges as ``(i, j, w)`` with ``i < j``."""
        upper = sparse.triu(self.adjacency, k=1).tocoo()
        order = np.lexsort((upper.col, upper.row))
        return [(int(upper.row[t]), int(upper.col[t]), float(upper.data[t])) for t in order]

    def neighbors(self, i: int) -> np.ndarray:
        adj = self.adjacency
        return adj.indices[adj.indptr[i]:adj.indptr[i + 1]]

    def neighbor_weights(self, i: int) -> np.ndarray:
        adj = self.adjacency
        return adj.data[adj.indptr[i]:adj.indptr[i + 1]]

    def node_index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown node id {name!r}") from None

    @property
    def _index(self) -> dict[str, int]:
        idx = self.__dict__.get("_index_cache")
        if idx is None:
            idx = {v: i for i, v in enumerate(self.node_names)}
            object.__setattr__(self, "_index_cache", idx)
        return idx


@dataclass(frozen=True)
class ClassLabeledNodeSet:
    """Seed nodes (or explicit members) carrying one class label."""

    class_id: int
    nodes: tuple[int, ...]

    def __post_init__(self):
        if self.class_id < 0:
            raise ValueError(f"class id must be non-negative, got {self.class_id}")
        if not self.nodes:
            raise ValueError("node set is empty")


def _data_lines(path: Path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            yield lineno, line


def _read_edges(path: Path):
    names: dict[str, int] = {}
    edges = []
    seen: dict[tuple[int, int], int] = {}

    def node(name):
        if name not in names:
            names[name] = len(names)
        return names[name]

    for lineno, line in _data_lines(path):
        parts = [p.strip() for p in line.split("\t")]
        if len(parts) == 1:
            node(parts[0])
            continue
        if len(parts) not in (2, 3) or not parts[0] or not parts[1]:
            raise GraphFormatError("expected src<TAB>dst[<TAB>weight]", path, lineno)
        u, v = parts[0], parts[1]
        if u == v:
            raise GraphFormatError(f"self-loop on node {u!r}", path, lineno)
        w = 1.0
        if len(parts) == 3 and parts[2] != "":
            try:
                w = float(parts[2])
            except ValueError:
                raise GraphFormatError(f"bad edge weight {parts[2]!r}", path, lineno) from None
            if not math.isfinite(w) or w < 0:
                raise GraphFormatError(f"edge weight must be finite and >= 0, got {w}", path, lineno)
        i, j = node(u), node(v)
        key = (min(i, j), max(i, j))
        if key in seen:
            raise GraphFormatError(
                f"duplicate edge {u!r}-{v!r} (first seen on line {seen[key]})", path, lineno
            )
        seen[key] = lineno
        edges.append((i, j, w))
    return names, edges


def _parse_value(text: str, path, lineno) -> float:
    if text == "":
        return 0.0
    try:
        v = float(text)
    except ValueError:
        raise GraphFormatError(f"bad attribute value {text!r}", path, lineno) from None
    if not math.isfinite(v):
        raise GraphFormatError(f"attribute value must be finite, got {text!r}", path, lineno)
    return v


def _read_sparse_attributes(path: Path, names: dict[str, int]):
    attr_names: dict[str, int] = {}
    entries = []
    for lineno, line in _data_lines(path):
        parts = line.split("\t")
        if len(parts) != 3:
            raise GraphFormatError("expected node<TAB>attribute<TAB>value", path, lineno)
        node, attr, value = (p.strip() for p in parts)
        if node not in names:
            raise GraphFormatError(f"attribute row for unknown node {node!r}", path, lineno)
        if not attr:
            raise GraphFormatError("empty attribute name", path, lineno)
        col = attr_names.setdefault(attr, len(attr_names))
        entries.append((names[node], col, _parse_value(value, path, lineno)))
    mat = np.zeros((len(names), len(attr_names)))
    for i, k, v in entries:
        mat[i, k] = v
    return mat, list(attr_names)


def _read_dense_attributes(path: Path, names: dict[str, int]):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = [
            (lineno, row)
            for lineno, row in enumerate(csv.reader(fh), start=1)
            if row and not row[0].lstrip().startswith("#")
        ]
    if not rows:
        raise GraphFormatError("missing header row", path)
    header_line, header = rows[0]
    columns = [h.strip() for h in header[1:]]
    if not columns:
        raise GraphFormatError("header has no attribute columns", path, header_line)
    if len(set(columns)) != len(columns):
        raise GraphFormatError("duplicate attribute names in header", path, header_line)

    raw = [[""] * len(columns) for _ in range(len(names))]
    for lineno, row in rows[1:]:
        if len(row) > len(columns) + 1:
            raise GraphFormatError(
                f"expected at most {len(columns) + 1} fields, got {len(row)}", path, lineno
            )
        node = row[0].strip()
        if node not in names:
            raise GraphFormatError(f"attribute row for unknown node {node!r}", path, lineno)
        vals = [v.strip() for v in row[1:]] + [""] * (len(columns) + 1 - len(row))
        raw[names[node]] = vals

    # numeric columns stay real-valued; anything else is one-hot encoded
    out_cols, out_names = [], []
    for k, name in enumerate(columns):
        col = [r[k] for r in raw]
        try:
            values = [float(v) if v else 0.0 for v in col]
        except ValueError:
            labels, block = one_hot_encode(col)
            out_names += [f"{name}={lab}" for lab in labels]
            out_cols.append(block)
            continue
        if not all(math.isfinite(v) for v in values):
            raise GraphFormatError(f"non-finite value in column {name!r}", path)
        out_names.append(name)
        out_cols.append(np.asarray(values)[:, None])
    return np.hstack(out_cols), out_names


def load_graph(edge_path, attr_path) -> AttributedGraph:
    """Read an edge file and an attribute file into an :class:`AttributedGraph`.

    The attribute format is chosen by extension: ``.csv`` is dense, anything
    else is read as sparse triples. Missing attribute entries are 0.0.
    """
    edge_path, attr_path = Path(edge_path), Path(attr_path)
    names, edges = _read_edges(edge_path)
    if not names:
        raise GraphFormatError("edge file declares no nodes", edge_path)
    if attr_path.suffix.lower() == ".csv":
        attrs, attr_names = _read_dense_attributes(attr_path, names)
    else:
        attrs, attr_names = _read_sparse_attributes(attr_path, names)
    if not attr_names:
        raise GraphFormatError("no attributes found", attr_path)
    return AttributedGraph.from_edges(len(names), edges, attrs, attr_names, list(names))


def write_graph(graph: AttributedGraph, edge_path, attr_path) -> None:
    """Write ``graph`` in the formats :func:`load_graph` reads.

    Values are written with ``repr`` so that reloading is lossless.
    """
    edge_path, attr_path = Path(edge_path), Path(attr_path)
    names = graph.node_names
    with open(edge_path, "w", encoding="utf-8") as fh:
        # declare every node first so reloading reproduces the index order
        for i in range(graph.node_count):
            fh.write(f"{names[i]}\n")
        for i, j, w in graph.edges():
            fh.write(f"{names[i]}\t{names[j]}\t{w!r}\n")
    attrs = graph.attributes
    if attr_path.suffix.lower() == ".csv":
        with open(attr_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["node", *graph.attribute_names])
            for i in range(graph.node_count):
                writer.writerow([names[i], *(repr(float(v)) for v in attrs[i])])
    else:
        with open(attr_path, "w", encoding="utf-8") as fh:
            # names must appear even for all-zero columns
            for k, a in enumerate(graph.attribute_names):
                rows = np.flatnonzero(attrs[:, k])
                if rows.size == 0:
                    fh.write(f"{names[0]}\t{a}\t0.0\n")
                for i in rows:
                    fh.write(f"{names[i]}\t{a}\t{float(attrs[i, k])!r}\n")


def one_hot_encode(labels: Sequence[str]) -> tuple[list[str], np.ndarray]:
    """Binary indicator columns for a categorical column.

    Returns the sorted distinct labels and an ``(len(labels), n_labels)``
    matrix. Empty labels are treated as missing and get an all-zero row.
    """
    labels = ["" if lab is None else str(lab).strip() for lab in labels]
    distinct = sorted({lab for lab in labels if lab})
    if not distinct:
        raise ValueError("need at least one non-empty label")
    col = {lab: k for k, lab in enumerate(distinct)}
    out = np.zeros((len(labels), len(distinct)))
    for i, lab in enumerate(labels):
        if lab:
            out[i, col[lab]] = 1.0
    return distinct, out
