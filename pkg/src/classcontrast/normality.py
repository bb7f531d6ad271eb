"""Attribute contributions to subgraph normality and focus-weight inference.

For a subgraph ``g`` every attribute ``a`` gets an internal term

    a_I(a) = sum over unordered member pairs {i, j} of (W_ij - k_i k_j / 2e) s_a(i, j)

and an external term

    a_X(a) = -sum over edges (i, b), i in g, b outside g, of (1 - min(1, k_i k_b / 2e)) s_a(i, b)

where ``s_a`` is a per-attribute similarity kernel. Normality under weights
``w`` is ``w . (a_I + a_X)``, so the signed vector ``x_hat = a_I + a_X``
(rescaled into [-1, 1]) summarizes the subgraph, and its positive part ``x``
is what the attribute partitioning consumes.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ._io import fmt, meta_lines, read_csv
from .community import Subgraph, boundary
from .graph import AttributedGraph

__all__ = [
    "KERNELS",
    "ContributionVector",
    "FocusWeights",
    "FocusVectorTable",
    "raw_contributions",
    "compute_contributions",
    "contribution_vectors",
    "infer_weights",
    "subspace_quality",
    "read_focus_vectors",
    "write_focus_vectors",
]

KERNELS = ("product", "min")


def _pair_kernel(kernel: str, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    if kernel == "product":
        return left * right
    if kernel == "min":
        return np.minimum(left, right)
    raise ValueError(f"unknown kernel {kernel!r}; choose from {KERNELS}")


@dataclass(frozen=True)
class ContributionVector:
    """Signed and clamped per-attribute contributions of one subgraph."""

    x_hat: np.ndarray
    name: str = ""
    class_id: int = 0
    internal: np.ndarray | None = field(default=None, repr=False)
    external: np.ndarray | None = field(default=None, repr=False)

    @property
    def x(self) -> np.ndarray:
        return np.maximum(self.x_hat, 0.0)

    @property
    def low_quality(self) -> bool:
        return bool(self.x_hat.max() <= 0.0)

    @property
    def d(self) -> int:
        return self.x_hat.shape[0]


@dataclass(frozen=True)
class FocusWeights:
    w: np.ndarray
    norm_kind: str
    normality: float
    low_quality: bool = False

    @property
    def focus(self) -> np.ndarray:
        """Indices of the focus attributes, heaviest first."""
        idx = np.flatnonzero(self.w > 0)
        return idx[np.argsort(-self.w[idx], kind="stable")]


def raw_contributions(graph: AttributedGraph, sub: Subgraph | Sequence[int], kernel: str = "product"):
    """Unscaled ``(a_I, a_X)`` for one subgraph."""
    if kernel not in KERNELS:
        raise ValueError(f"unknown kernel {kernel!r}; choose from {KERNELS}")
    members = np.asarray(sub.members if isinstance(sub, Subgraph) else sorted(set(sub)), dtype=int)
    if members.size == 0:
        raise ValueError("empty subgraph")
    if members.max() >= graph.node_count or members.min() < 0:
        raise ValueError("subgraph node index out of range")
    two_e = 2.0 * graph.total_edge_weight
    deg = graph.degrees
    attrs = graph.attributes
    d = graph.attribute_count

    A = attrs[members]
    k = deg[members]
    W = graph.adjacency[members][:, members].toarray()
    null = np.outer(k, k) / two_e if two_e > 0 else np.zeros_like(W)
    M = W - null
    np.fill_diagonal(M, 0.0)
    if kernel == "product":
        # ordered-pair double sum, halved to unordered pairs
        internal = 0.5 * np.einsum("ia,ij,ja->a", A, M, A)
    else:
        internal = np.zeros(d)
        iu, ju = np.triu_indices(members.size, k=1)
        coef = M[iu, ju]
        nz = coef != 0
        iu, ju, coef = iu[nz], ju[nz], coef[nz]
        if coef.size:
            internal = coef @ np.minimum(A[iu], A[ju])

    inside = set(members.tolist())
    ii, bb = [], []
    for i in members:
        for b in graph.neighbors(i):
            if b not in inside:
                ii.append(i)
                bb.append(b)
    external = np.zeros(d)
    if ii:
        ii = np.asarray(ii)
        bb = np.asarray(bb)
        surprise = deg[ii] * deg[bb] / two_e
        factor = 1.0 - np.minimum(1.0, surprise)
        external = -(factor @ _pair_kernel(kernel, attrs[ii], attrs[bb]))
    return np.asarray(internal, dtype=float), np.asarray(external, dtype=float)


def compute_contributions(
    graph: AttributedGraph,
    sub: Subgraph,
    kernel: str = "product",
    scale: float = 1.0,
) -> ContributionVector:
    """Contribution vector of ``sub`` with ``x_hat = (a_I + a_X) / scale``."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    internal, external = raw_contributions(graph, sub, kernel)
    return ContributionVector(
        x_hat=(internal + external) / scale,
        name=sub.name or "",
        class_id=sub.class_id,
        internal=internal,
        external=external,
    )


def contribution_vectors(
    graph: AttributedGraph,
    subgraphs: Sequence[Subgraph],
    kernel: str = "product",
    threads: int = 1,
) -> tuple[list[ContributionVector], float]:
    """Contribution vectors for a whole run, sharing one global scale.

    The scale is the largest ``|a_I + a_X|`` entry over all subgraphs and
    attributes when that exceeds 1, else 1, so every ``x_hat`` lands in
    [-1, 1] without changing any argmax or ratio. Returns ``(vectors, scale)``.
    """
    for sub in subgraphs:
        sub.validate(graph)

    def one(sub):
        return raw_contributions(graph, sub, kernel)

    if threads > 1 and len(subgraphs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            raw = list(pool.map(one, subgraphs))
    else:
        raw = [one(s) for s in subgraphs]
    peak = max((float(np.abs(i + x).max()) for i, x in raw), default=0.0)
    scale = peak if peak > 1.0 else 1.0
    out = [
        ContributionVector((i + x) / scale, s.name or f"g{t}", s.class_id, i, x)
        for t, (s, (i, x)) in enumerate(zip(subgraphs, raw))
    ]
    return out, scale


def infer_weights(cv: ContributionVector | np.ndarray, norm_kind: str = "L2") -> FocusWeights:
    """Normality-maximizing non-negative weights under a unit L1 or L2 norm.

    L1 puts all weight on the largest ``x_hat`` entry (lowest index on ties),
    even when every entry is negative. L2 weights the positive entries in
    proportion to their size; with no positive entry it falls back to the L1
    answer. Either way a subgraph without positive entries is low quality.
    """
    x_hat = np.asarray(cv.x_hat if isinstance(cv, ContributionVector) else cv, dtype=float)
    if x_hat.ndim != 1 or x_hat.size == 0:
        raise ValueError("need a non-empty 1-d contribution vector")
    kind = norm_kind.upper()
    if kind not in ("L1", "L2"):
        raise ValueError(f"norm_kind must be 'L1' or 'L2', got {norm_kind!r}")
    low = bool(x_hat.max() <= 0.0)
    if kind == "L2" and not low:
        pos = np.where(x_hat > 0, x_hat, 0.0)
        norm = float(np.sqrt(np.sum(pos**2)))
        return FocusWeights(pos / norm, "L2", norm, False)
    best = int(np.argmax(x_hat))
    w = np.zeros_like(x_hat)
    w[best] = 1.0
    return FocusWeights(w, kind, float(x_hat[best]), low)


def subspace_quality(x, subset) -> float:
    """2-norm of ``x`` restricted to the attribute indices in ``subset``."""
    idx = np.fromiter(subset, dtype=int) if not isinstance(subset, np.ndarray) else subset.astype(int)
    if idx.size == 0:
        return 0.0
    x = np.asarray(x, dtype=float)
    return float(np.sqrt(np.sum(x[idx] ** 2)))


@dataclass
class FocusVectorTable:
    """Rows of ``x`` (and ``x_hat``) vectors with subgraph ids and class labels."""

    ids: list[str]
    class_ids: np.ndarray
    x_hat: np.ndarray
    attribute_names: list[str]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.class_ids = np.asarray(self.class_ids, dtype=int)
        self.x_hat = np.atleast_2d(np.asarray(self.x_hat, dtype=float))
        n, d = self.x_hat.shape
        if len(self.ids) != n or self.class_ids.shape != (n,):
            raise ValueError("ids, class ids and vectors disagree in length")
        if len(self.attribute_names) != d:
            raise ValueError("attribute names do not match vector width")
        if len(set(self.attribute_names)) != d:
            raise ValueError("attribute names must be unique")

    @property
    def x(self) -> np.ndarray:
        return np.maximum(self.x_hat, 0.0)

    @property
    def low_quality(self) -> np.ndarray:
        return self.x_hat.max(axis=1) <= 0.0

    @classmethod
    def from_vectors(cls, vectors: Sequence[ContributionVector], attribute_names, meta=None):
        return cls(
            [v.name for v in vectors],
            [v.class_id for v in vectors],
            np.vstack([v.x_hat for v in vectors]),
            list(attribute_names),
            dict(meta or {}),
        )


def xhat_path(path) -> Path:
    """Sibling file holding the signed vectors: ``foo.csv`` -> ``foo.xhat.csv``."""
    path = Path(path)
    return path.with_name(path.stem + ".xhat" + (path.suffix or ".csv"))


def write_focus_vectors(path, table: FocusVectorTable, meta: dict | None = None) -> None:
    """Write the clamped vectors to ``path`` and the signed ones to its sibling."""
    meta = {**table.meta, **(meta or {})}
    header = ["subgraph_id", "class_id", "low_quality", *table.attribute_names]
    low = table.low_quality
    for target, values in ((Path(path), table.x), (xhat_path(path), table.x_hat)):
        lines = [f"# {m}" for m in meta_lines(meta)]
        lines.append(",".join(_csv_field(h) for h in header))
        for sid, cid, lq, row in zip(table.ids, table.class_ids, low, values):
            lines.append(",".join([_csv_field(sid), str(int(cid)), fmt(bool(lq)), *map(fmt, row)]))
        target.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _csv_field(s: str) -> str:
    s = str(s)
    if any(ch in s for ch in ',"\n'):
        return '"' + s.replace('"', '""') + '"'
    return s


def read_focus_vectors(path) -> FocusVectorTable:
    """Read a focus-vector CSV, pairing it with its ``x_hat`` sibling when present."""
    path = Path(path)
    header, rows, meta = read_csv(path)
    if header[:3] != ["subgraph_id", "class_id", "low_quality"] or len(header) < 4:
        raise ValueError(f"{path}: expected header subgraph_id,class_id,low_quality,<attributes>")
    names = header[3:]

    def parse(rows, where):
        ids, cids, vals = [], [], []
        for k, row in enumerate(rows, start=1):
            if len(row) != len(header):
                raise ValueError(f"{where}: data row {k} has {len(row)} fields, expected {len(header)}")
            try:
                cids.append(int(row[1]))
                vals.append([float(v) for v in row[3:]])
            except ValueError as exc:
                raise ValueError(f"{where}: data row {k}: {exc}") from None
            ids.append(row[0])
        if not ids:
            raise ValueError(f"{where}: no data rows")
        return ids, np.asarray(cids), np.asarray(vals)

    ids, cids, x = parse(rows, path)
    if np.any(x < 0):
        raise ValueError(f"{path}: clamped vectors must be non-negative")
    signed = xhat_path(path)
    x_hat = x
    if signed.exists():
        h2, rows2, _ = read_csv(signed)
        if h2 != header:
            raise ValueError(f"{signed}: header does not match {path}")
        ids2, cids2, x_hat = parse(rows2, signed)
        if ids2 != ids or not np.array_equal(cids2, cids):
            raise ValueError(f"{signed}: rows do not match {path}")
    return FocusVectorTable(ids, cids, x_hat, names, meta)
