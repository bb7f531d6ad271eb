"""Local subgraphs around seed nodes: ego-networks and PageRank sweep communities.

Also holds the class-file reader/writer, since class files describe either the
seeds these extractors start from or the explicit subgraphs they produce.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .graph import AttributedGraph, ClassLabeledNodeSet, GraphFormatError, _data_lines

__all__ = [
    "Origin",
    "Subgraph",
    "ego_net",
    "ppr_community",
    "approximate_ppr",
    "sweep_cut",
    "conductance",
    "boundary",
    "read_class_file",
    "write_subgraphs",
]

DEFAULT_ALPHA = 0.15
DEFAULT_EPSILON = 1e-5
DEFAULT_MAX_SIZE = 100


class Origin(str, Enum):
    EXPLICIT = "explicit"
    EGO = "ego"
    PPR = "ppr"


@dataclass(frozen=True)
class Subgraph:
    """A class-labeled node subset of an :class:`AttributedGraph`."""

    members: tuple[int, ...]
    class_id: int
    origin: Origin = Origin.EXPLICIT
    seed: int | None = None
    name: str | None = None

    def __post_init__(self):
        members = tuple(sorted(int(m) for m in self.members))
        if not members:
            raise ValueError("subgraph has no members")
        if len(set(members)) != len(members):
            raise ValueError("subgraph members must be unique")
        if members[0] < 0:
            raise ValueError("negative node index in subgraph")
        if self.class_id < 0:
            raise ValueError(f"class id must be non-negative, got {self.class_id}")
        origin = Origin(self.origin)
        if origin is not Origin.EXPLICIT and self.seed not in members:
            raise ValueError("seed must be a member of an extracted subgraph")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "origin", origin)

    def __len__(self):
        return len(self.members)

    def validate(self, graph: AttributedGraph) -> None:
        if self.members[-1] >= graph.node_count:
            raise ValueError(f"subgraph {self.name!r} has node index out of range")


def ego_net(graph: AttributedGraph, seed: int, class_id: int = 0) -> Subgraph:
    """The seed together with all its immediate neighbors."""
    _check_node(graph, seed)
    members = {int(seed), *map(int, graph.neighbors(seed))}
    return Subgraph(tuple(members), class_id, Origin.EGO, int(seed), graph.node_names[seed])


def boundary(graph: AttributedGraph, sub: Subgraph | Sequence[int]) -> list[int]:
    """Nodes outside ``sub`` with at least one edge into it, sorted."""
    members = set(sub.members if isinstance(sub, Subgraph) else map(int, sub))
    out = set()
    for i in members:
        out.update(int(j) for j in graph.neighbors(i) if j not in members)
    return sorted(out)


def conductance(graph: AttributedGraph, nodes) -> float:
    """Cut weight over the smaller side's volume.

    A set with no outgoing edges has conductance 0, unless the other side
    has no volume at all (the set covers every edge); that trivial cut is
    undefined and reported as ``inf``.
    """
    members = set(map(int, nodes))
    vol = float(graph.degrees[list(members)].sum())
    cut = 0.0
    for i in members:
        for j, w in zip(graph.neighbors(i), graph.neighbor_weights(i)):
            if j not in members:
                cut += w
    return _phi(cut, vol, 2.0 * graph.total_edge_weight)


def _phi(cut, vol, total):
    denom = min(vol, total - vol)
    if denom <= 1e-12 * max(total, 1.0):
        return np.inf
    if cut <= 1e-12 * max(total, 1.0):
        return 0.0
    return cut / denom


def approximate_ppr(
    graph: AttributedGraph,
    seed: int,
    alpha: float = DEFAULT_ALPHA,
    epsilon: float = DEFAULT_EPSILON,
    on_push: Callable[[dict, dict], None] | None = None,
) -> tuple[dict[int, float], dict[int, float]]:
    """Push-based approximate personalized PageRank (lazy random walk).

    Returns sparse ``(p, r)`` dictionaries. On return every residual satisfies
    ``r[u] < epsilon * degree[u]``. ``on_push`` is called after every push with
    the current vectors, which is how mass conservation is checked in tests.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    _check_node(graph, seed)
    deg = graph.degrees
    p: dict[int, float] = {}
    r: dict[int, float] = {int(seed): 1.0}
    if deg[seed] == 0:
        p[int(seed)] = 1.0
        r.clear()
        return p, r

    # process queue in FIFO order; a node is (re)queued when it crosses the threshold
    queue = [int(seed)]
    queued = {int(seed)}
    head = 0
    while head < len(queue):
        u = queue[head]
        head += 1
        queued.discard(u)
        ru = r.get(u, 0.0)
        if ru < epsilon * deg[u]:
            continue
        p[u] = p.get(u, 0.0) + alpha * ru
        r[u] = (1.0 - alpha) * ru / 2.0
        spread = (1.0 - alpha) * ru / (2.0 * deg[u])
        for v, w in zip(graph.neighbors(u), graph.neighbor_weights(u)):
            v = int(v)
            r[v] = r.get(v, 0.0) + spread * w
            if v not in queued and r[v] >= epsilon * deg[v]:
                queue.append(v)
                queued.add(v)
        if u not in queued and r[u] >= epsilon * deg[u]:
            queue.append(u)
            queued.add(u)
        if on_push is not None:
            on_push(p, r)
    return p, r


def sweep_cut(graph: AttributedGraph, scores: dict[int, float], seed: int, max_size: int):
    """Best-conductance prefix of nodes ordered by ``score / degree``.

    Only prefixes that contain ``seed`` and have at most ``max_size`` nodes are
    eligible; ties go to the shorter prefix. Returns ``(nodes, conductance)``.
    """
    deg = graph.degrees
    ranked = sorted(
        (u for u, s in scores.items() if s > 0 and deg[u] > 0),
        key=lambda u: (-scores[u] / deg[u], u),
    )
    total = 2.0 * graph.total_edge_weight
    members: set[int] = set()
    vol = cut = 0.0
    best, best_phi, seen_seed = None, np.inf, False
    for t, u in enumerate(ranked[:max_size], start=1):
        for v, w in zip(graph.neighbors(u), graph.neighbor_weights(u)):
            cut += -w if int(v) in members else w
        members.add(u)
        vol += deg[u]
        seen_seed = seen_seed or u == seed
        if not seen_seed:
            continue
        phi = _phi(cut, vol, total)
        if phi < best_phi:
            best, best_phi = t, phi
    if best is None:
        return [int(seed)], conductance(graph, [seed])
    return sorted(ranked[:best]), float(best_phi)


def ppr_community(
    graph: AttributedGraph,
    seed: int,
    alpha: float = DEFAULT_ALPHA,
    epsilon: float = DEFAULT_EPSILON,
    max_size: int = DEFAULT_MAX_SIZE,
    class_id: int = 0,
) -> Subgraph:
    """Local community around ``seed`` from a PageRank push plus conductance sweep."""
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    _check_node(graph, seed)
    name = graph.node_names[seed]
    if graph.degrees[seed] == 0:
        return Subgraph((int(seed),), class_id, Origin.PPR, int(seed), name)
    p, _ = approximate_ppr(graph, seed, alpha, epsilon)
    nodes, _ = sweep_cut(graph, p, int(seed), max_size)
    return Subgraph(tuple(nodes), class_id, Origin.PPR, int(seed), name)


def _check_node(graph, i):
    if not 0 <= int(i) < graph.node_count:
        raise IndexError(f"node index {i} out of range for {graph.node_count} nodes")


def read_class_file(path, graph: AttributedGraph):
    """Read a class file.

    Two layouts are accepted and must not be mixed: ``node<TAB>class_id``
    (seed nodes) and ``subgraph_id<TAB>class_id<TAB>n1,n2,...`` (explicit
    members). Returns ``("seeds", [(node_index, ClassLabeledNodeSet)...])`` or
    ``("members", [Subgraph, ...])``.
    """
    path = Path(path)
    kind = None
    out = []
    labels = set()
    for lineno, line in _data_lines(path):
        parts = [p.strip() for p in line.split("\t")]
        if len(parts) not in (2, 3):
            raise GraphFormatError("expected 2 or 3 tab-separated fields", path, lineno)
        this = "seeds" if len(parts) == 2 else "members"
        if kind is None:
            kind = this
        elif kind != this:
            raise GraphFormatError("mixed seed and member rows", path, lineno)
        try:
            cid = int(parts[1])
        except ValueError:
            raise GraphFormatError(f"bad class id {parts[1]!r}", path, lineno) from None
        if cid < 0:
            raise GraphFormatError(f"class id must be non-negative, got {cid}", path, lineno)
        labels.add(cid)
        try:
            if this == "seeds":
                i = graph.node_index(parts[0])
                out.append((i, ClassLabeledNodeSet(cid, (i,))))
            else:
                names = [m.strip() for m in parts[2].split(",") if m.strip()]
                members = tuple(graph.node_index(m) for m in names)
                out.append(Subgraph(members, cid, Origin.EXPLICIT, None, parts[0]))
        except (KeyError, ValueError) as exc:
            raise GraphFormatError(str(exc).strip("'\""), path, lineno) from None
    if kind is None:
        raise GraphFormatError("class file is empty", path)
    if len(labels) < 2:
        raise GraphFormatError("need at least two classes", path)
    return kind, out


def write_subgraphs(path, graph: AttributedGraph, subgraphs: Sequence[Subgraph], header: Sequence[str] = ()):
    """Write subgraphs as explicit-member class-file rows."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        for k, sub in enumerate(subgraphs):
            name = sub.name if sub.name is not None else f"g{k}"
            members = ",".join(graph.node_names[i] for i in sub.members)
            fh.write(f"{name}\t{sub.class_id}\t{members}\n")
