"""Splitting attributes between classes to maximize total subgraph quality.

Each class ``c`` owns a bundle of non-negative vectors ``x_k`` and values an
attribute set ``S`` at ``w_c(S) = mean_k ||x_k[S]||_2``, a monotone submodular
function. The attributes are items, the classes are players, and we want the
partition maximizing ``sum_c w_c(S_c)``, a submodular welfare problem.

Algorithms:

* :func:`brute_force`: exhaustive enumeration, the optimality oracle.
* :func:`greedy_half`: one pass, each item to the player with the largest
  marginal gain (1/2-approximation).
* :func:`swa_continuous_greedy`: continuous greedy on the multilinear
  extension followed by independent rounding ((1 - 1/e)-approximation in
  expectation).
* :func:`simplified`: per-attribute argmax of the modular surrogate with
  weights frozen at the full-vector norms (linear time).
* :func:`topk`: lazy-greedy top-k per class with conflict resolution.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "InfeasibleError",
    "ClassBundle",
    "AttributePartition",
    "build_bundles",
    "class_value",
    "welfare",
    "simplified_objective",
    "brute_force",
    "greedy_half",
    "swa_continuous_greedy",
    "simplified",
    "topk",
    "run_algorithm",
    "ALGORITHMS",
    "DEFAULT_BRUTE_CAP",
]

DEFAULT_BRUTE_CAP = 2**20
ALGORITHMS = ("brute", "greedy", "swa", "simplified", "topk")


class InfeasibleError(RuntimeError):
    """The requested computation cannot be carried out (too large, too few items)."""


@dataclass(frozen=True, eq=False)
class ClassBundle:
    """Clamped contribution vectors of one class, one row per subgraph.

    With ``strict`` (the default) every row must have a positive entry, which
    is what remains after low-quality subgraphs are dropped.
    """

    class_id: int
    x: np.ndarray
    x_hat: np.ndarray | None = field(default=None, repr=False)
    ids: tuple = ()
    strict: bool = field(default=True, repr=False)

    def __post_init__(self):
        x = np.array(self.x, dtype=float, copy=True)
        if x.ndim == 1:
            x = x[None, :]
        if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
            raise ValueError("a class bundle needs at least one vector of length >= 1")
        if np.any(x < 0) or not np.all(np.isfinite(x)):
            raise ValueError("bundle vectors must be finite and non-negative")
        if self.strict and np.any(x.max(axis=1) <= 0):
            raise ValueError(f"class {self.class_id}: every vector needs a positive entry")
        x.setflags(write=False)
        sq = x * x
        sq.setflags(write=False)
        # attribute-major copy: per-attribute columns are contiguous rows here
        sqT = np.ascontiguousarray(sq.T)
        sqT.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "sq", sq)
        object.__setattr__(self, "sqT", sqT)
        if self.x_hat is not None:
            xh = np.array(self.x_hat, dtype=float, copy=True)
            if xh.shape != x.shape:
                raise ValueError("x_hat must have the same shape as x")
            xh.setflags(write=False)
            object.__setattr__(self, "x_hat", xh)
        ids = tuple(self.ids) if self.ids else tuple(f"c{self.class_id}_{i}" for i in range(x.shape[0]))
        if len(ids) != x.shape[0]:
            raise ValueError("one id per vector required")
        object.__setattr__(self, "ids", ids)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def d(self) -> int:
        return self.x.shape[1]

    def subset(self, rows) -> "ClassBundle":
        rows = np.asarray(rows, dtype=int)
        xh = None if self.x_hat is None else self.x_hat[rows]
        return ClassBundle(self.class_id, self.x[rows], xh, tuple(self.ids[i] for i in rows), self.strict)

    def scaled(self, factor: float) -> "ClassBundle":
        xh = None if self.x_hat is None else self.x_hat * factor
        return ClassBundle(self.class_id, self.x * factor, xh, self.ids, self.strict)


@dataclass(frozen=True, eq=False)
class AttributePartition:
    """Disjoint attribute-to-class assignment; ``-1`` marks an unassigned attribute."""

    assignment: np.ndarray
    n_classes: int
    algorithm: str
    objective_value: float
    k: int | None = None
    info: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        a = np.array(self.assignment, dtype=int, copy=True)
        if a.ndim != 1:
            raise ValueError("assignment must be 1-d")
        if np.any((a < -1) | (a >= self.n_classes)):
            raise ValueError("assignment entries must be -1 or a class id")
        a.setflags(write=False)
        object.__setattr__(self, "assignment", a)

    def attributes_of(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == c)

    @property
    def complete(self) -> bool:
        return bool(np.all(self.assignment >= 0))

    def to_dict(self, attribute_names: Sequence[str]) -> dict:
        return {
            "algorithm": self.algorithm,
            "objective_value": float(self.objective_value),
            "k": self.k,
            "n_classes": int(self.n_classes),
            "assignment": {
                name: (int(c) if c >= 0 else None) for name, c in zip(attribute_names, self.assignment)
            },
        }

    @classmethod
    def from_dict(cls, payload: dict, attribute_names: Sequence[str]) -> "AttributePartition":
        mapping = payload["assignment"]
        missing = [a for a in mapping if a not in set(attribute_names)]
        if missing:
            raise ValueError(f"partition names unknown attributes: {missing[:5]}")
        assignment = [mapping.get(a) for a in attribute_names]
        assignment = [-1 if c is None else int(c) for c in assignment]
        n_classes = int(payload.get("n_classes") or (max(assignment) + 1))
        return cls(
            np.asarray(assignment),
            n_classes,
            str(payload.get("algorithm", "imported")),
            float(payload.get("objective_value", np.nan)),
            payload.get("k"),
        )


def build_bundles(class_ids, x_hat, ids=None, strict_labels=True) -> tuple[list[ClassBundle], int]:
    """Group signed vectors by class, dropping low-quality rows.

    A row is low quality when none of its ``x_hat`` entries is positive.
    Class labels must be ``0..c-1`` and every class must keep at least one
    row. Returns ``(bundles, n_dropped)``.
    """
    class_ids = np.asarray(class_ids, dtype=int)
    x_hat = np.atleast_2d(np.asarray(x_hat, dtype=float))
    if class_ids.shape != (x_hat.shape[0],):
        raise ValueError("one class id per vector required")
    ids = list(ids) if ids is not None else [f"g{i}" for i in range(len(class_ids))]
    keep = x_hat.max(axis=1) > 0
    dropped = int((~keep).sum())
    labels = sorted(set(class_ids.tolist()))
    if strict_labels and labels != list(range(len(labels))):
        raise ValueError(f"class ids must be 0..c-1, got {labels}")
    bundles = []
    for c in labels:
        rows = np.flatnonzero((class_ids == c) & keep)
        if rows.size == 0:
            raise ValueError(f"class {c} has no subgraph left after dropping low-quality ones")
        xh = x_hat[rows]
        bundles.append(ClassBundle(c, np.maximum(xh, 0.0), xh, tuple(ids[i] for i in rows)))
    return bundles, dropped


def _check_bundles(bundles: Sequence[ClassBundle]) -> int:
    if not bundles:
        raise ValueError("need at least one class bundle")
    d = bundles[0].d
    if any(b.d != d for b in bundles):
        raise ValueError("all bundles must have the same number of attributes")
    if [b.class_id for b in bundles] != list(range(len(bundles))):
        raise ValueError("bundles must be ordered with class ids 0..c-1")
    return d


def class_value(bundle: ClassBundle, attrs) -> float:
    """Average quality ``mean_k ||x_k[attrs]||_2`` of one class."""
    attrs = np.asarray(attrs, dtype=int)
    if attrs.size == 0:
        return 0.0
    return float(np.sqrt(bundle.sq[:, attrs].sum(axis=1)).mean())


def welfare(bundles: Sequence[ClassBundle], partition) -> float:
    """Total welfare of a partition (or a raw assignment vector)."""
    d = _check_bundles(bundles)
    assignment = partition.assignment if isinstance(partition, AttributePartition) else np.asarray(partition)
    if assignment.shape != (d,):
        raise ValueError(f"assignment must have length {d}")
    return float(sum(class_value(b, np.flatnonzero(assignment == b.class_id)) for b in bundles))


def simplified_objective(bundles: Sequence[ClassBundle], partition) -> float:
    """Modular surrogate: sum_c mean_k sum_{a in S_c} x_k(a)^2 / ||x_k||_2."""
    _check_bundles(bundles)
    assignment = partition.assignment if isinstance(partition, AttributePartition) else np.asarray(partition)
    gains = _simplified_gains(bundles)
    return float(sum(gains[c, assignment == c].sum() for c in range(len(bundles))))


def _simplified_gains(bundles) -> np.ndarray:
    rows = []
    for b in bundles:
        norms = np.sqrt(b.sq.sum(axis=1))
        if np.any(norms <= 0):
            raise ValueError(f"class {b.class_id}: zero-norm vector has no pre-normalized weights")
        rows.append((b.sq / norms[:, None]).mean(axis=0))
    return np.vstack(rows)


def _subset_values(bundle: ClassBundle, d: int, chunk: int = 1 << 14) -> np.ndarray:
    """``w_c`` for every subset mask; attribute ``a`` is bit ``d - 1 - a``."""
    total = 1 << d
    shifts = np.arange(d - 1, -1, -1, dtype=np.int64)
    sqT = bundle.sq.T
    out = np.empty(total)
    for start in range(0, total, chunk):
        masks = np.arange(start, min(start + chunk, total), dtype=np.int64)
        bits = ((masks[:, None] >> shifts) & 1).astype(float)
        out[start:start + masks.size] = np.sqrt(bits @ sqT).mean(axis=1)
    return out


def brute_force(bundles: Sequence[ClassBundle], cap: int = DEFAULT_BRUTE_CAP) -> AttributePartition:
    """Exact optimum by enumerating all ``c**d`` assignments.

    Ties go to the lexicographically smallest assignment vector. Raises
    :class:`InfeasibleError` when ``c**d`` exceeds ``cap``.
    """
    d = _check_bundles(bundles)
    c = len(bundles)
    count = c**d
    if count > cap:
        raise InfeasibleError(f"brute force needs {c}^{d} = {count} evaluations, cap is {cap}")
    values = [_subset_values(b, d) for b in bundles]
    full = (1 << d) - 1
    if c == 1:
        totals = np.array([values[0][full]])
        pick = 0
    elif c == 2:
        # assignment index i, read as a d-bit word, is exactly class 1's mask
        idx = np.arange(1 << d, dtype=np.int64)
        totals = values[0][full ^ idx] + values[1][idx]
        pick = None
    else:
        pow2 = (1 << np.arange(d - 1, -1, -1, dtype=np.int64))
        places = c ** np.arange(d - 1, -1, -1, dtype=np.int64)
        totals = np.empty(count)
        step = 1 << 15
        for start in range(0, count, step):
            idx = np.arange(start, min(start + step, count), dtype=np.int64)
            digits = (idx[:, None] // places) % c
            acc = np.zeros(idx.size)
            for cls in range(c):
                masks = ((digits == cls) * pow2).sum(axis=1)
                acc += values[cls][masks]
            totals[start:start + idx.size] = acc
        pick = None
    best = float(totals.max())
    if pick is None:
        tol = 1e-12 * max(1.0, abs(best))
        pick = int(np.flatnonzero(totals >= best - tol)[0])
    places = c ** np.arange(d - 1, -1, -1, dtype=np.int64)
    assignment = (pick // places) % c
    return AttributePartition(assignment, c, "brute", welfare(bundles, assignment))


def greedy_half(bundles: Sequence[ClassBundle]) -> AttributePartition:
    """Attributes in index order, each to the class with the largest marginal gain."""
    d = _check_bundles(bundles)
    sums = [np.zeros(b.n) for b in bundles]
    current = np.zeros(len(bundles))
    assignment = np.empty(d, dtype=int)
    for a in range(d):
        cand = np.array([np.sqrt(s + b.sqT[a]).mean() for s, b in zip(sums, bundles)])
        c = int(np.argmax(cand - current))
        sums[c] = sums[c] + bundles[c].sqT[a]
        current[c] = cand[c]
        assignment[a] = c
    return AttributePartition(assignment, len(bundles), "greedy", welfare(bundles, assignment))


def _stream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


def _marginals(bundle: ClassBundle, probs: np.ndarray, samples: int, rng) -> np.ndarray:
    """Monte-Carlo estimate of ``E[w(R + a) - w(R - a)]`` for every attribute.

    ``R`` includes each attribute independently with ``probs``. One sampled
    set serves all attributes: dropping ``a`` from it gives a draw over the
    other attributes, which is all the partial derivative depends on.
    """
    sq = bundle.sq
    Z = rng.random((samples, sq.shape[1])) < probs
    s = Z.astype(float) @ sq.T  # (samples, n)
    without = s[:, :, None] - Z[:, None, :] * sq[None, :, :]
    np.maximum(without, 0.0, out=without)
    with_a = without + sq[None, :, :]
    denom = np.sqrt(with_a) + np.sqrt(without)
    # sqrt(u + v) - sqrt(u) in the cancellation-free form v / (sqrt(u + v) + sqrt(u))
    gain = np.divide(np.broadcast_to(sq, with_a.shape), denom, out=np.zeros_like(denom), where=denom > 0)
    return gain.mean(axis=(0, 1))


def swa_continuous_greedy(
    bundles: Sequence[ClassBundle],
    steps: int = 100,
    samples: int = 32,
    seed: int = 0,
    rounds: int = 8,
) -> AttributePartition:
    """Continuous greedy over the partition polytope, then independent rounding.

    The fractional solution ``y`` (attributes x classes) starts at zero. At
    each of ``steps`` steps the gradient of the multilinear extension is
    estimated from ``samples`` random sets per class, and every attribute
    moves ``1/steps`` of mass to its best class. Each attribute is then drawn
    into a class with probability ``y``; the best of ``rounds`` draws wins.

    Random streams are keyed by (step, class) and (rounding draw), so the
    result depends on ``seed`` only.
    """
    if steps < 1 or samples < 1 or rounds < 1:
        raise ValueError("steps, samples and rounds must all be >= 1")
    d = _check_bundles(bundles)
    c = len(bundles)
    counts = np.zeros((d, c), dtype=np.int64)
    rows = np.arange(d)
    for t in range(steps):
        y = counts / steps
        grad = np.column_stack(
            [_marginals(b, y[:, j], samples, _stream(seed, 0, t, j)) for j, b in enumerate(bundles)]
        )
        counts[rows, np.argmax(grad, axis=1)] += 1
    cum = np.cumsum(counts, axis=1)
    best_val, best_assign = -np.inf, None
    for r in range(rounds):
        draw = _stream(seed, 1, r).integers(0, steps, size=d)
        assign = np.argmax(cum > draw[:, None], axis=1)
        val = welfare(bundles, assign)
        if val > best_val:
            best_val, best_assign = val, assign
    info = {"y": counts / steps, "steps": steps, "samples": samples, "rounds": rounds, "seed": seed}
    return AttributePartition(best_assign, c, "swa", best_val, info=info)


def simplified(bundles: Sequence[ClassBundle]) -> AttributePartition:
    """Exact optimum of the modular surrogate: per-attribute argmax of frozen-weight gains."""
    _check_bundles(bundles)
    gains = _simplified_gains(bundles)
    assignment = np.argmax(gains, axis=0)
    info = {"surrogate_value": float(gains[assignment, np.arange(gains.shape[1])].sum())}
    return AttributePartition(assignment, len(bundles), "simplified", welfare(bundles, assignment), info=info)


def _lazy_greedy(bundle: ClassBundle, k: int, start: Sequence[int], excluded: set) -> list[int]:
    """CELF: extend ``start`` to ``k`` attributes using stale gains as upper bounds."""
    chosen = list(start)
    sq = bundle.sq
    s = sq[:, chosen].sum(axis=1) if chosen else np.zeros(bundle.n)
    current = np.sqrt(s).mean()
    pool = [a for a in range(bundle.d) if a not in excluded and a not in set(chosen)]
    if not pool:
        return chosen
    gains = np.sqrt(s[:, None] + sq[:, pool]).mean(axis=0) - current
    heap = [(-g, a, len(chosen)) for g, a in zip(gains.tolist(), pool)]
    heapq.heapify(heap)
    while len(chosen) < k and heap:
        neg, a, stamp = heapq.heappop(heap)
        if stamp == len(chosen):
            chosen.append(a)
            s = s + bundle.sqT[a]
            current = np.sqrt(s).mean()
        else:
            g = np.sqrt(s + bundle.sqT[a]).mean() - current
            heapq.heappush(heap, (-g, a, len(chosen)))
    return chosen


def topk(bundles: Sequence[ClassBundle], k: int, seed: int | None = None) -> AttributePartition:
    """Top-``k`` attributes per class by lazy greedy, with conflicts resolved.

    Each class greedily picks ``k`` attributes on its own. An attribute picked
    by several classes goes to the one with the highest average contribution
    ``mean_k x_k(a)`` (lower class id on ties); the losers refill from the
    attributes no other class holds. ``seed`` is accepted for interface
    symmetry; the procedure is deterministic.
    """
    d = _check_bundles(bundles)
    c = len(bundles)
    if k < 1:
        raise ValueError("k must be >= 1")
    if c * k > d:
        raise InfeasibleError(f"top-{k} for {c} classes needs {c * k} attributes, only {d} exist")
    avg = np.vstack([b.x.mean(axis=0) for b in bundles])
    locked: list[list[int]] = [[] for _ in range(c)]
    rounds = 0
    while True:
        rounds += 1
        held = [set(x) for x in locked]
        picks = []
        for j, b in enumerate(bundles):
            others = set().union(*(held[i] for i in range(c) if i != j))
            picks.append(_lazy_greedy(b, k, locked[j], others)[len(locked[j]):])
        claims: dict[int, list[int]] = {}
        for j, new in enumerate(picks):
            for a in new:
                claims.setdefault(a, []).append(j)
        contested = False
        for j, new in enumerate(picks):
            for a in new:
                owners = claims[a]
                if len(owners) == 1:
                    locked[j].append(a)
                else:
                    contested = True
                    winner = max(owners, key=lambda i: (avg[i, a], -i))
                    if winner == j:
                        locked[j].append(a)
        if not contested:
            break
    assignment = np.full(d, -1)
    for j, attrs in enumerate(locked):
        assignment[attrs] = j
    return AttributePartition(
        assignment, c, "topk", welfare(bundles, assignment), k=k,
        info={"rounds": rounds, "order": [list(x) for x in locked]},
    )


def run_algorithm(name: str, bundles, *, k=None, steps=100, samples=32, seed=0, rounds=8,
                  cap=DEFAULT_BRUTE_CAP) -> AttributePartition:
    """Dispatch by algorithm name as used on the command line."""
    if name == "brute":
        return brute_force(bundles, cap=cap)
    if name in ("greedy", "greedy_half"):
        return greedy_half(bundles)
    if name == "swa":
        return swa_continuous_greedy(bundles, steps=steps, samples=samples, seed=seed, rounds=rounds)
    if name == "simplified":
        return simplified(bundles)
    if name == "topk":
        if k is None:
            raise ValueError("topk needs k")
        return topk(bundles, int(k), seed=seed)
    raise ValueError(f"unknown algorithm {name!r}; choose from {ALGORITHMS}")
