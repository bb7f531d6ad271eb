"""Synthetic instances, approximation-ratio and runtime experiments, and
class support / class confidence metrics for rankings."""

from __future__ import annotations

import re
import time
import warnings
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .welfare import DEFAULT_BRUTE_CAP, ClassBundle, InfeasibleError, run_algorithm

__all__ = [
    "SyntheticSpec",
    "draw_vectors",
    "gen_normal",
    "gen_adversarial",
    "parse_algo",
    "ratio_experiment",
    "runtime_bench",
    "LabeledNodeTable",
    "association_metrics",
    "class_metrics",
]


@dataclass(frozen=True)
class SyntheticSpec:
    scheme: str = "normal"
    d: int = 10
    p: int = 100
    n: int = 100
    P: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.scheme not in ("normal", "adversarial"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.d < 1 or self.p < 1 or self.n < 1:
            raise ValueError("d, p and n must be >= 1")
        if self.scheme == "adversarial" and not 0.0 < self.P < 1.0:
            raise ValueError("adversarial scheme needs 0 < P < 1")


def draw_vectors(spec: SyntheticSpec) -> list[np.ndarray]:
    """Raw per-class ``x`` matrices (``p`` rows for class 0, ``n`` for class 1)."""
    rng = np.random.default_rng(spec.seed)
    sizes = (spec.p, spec.n)
    if spec.scheme == "normal":
        mu = rng.normal(0.0, 1.0, size=(2, spec.d))
        sigma = rng.uniform(0.0, 1.0, size=(2, spec.d))
        # negative draws carry no contribution
        return [np.maximum(rng.normal(mu[c], sigma[c], size=(m, spec.d)), 0.0) for c, m in enumerate(sizes)]
    lo = (spec.P, 0.0)
    hi = (1.0, 1.0 - spec.P)
    return [rng.uniform(lo[c], hi[c], size=(m, spec.d)) for c, m in enumerate(sizes)]


def _bundle(mats) -> list[ClassBundle]:
    out = []
    for c, x in enumerate(mats):
        keep = x.max(axis=1) > 0
        if not keep.any():
            raise ValueError(f"class {c}: every synthetic vector is zero")
        out.append(ClassBundle(c, x[keep], x[keep]))
    return out


def gen_normal(spec: SyntheticSpec) -> list[ClassBundle]:
    """Normal scheme: per (class, attribute) mean ~ N(0, 1) and sd ~ U[0, 1].

    Draws are clamped at zero; a subgraph whose draws are all clamped has no
    positive entry and is dropped, as low-quality subgraphs are elsewhere.
    """
    if spec.scheme != "normal":
        raise ValueError("gen_normal needs scheme='normal'")
    return _bundle(draw_vectors(spec))


def gen_adversarial(spec: SyntheticSpec) -> list[ClassBundle]:
    """Class 0 uniform on [P, 1], class 1 uniform on [0, 1 - P], for every attribute."""
    if spec.scheme != "adversarial":
        raise ValueError("gen_adversarial needs scheme='adversarial'")
    return _bundle(draw_vectors(spec))


def generate(spec: SyntheticSpec) -> list[ClassBundle]:
    return gen_normal(spec) if spec.scheme == "normal" else gen_adversarial(spec)


_TOPK = re.compile(r"^top-?(\d+)$|^topk:(\d+)$")


def parse_algo(label: str) -> tuple[str, int | None]:
    """``"swa"`` -> ``("swa", None)``; ``"top5"`` / ``"topk:5"`` -> ``("topk", 5)``."""
    m = _TOPK.match(label.strip().lower())
    if m:
        return "topk", int(m.group(1) or m.group(2))
    name = label.strip().lower()
    if name == "greedy_half":
        name = "greedy"
    if name not in ("brute", "greedy", "swa", "simplified"):
        raise ValueError(f"unknown algorithm {label!r}")
    return name, None


def _instance_seed(seed: int, d: int, rep: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(d, rep)).generate_state(1)[0])


def ratio_experiment(
    ds: Sequence[int],
    algos: Sequence[str],
    repetitions: int = 10,
    seed: int = 0,
    scheme: str = "normal",
    P: float = 0.5,
    p: int = 100,
    n: int = 100,
    steps: int = 100,
    samples: int = 32,
    brute_max_d: int = 20,
    cap: int = DEFAULT_BRUTE_CAP,
) -> list[dict]:
    """Mean objective ratio per ``(d, algo)`` over random instances.

    The reference is the brute-force optimum when ``d <= brute_max_d``, else
    the best value any listed algorithm reached on that instance. Algorithms
    that cannot run on an instance (e.g. top-k with ``2k > d``) are skipped
    for that ``d``.
    """
    parsed = [(label, *parse_algo(label)) for label in algos]
    out = []
    for d in ds:
        ratios: dict[str, list[float]] = {label: [] for label, *_ in parsed}
        values: dict[str, list[float]] = {label: [] for label, *_ in parsed}
        reference = "brute" if d <= brute_max_d else "max_achieved"
        for rep in range(repetitions):
            inst_seed = _instance_seed(seed, d, rep)
            bundles = generate(SyntheticSpec(scheme, d, p, n, P, inst_seed))
            vals = {}
            for label, name, k in parsed:
                if name == "topk" and 2 * k > d:
                    continue
                part = run_algorithm(name, bundles, k=k, steps=steps, samples=samples,
                                     seed=inst_seed, cap=cap)
                vals[label] = part.objective_value
            if reference == "brute":
                best = next((vals[lab] for lab, name, _ in parsed if name == "brute" and lab in vals), None)
                if best is None:
                    best = run_algorithm("brute", bundles, cap=cap).objective_value
            else:
                best = max(vals.values()) if vals else np.nan
            for label, v in vals.items():
                ratios[label].append(v / best if best > 0 else 1.0)
                values[label].append(v)
        for label, *_ in parsed:
            r = ratios[label]
            if not r:
                continue
            out.append({
                "d": d, "algo": label, "reference": reference, "reps": len(r),
                "mean_ratio": float(np.mean(r)), "std_ratio": float(np.std(r)),
                "min_ratio": float(np.min(r)), "mean_value": float(np.mean(values[label])),
            })
    return out


def runtime_bench(
    ds: Sequence[int],
    algos: Sequence[str],
    seed: int = 0,
    repeats: int = 3,
    p: int = 100,
    n: int = 100,
    steps: int = 100,
    samples: int = 32,
) -> list[dict]:
    """Wall-clock seconds per ``(d, algo)`` on one normal-scheme instance per ``d``.

    One untimed warm-up run precedes ``repeats`` timed runs; the fastest is
    reported, which is the usual way to suppress scheduler noise.
    """
    parsed = [(label, *parse_algo(label)) for label in algos]
    out = []
    for d in ds:
        bundles = gen_normal(SyntheticSpec("normal", d, p, n, seed=_instance_seed(seed, d, 0)))
        for label, name, k in parsed:
            if name == "brute" and 2**d > DEFAULT_BRUTE_CAP:
                raise InfeasibleError(f"brute force is not timed at d={d}")

            def call():
                return run_algorithm(name, bundles, k=k, steps=steps, samples=samples, seed=seed)

            call()
            times = []
            for _ in range(repeats):
                t0 = time.perf_counter()
                call()
                times.append(time.perf_counter() - t0)
            out.append({"d": d, "algo": label, "seconds": min(times), "median_seconds": float(np.median(times))})
    return out


@dataclass
class LabeledNodeTable:
    """Class label and binary attribute indicators for each node."""

    class_ids: np.ndarray
    indicators: np.ndarray
    attribute_names: list[str]

    def __post_init__(self):
        self.class_ids = np.asarray(self.class_ids, dtype=int)
        ind = np.asarray(self.indicators)
        self.indicators = ind > 0 if ind.dtype != bool else ind
        if self.indicators.ndim != 2 or self.indicators.shape[0] != self.class_ids.shape[0]:
            raise ValueError("one indicator row per labeled node required")
        if len(self.attribute_names) != self.indicators.shape[1]:
            raise ValueError("attribute names do not match indicator columns")
        if np.any(self.class_ids < 0):
            raise ValueError("class ids must be non-negative")

    @classmethod
    def from_graph(cls, graph, labeled: Mapping[int, int]) -> "LabeledNodeTable":
        """Nodes in ``labeled`` (node index -> class id); real values binarized by ``> 0``."""
        nodes = sorted(labeled)
        return cls([labeled[i] for i in nodes], graph.attributes[nodes] > 0, list(graph.attribute_names))

    @property
    def n_classes(self) -> int:
        return int(self.class_ids.max()) + 1


def association_metrics(table: LabeledNodeTable, drop_unobserved: bool = False) -> dict[str, np.ndarray]:
    """Per (class, attribute) confidence, support and their class-relative versions.

    ``cfd[c, a] = #(c, a) / #(a)`` and ``sup[c, a] = #(c, a) / #(c)``. The
    relative scores subtract the largest other-class value, which for two
    classes is the plain difference. An attribute no node exhibits has an
    undefined confidence: it is set to 0 with a warning, or to NaN when
    ``drop_unobserved`` is set so callers can leave it out.
    """
    c = table.n_classes
    counts = np.vstack([table.indicators[table.class_ids == k].sum(axis=0) for k in range(c)]).astype(float)
    per_class = np.array([(table.class_ids == k).sum() for k in range(c)], dtype=float)
    if np.any(per_class == 0):
        raise ValueError("every class needs at least one node")
    per_attr = counts.sum(axis=0)
    unobserved = per_attr == 0
    if unobserved.any():
        names = [table.attribute_names[a] for a in np.flatnonzero(unobserved)]
        if not drop_unobserved:
            warnings.warn(f"confidence undefined for never-observed attributes {names[:5]}; using 0",
                          stacklevel=2)
    with np.errstate(invalid="ignore", divide="ignore"):
        cfd = np.where(unobserved, np.nan if drop_unobserved else 0.0, counts / per_attr)
    sup = counts / per_class[:, None]

    def relative(m):
        if c == 1:
            return m.copy()
        return np.vstack([m[k] - np.delete(m, k, axis=0).max(axis=0) for k in range(c)])

    return {"cfd": cfd, "sup": sup, "cc": relative(cfd), "cs": relative(sup), "counts": counts}


def class_metrics(
    table: LabeledNodeTable,
    weights: Mapping[int, Mapping[str, float]],
    drop_unobserved: bool = False,
) -> dict[int, dict]:
    """Weighted average class support and class confidence per class.

    ``weights[c]`` maps each attribute assigned to class ``c`` to its ranking
    score (which must be non-negative). Returns, per class, ``cs_bar``,
    ``cc_bar`` and the number of attributes used.
    """
    metrics = association_metrics(table, drop_unobserved)
    col = {a: i for i, a in enumerate(table.attribute_names)}
    out = {}
    for c, wmap in sorted(weights.items()):
        if c >= table.n_classes:
            raise ValueError(f"class {c} has no labeled nodes")
        idx, w = [], []
        for a, wa in wmap.items():
            if a not in col:
                raise KeyError(f"ranked attribute {a!r} is not in the node table")
            if wa < 0:
                raise ValueError(f"weight for {a!r} is negative ({wa})")
            if drop_unobserved and np.isnan(metrics["cc"][c, col[a]]):
                continue
            idx.append(col[a])
            w.append(float(wa))
        w = np.asarray(w)
        total = w.sum()
        if total > 0:
            cs = float(w @ metrics["cs"][c, idx] / total)
            cc = float(w @ metrics["cc"][c, idx] / total)
        else:
            cs = cc = float("nan")
        out[c] = {"cs_bar": cs, "cc_bar": cc, "n_attributes": len(idx), "weight_total": float(total)}
    return out
