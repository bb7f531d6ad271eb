"""Ranking the attributes of each class by relative contribution.

The relative contribution of attribute ``a`` to class ``c`` is the class's
average ``x(a)`` minus the largest average among the other classes; with two
classes that is simply the difference of the two averages. Attributes that
matter to both classes, or to neither, score near zero.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .welfare import AttributePartition, ClassBundle, _check_bundles

__all__ = [
    "RankedAttribute",
    "CharacterizationReport",
    "relative_contribution",
    "relative_contributions",
    "bootstrap_rank",
    "contribution_series",
]


def relative_contributions(bundles: Sequence[ClassBundle]) -> np.ndarray:
    """``(c, d)`` matrix of relative contributions for every class and attribute."""
    _check_bundles(bundles)
    avg = np.vstack([b.x.mean(axis=0) for b in bundles])
    if len(bundles) == 1:
        return avg
    out = np.empty_like(avg)
    for c in range(len(bundles)):
        out[c] = avg[c] - np.delete(avg, c, axis=0).max(axis=0)
    return out


def relative_contribution(bundles: Sequence[ClassBundle], a: int, c: int) -> float:
    return float(relative_contributions(bundles)[c, a])


@dataclass(frozen=True)
class RankedAttribute:
    attribute: str
    index: int
    rc_mean: float
    rc_std: float
    rank: int


@dataclass
class CharacterizationReport:
    classes: dict[int, list[RankedAttribute]]
    fraction: float
    reps: int
    seed: int
    algorithm: str = ""
    objective_value: float = float("nan")
    meta: dict = field(default_factory=dict)

    def top(self, c: int, n: int = 10) -> list[RankedAttribute]:
        return self.classes[c][:n]

    def weights(self) -> dict[int, dict[str, float]]:
        return {c: {r.attribute: r.rc_mean for r in rows} for c, rows in self.classes.items()}

    def to_dict(self) -> dict:
        return {
            "bootstrap": {"fraction": self.fraction, "reps": self.reps, "seed": self.seed},
            "partition": {"algorithm": self.algorithm, "objective_value": self.objective_value},
            "classes": {
                str(c): [
                    {"rank": r.rank, "attribute": r.attribute, "rc_mean": r.rc_mean, "rc_std": r.rc_std}
                    for r in rows
                ]
                for c, rows in self.classes.items()
            },
            **({"meta": self.meta} if self.meta else {}),
        }

    def rows(self):
        """Plot-ready ``(class, rank, attribute, rc_mean, rc_std)`` tuples."""
        for c, rows in self.classes.items():
            for r in rows:
                yield c, r.rank, r.attribute, r.rc_mean, r.rc_std


def bootstrap_rank(
    bundles: Sequence[ClassBundle],
    partition: AttributePartition,
    fraction: float = 0.9,
    reps: int = 100,
    seed: int = 0,
    attribute_names: Sequence[str] | None = None,
    threads: int = 1,
) -> CharacterizationReport:
    """Relative contributions averaged over subsamples of each class.

    Every repetition keeps ``ceil(fraction * n_c)`` subgraphs of each class,
    drawn without replacement, and rescores the attributes on the fixed
    partition. Attributes are ranked within their assigned class by the mean
    score; the spread is the sample standard deviation (0 when ``reps == 1``).
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    if reps < 1:
        raise ValueError("reps must be >= 1")
    d = _check_bundles(bundles)
    if partition.assignment.shape != (d,) or partition.n_classes != len(bundles):
        raise ValueError("partition does not match the bundles")
    names = list(attribute_names) if attribute_names is not None else [f"a{i}" for i in range(d)]
    sizes = [max(1, math.ceil(fraction * b.n)) for b in bundles]

    def one(r):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(r,)))
        sample = [b.subset(np.sort(rng.choice(b.n, size=m, replace=False))) for b, m in zip(bundles, sizes)]
        return relative_contributions(sample)

    if threads > 1 and reps > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            scores = np.stack(list(pool.map(one, range(reps))))
    else:
        scores = np.stack([one(r) for r in range(reps)])
    # identical repetitions (e.g. fraction=1) should report exactly, not up to summation error
    same = np.ptp(scores, axis=0) == 0
    mean = np.where(same, scores[0], scores.mean(axis=0))
    std = np.where(same, 0.0, scores.std(axis=0, ddof=1)) if reps > 1 else np.zeros_like(mean)

    classes = {}
    for c in range(len(bundles)):
        attrs = partition.attributes_of(c)
        order = sorted(attrs.tolist(), key=lambda a: (-mean[c, a], a))
        classes[c] = [
            RankedAttribute(names[a], a, float(mean[c, a]), float(std[c, a]), rank)
            for rank, a in enumerate(order, start=1)
        ]
    return CharacterizationReport(
        classes, fraction, reps, seed, partition.algorithm, float(partition.objective_value)
    )


def contribution_series(snapshots, attribute: str, class_id: int) -> list[float]:
    """Average signed contribution of one attribute to one class, per snapshot.

    ``snapshots`` is a sequence of ``(bundles, attribute_names)`` pairs in
    time order. Signed ``x_hat`` values are averaged, so an attribute that
    works against a class's subgraphs shows up negative.
    """
    out = []
    for t, (bundles, names) in enumerate(snapshots):
        names = list(names)
        if attribute not in names:
            raise KeyError(f"attribute {attribute!r} missing from snapshot {t}")
        matches = [b for b in bundles if b.class_id == class_id]
        if not matches:
            raise KeyError(f"class {class_id} missing from snapshot {t}")
        b = matches[0]
        values = b.x_hat if b.x_hat is not None else b.x
        out.append(float(values[:, names.index(attribute)].mean()))
    return out
