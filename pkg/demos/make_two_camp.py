"""
Two-camp toy network
====================

Builds the small attributed graph used by the end-to-end tests: 50 nodes in
ten tight groups of five, five groups per camp. Groups are cliques joined in a
ring by single bridge edges plus a few random cross links.

Each camp has two planted focus attributes that most of its members carry and
the other camp's members almost never do; eight noise attributes are spread
uniformly. The camps are the classes.

Run from the repository root::

    python demos/make_two_camp.py tests/data
"""

import sys
from pathlib import Path

import numpy as np

OUT = Path(sys.argv[1] if len(sys.argv) > 1 else "tests/data")
rng = np.random.default_rng(7)

GROUP, N_GROUPS = 5, 10
n = GROUP * N_GROUPS
camp = np.repeat([0, 1], n // 2)
group_of = np.repeat(np.arange(N_GROUPS), GROUP)

edges = set()
for g in range(N_GROUPS):
    members = np.flatnonzero(group_of == g)
    edges.update((int(i), int(j)) for i in members for j in members if i < j)
# ring of bridges between consecutive groups
for g in range(N_GROUPS):
    i = int(rng.choice(np.flatnonzero(group_of == g)))
    j = int(rng.choice(np.flatnonzero(group_of == (g + 1) % N_GROUPS)))
    edges.add((min(i, j), max(i, j)))
while len(edges) < 10 * 10 + N_GROUPS + 5:
    i, j = rng.choice(n, size=2, replace=False)
    if group_of[i] != group_of[j]:
        edges.add((int(min(i, j)), int(max(i, j))))

planted = {"focus_a1": 0, "focus_a2": 0, "focus_b1": 1, "focus_b2": 1}
attrs = {}
for name, owner in planted.items():
    attrs[name] = np.where(camp == owner, rng.random(n) < 0.9, rng.random(n) < 0.05)
for k in range(8):
    attrs[f"noise_{k}"] = rng.random(n) < 0.3

name = [f"v{i:02d}" for i in range(n)]
OUT.mkdir(parents=True, exist_ok=True)
with open(OUT / "two_camp_edges.tsv", "w") as fh:
    fh.write("# two-camp toy graph: 10 five-cliques in a ring\n")
    for i, j in sorted(edges):
        fh.write(f"{name[i]}\t{name[j]}\n")
with open(OUT / "two_camp_attrs.tsv", "w") as fh:
    for a, col in attrs.items():
        for i in np.flatnonzero(col):
            fh.write(f"{name[i]}\t{a}\t1\n")
with open(OUT / "two_camp_classes.tsv", "w") as fh:
    for i in range(n):
        fh.write(f"{name[i]}\t{camp[i]}\n")

print(f"{n} nodes, {len(edges)} edges, {len(attrs)} attributes -> {OUT}")
