"""
Local communities around seed nodes
===================================

Two ways to grow a subgraph around a seed: the ego-network (seed plus
neighbors) and a PageRank push followed by a conductance sweep. The second one
follows the graph's own cluster boundaries rather than a fixed radius.

Run from the repository root::

    python demos/01_local_communities.py
"""

from pathlib import Path

import numpy as np

from classcontrast.community import approximate_ppr, boundary, conductance, ego_net, ppr_community, sweep_cut
from classcontrast.graph import AttributedGraph, load_graph

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"

###############################################################################
# A graph we can reason about by hand: two 4-cliques joined by one bridge.

edges = [(i, j) for i in range(4) for j in range(i + 1, 4)]
edges += [(i, j) for i in range(4, 8) for j in range(i + 1, 8)]
edges += [(3, 4)]
g = AttributedGraph.from_edges(8, edges, np.ones((8, 1)))

print("degrees", g.degrees)
print("ego net of node 3:", ego_net(g, 3).members)

###############################################################################
# The push keeps a sparse estimate ``p`` and a residual ``r``. Every residual
# ends below ``epsilon * degree``; the total mass is always 1.

p, r = approximate_ppr(g, seed=0, alpha=0.15, epsilon=1e-6)
print("pagerank mass", round(sum(p.values()) + sum(r.values()), 12))
for u in sorted(p, key=lambda u: -p[u] / g.degrees[u]):
    print(f"  node {u}  p/deg = {p[u] / g.degrees[u]:.4f}")

###############################################################################
# Sweeping that order and scoring each prefix by conductance picks out the
# first clique, whose only outgoing edge is the bridge: 1 / 13.

members, phi = sweep_cut(g, p, seed=0, max_size=100)
print("sweep:", members, "conductance", phi)
sub = ppr_community(g, 0)
print("ppr community", sub.members, "boundary", boundary(g, sub))

###############################################################################
# On the two-camp toy graph (ten 5-cliques in a ring) the PageRank community
# spans the seed's group and its ring neighbours: bigger than the ego-net,
# with a lower conductance.

camp = load_graph(DATA / "two_camp_edges.tsv", DATA / "two_camp_attrs.tsv")
for seed in ("v00", "v12", "v33"):
    i = camp.node_index(seed)
    ego, ppr = ego_net(camp, i), ppr_community(camp, i)
    names = [camp.node_names[m] for m in ppr.members]
    print(f"{seed}: ego {len(ego)} nodes (phi {conductance(camp, ego.members):.3f}), "
          f"ppr {len(ppr)} nodes (phi {conductance(camp, ppr.members):.3f}) {names}")
