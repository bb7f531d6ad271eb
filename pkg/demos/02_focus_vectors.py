"""
Focus vectors: which attributes make a subgraph look like a community
=====================================================================

For every subgraph each attribute gets an internal term (edges beyond the
degree-based null model, counted only where both ends share the attribute)
and an external term (a penalty for boundary edges that carry it). Their sum
``x_hat`` is the raw material for everything downstream.

Run from the repository root::

    python demos/02_focus_vectors.py
"""

from pathlib import Path

import numpy as np

from classcontrast.community import Subgraph, ego_net
from classcontrast.graph import AttributedGraph, load_graph
from classcontrast.normality import contribution_vectors, infer_weights, raw_contributions, subspace_quality

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"

###############################################################################
# The hand-checkable case: a 4-clique with a tail node hanging off node 3,
# one attribute that every node carries. Degrees are 3, 3, 3, 4, 1 and
# ``2e = 14``. Three pairs contribute ``1 - 9/14`` each, three more
# ``1 - 12/14``: internal 3/2. The bridge is penalized by ``1 - 4/14``.

edges = [(i, j) for i in range(4) for j in range(i + 1, 4)] + [(3, 4)]
g = AttributedGraph.from_edges(5, edges, np.ones((5, 1)))
internal, external = raw_contributions(g, Subgraph((0, 1, 2, 3), 0))
print("internal", internal, "external", external, "(expect 1.5 and -5/7 =", -5 / 7, ")")

###############################################################################
# Weight inference. Under a unit L2 norm the best non-negative weights are
# proportional to the positive part of ``x_hat``; under L1 they collapse to the
# single best attribute. A vector with no positive entry is low quality.

for x_hat in ([0.6, 0.8, -0.3], [0.2, 0.7, -0.1], [-0.2, -0.5]):
    l2, l1 = infer_weights(np.array(x_hat), "L2"), infer_weights(np.array(x_hat), "L1")
    print(f"x_hat {x_hat}: L2 w={np.round(l2.w, 3)} N={l2.normality:.3f}  "
          f"L1 w={l1.w} N={l1.normality:.3f}  low quality={l2.low_quality}")

###############################################################################
# The quality of an attribute subset is the 2-norm of ``x`` restricted to it.
# It never decreases as attributes are added, and adds less to bigger sets.

x = np.array([3.0, 4.0, 0.0])
print("subspace quality {0,1}:", subspace_quality(x, [0, 1]), " {0,1,2}:", subspace_quality(x, [0, 1, 2]))

###############################################################################
# On the two-camp graph, ego-nets of camp-0 members lean on ``focus_a*`` and
# camp-1 members on ``focus_b*``. All vectors of a run share one scale so they
# are comparable across subgraphs.

camp = load_graph(DATA / "two_camp_edges.tsv", DATA / "two_camp_attrs.tsv")
subs = [ego_net(camp, camp.node_index(v), class_id=c) for v, c in (("v02", 0), ("v07", 0), ("v31", 1), ("v44", 1))]
vectors, scale = contribution_vectors(camp, subs)
print(f"global scale {scale:.3f}")
for v in vectors:
    fw = infer_weights(v)
    focus = [camp.attribute_names[a] for a in fw.focus[:3]]
    print(f"  {v.name} (class {v.class_id}): normality {fw.normality:.3f}, top focus {focus}")
