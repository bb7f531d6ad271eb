"""
Characterizing classes: ranking, time series and support metrics
================================================================

The whole library pipeline on the two-camp graph: extract ego-nets around
labeled nodes, compute focus vectors, split the attributes, rank each class's
attributes by relative contribution with a bootstrap, then score the ranking
with class support and class confidence.

Run from the repository root::

    python demos/04_ranking_and_metrics.py
"""

from pathlib import Path

import numpy as np

from classcontrast.community import ego_net, read_class_file
from classcontrast.graph import AttributedGraph, load_graph
from classcontrast.normality import contribution_vectors
from classcontrast.ranking import bootstrap_rank, contribution_series
from classcontrast.synthbench import LabeledNodeTable, class_metrics
from classcontrast.welfare import build_bundles, swa_continuous_greedy

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"

graph = load_graph(DATA / "two_camp_edges.tsv", DATA / "two_camp_attrs.tsv")
_, seeds = read_class_file(DATA / "two_camp_classes.tsv", graph)

###############################################################################
# Focus vectors, one per labeled node. Low-quality subgraphs (no attribute
# with a positive contribution) are dropped before partitioning.

subs = [ego_net(graph, i, lab.class_id) for i, lab in seeds]
vectors, scale = contribution_vectors(graph, subs)
x_hat = np.vstack([v.x_hat for v in vectors])
bundles, dropped = build_bundles([v.class_id for v in vectors], x_hat, [v.name for v in vectors])
print(f"{len(vectors)} subgraphs, {dropped} dropped as low quality")

part = swa_continuous_greedy(bundles, seed=0)
print("partition value", round(part.objective_value, 4))

###############################################################################
# Bootstrap ranking: 100 repetitions on 90% subsamples of each class. The
# planted attributes should lead their class, well clear of the noise.

report = bootstrap_rank(bundles, part, fraction=0.9, reps=100, seed=0, attribute_names=graph.attribute_names)
for c in report.classes:
    print(f"class {c}:")
    for r in report.top(c, 5):
        print(f"  {r.rank}. {r.attribute:10s} rc {r.rc_mean:+.4f} +- {r.rc_std:.4f}")

###############################################################################
# A contribution time series: rebuild the graph with the class-0 focus
# attribute fading out, and follow its average contribution to class 0.

snapshots = []
rng = np.random.default_rng(1)
col = graph.attribute_names.index("focus_a1")
for keep in (1.0, 0.6, 0.3, 0.0):
    attrs = graph.attributes.copy()
    attrs[:, col] *= rng.random(graph.node_count) < keep
    g_t = AttributedGraph.from_edges(graph.node_count, graph.edges(), attrs,
                                     graph.attribute_names, graph.node_names)
    v_t, _ = contribution_vectors(g_t, subs)
    b_t, _ = build_bundles([v.class_id for v in v_t], np.vstack([v.x_hat for v in v_t]))
    snapshots.append((b_t, graph.attribute_names))
print("focus_a1 -> class 0 over time:", np.round(contribution_series(snapshots, "focus_a1", 0), 4))

###############################################################################
# Class support / confidence of the ranking, weighted by the (non-negative)
# relative contributions. High values mean the ranked attributes really are
# more common, and more exclusive, in their class.

labels = {i: lab.class_id for i, lab in seeds}
weights = {c: {a: max(w, 0.0) for a, w in ws.items()} for c, ws in report.weights().items()}
for c, m in class_metrics(LabeledNodeTable.from_graph(graph, labels), weights).items():
    print(f"class {c}: CS {m['cs_bar']:.3f}  CC {m['cc_bar']:.3f}  over {m['n_attributes']} attributes")
