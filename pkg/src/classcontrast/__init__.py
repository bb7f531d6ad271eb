"""Characterize classes of attributed subgraphs by the attributes they focus on.

Typical flow: extract a local subgraph around each labeled node
(:mod:`~classcontrast.community`), turn each subgraph into an attribute
contribution vector (:mod:`~classcontrast.normality`), split the attributes
between the classes (:mod:`~classcontrast.welfare`), and rank each class's
attributes by relative contribution (:mod:`~classcontrast.ranking`).
"""

__version__ = "0.1.0"

from .community import Subgraph, boundary, ego_net, ppr_community
from .graph import AttributedGraph, GraphFormatError, load_graph, one_hot_encode, write_graph
from .normality import (
    ContributionVector,
    FocusVectorTable,
    compute_contributions,
    contribution_vectors,
    infer_weights,
    subspace_quality,
)
from .ranking import CharacterizationReport, bootstrap_rank, contribution_series, relative_contribution
from .welfare import (
    AttributePartition,
    ClassBundle,
    InfeasibleError,
    brute_force,
    build_bundles,
    greedy_half,
    simplified,
    swa_continuous_greedy,
    topk,
    welfare,
)

__all__ = [
    "AttributedGraph",
    "GraphFormatError",
    "load_graph",
    "write_graph",
    "one_hot_encode",
    "Subgraph",
    "ego_net",
    "ppr_community",
    "boundary",
    "ContributionVector",
    "FocusVectorTable",
    "compute_contributions",
    "contribution_vectors",
    "infer_weights",
    "subspace_quality",
    "ClassBundle",
    "AttributePartition",
    "InfeasibleError",
    "build_bundles",
    "welfare",
    "brute_force",
    "greedy_half",
    "swa_continuous_greedy",
    "simplified",
    "topk",
    "CharacterizationReport",
    "relative_contribution",
    "bootstrap_rank",
    "contribution_series",
]
