"""Mesoscopic co-authorship network analysis.

From raw publication records to clustered co-author networks, per-cluster
structure metrics, node roles, and transfer/collaboration classification
of inter-cluster links.
"""

__version__ = "0.1.0"

from .cluster import Clustering, detect_communities, load_clustering
from .graph import CoauthorNetwork, build_network, giant_component, reduce_single_paper_authors
from .ingest import Corpus, PublicationRecord, filter_corpus, parse_field_tagged, parse_tabular

__all__ = [
    "Clustering",
    "CoauthorNetwork",
    "Corpus",
    "PublicationRecord",
    "build_network",
    "detect_communities",
    "filter_corpus",
    "giant_component",
    "load_clustering",
    "parse_field_tagged",
    "parse_tabular",
    "reduce_single_paper_authors",
]
