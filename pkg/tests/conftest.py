import random
from itertools import combinations
from pathlib import Path

import pytest

from mesobib.graph import CoauthorNetwork
from mesobib.ingest import Corpus, PublicationRecord

REPO_ROOT = Path(__file__).resolve().parents[1]
SAMPLE_DIR = REPO_ROOT / "sample"


def make_corpus(papers, years=None, n_references=10):
    """Corpus from a list of author-key lists; years default to 2000."""
    records = []
    for i, authors in enumerate(papers):
        year = years[i] if years else 2000
        records.append(
            PublicationRecord(
                record_id=f"p{i + 1}",
                year=year,
                authors=tuple(authors),
                countries=(),
                n_references=n_references,
            )
        )
    span = (min(r.year for r in records), max(r.year for r in records)) if records else None
    return Corpus(records=tuple(records), time_span=span)


def clique_net(*groups, bridges=()):
    """Network of cliques (one per group) plus explicit bridge edges."""
    net = CoauthorNetwork()
    for group in groups:
        if len(group) == 1:
            net.add_node(group[0])
        for a, b in combinations(group, 2):
            net.add_edge(a, b, 1)
    for a, b in bridges:
        net.add_edge(a, b, 1)
    return net


def star_net(n, prefix="S"):
    net = CoauthorNetwork()
    center = f"{prefix}0"
    for i in range(1, n):
        net.add_edge(center, f"{prefix}{i}", 1)
    return net


def cycle_net(n, prefix="C"):
    net = CoauthorNetwork()
    for i in range(n):
        net.add_edge(f"{prefix}{i:03d}", f"{prefix}{(i + 1) % n:03d}", 1)
    return net


def random_network(rng: random.Random, n_nodes: int, n_edges: int) -> CoauthorNetwork:
    net = CoauthorNetwork()
    labels = [f"N{i:03d}" for i in range(n_nodes)]
    for label in labels:
        net.add_node(label)
    seen = set()
    attempts = 0
    while len(seen) < n_edges and attempts < 50 * n_edges:
        attempts += 1
        a, b = rng.sample(labels, 2)
        pair = (min(a, b), max(a, b))
        if pair in seen:
            continue
        seen.add(pair)
        net.add_edge(pair[0], pair[1], rng.randint(1, 4))
    return net


@pytest.fixture
def two_cliques():
    return clique_net(
        [f"A{i}" for i in range(5)],
        [f"B{i}" for i in range(5)],
        bridges=[("A0", "B0")],
    )
