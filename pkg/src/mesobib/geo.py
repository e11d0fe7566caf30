"""Continent-level geographic affiliation of clusters.

A cluster is represented by every record carrying at least one of its
members; the full country multiset of each such record counts. The label
is the top country's continent, widened to a mixed two-continent label
when the runner-up country reaches at least half the top count and lies
on a different continent.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cluster import ClusterInfo
from .ingest import Corpus

CONTINENTS = ("Africa", "Asia", "Europe", "NorthAmerica", "Oceania", "SouthAmerica")
UNKNOWN = "unknown"


class CountryTable:
    """Country -> continent mapping loaded from a two-column text file."""

    def __init__(self, mapping: dict[str, str]):
        for country, continent in mapping.items():
            if continent not in CONTINENTS:
                raise ValueError(f"unknown continent {continent!r} for {country!r}")
        self.mapping = {c.upper(): cont for c, cont in mapping.items()}

    @classmethod
    def load(cls, path: str | None = None) -> "CountryTable":
        """Read the table (``country = continent`` lines); None loads the
        bundled default."""
        if path is None:
            from importlib import resources

            text = resources.files("mesobib").joinpath("data/continents.txt").read_text("utf-8")
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        mapping = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            country, _, continent = line.partition("=")
            mapping[country.strip().upper()] = continent.strip()
        return cls(mapping)

    def continent(self, country: str) -> str:
        return self.mapping.get(country.upper(), UNKNOWN)


@dataclass(frozen=True)
class GeoLabel:
    kind: str  # "single" | "mixed" | "unknown"
    continents: tuple[str, ...]  # 1 or 2 codes, mixed pairs alphabetical

    def __str__(self) -> str:
        if self.kind == "unknown":
            return UNKNOWN
        return "-".join(self.continents)


def cluster_country_counts(info: ClusterInfo, corpus: Corpus) -> dict[str, int]:
    """Country multiset over all records touched by the cluster's members.

    A record shared with another cluster counts fully for both.
    """
    members = set(info.members)
    counts: dict[str, int] = {}
    for rec in corpus.records:
        if members.isdisjoint(rec.authors):
            continue
        for country in rec.countries:
            counts[country] = counts.get(country, 0) + 1
    return counts


def continent_affiliation(counts: dict[str, int], table: CountryTable) -> GeoLabel:
    """Apply the top-country / 50-percent-runner-up rule.

    Countries without a continent mapping cannot carry a label; when none
    of the counted countries is known the label is "unknown". Ties between
    countries are broken by count, then name. Only the second-placed
    country can widen the label to a mixed pair.
    """
    ranked = sorted(
        ((country, n) for country, n in counts.items() if table.continent(country) != UNKNOWN),
        key=lambda item: (-item[1], item[0]),
    )
    if not ranked:
        return GeoLabel(kind="unknown", continents=())
    top_country, top_count = ranked[0]
    top_continent = table.continent(top_country)
    if len(ranked) > 1:
        runner_country, runner_count = ranked[1]
        runner_continent = table.continent(runner_country)
        if 2 * runner_count >= top_count and runner_continent != top_continent:
            pair = tuple(sorted((top_continent, runner_continent)))
            return GeoLabel(kind="mixed", continents=pair)
    return GeoLabel(kind="single", continents=(top_continent,))


# Display classes for the cluster-level network exports: single-continent
# labels draw as circles (Asia green, Europe blue, North America red),
# mixed labels as triangles (Asia-Europe light grey, Asia-NorthAmerica
# dark grey, Europe-NorthAmerica black); everything else stays white.
_SINGLE_COLORS = {"Asia": "green", "Europe": "blue", "NorthAmerica": "red"}
_MIXED_COLORS = {
    ("Asia", "Europe"): "lightgray",
    ("Asia", "NorthAmerica"): "dimgray",
    ("Europe", "NorthAmerica"): "black",
}


def display_style(label: str) -> tuple[str, str]:
    """(shape, color) for a geographic label string."""
    if label == UNKNOWN or not label:
        return "circle", "white"
    parts = tuple(label.split("-"))
    if len(parts) == 1:
        return "circle", _SINGLE_COLORS.get(parts[0], "white")
    return "triangle", _MIXED_COLORS.get(parts, "white")
