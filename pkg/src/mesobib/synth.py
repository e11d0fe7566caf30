"""Synthetic corpora with planted ground truth.

Generated corpora replay deterministically from the spec seed. Each group
becomes an internally dense co-author cluster in which every author has at
least two papers (so nobody falls to the single-paper reduction);
migration events share one author between two groups' papers (a
single-author cut, hence a transfer link), collaboration events write
joint papers with three or more authors per side (a wide bridge, hence a
collaboration link), optionally including both group leaders to plant a
direct PI-PI edge.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

from .ingest import Corpus, PublicationRecord

DEFAULT_COUNTRIES = (
    "USA",
    "GERMANY",
    "CHINA",
    "JAPAN",
    "FRANCE",
    "ENGLAND",
    "SOUTH KOREA",
    "CANADA",
    "ITALY",
    "NETHERLANDS",
)


@dataclass(frozen=True)
class GroupSpec:
    name: str
    size: int
    structure: str = "star"  # star | multihub | hubless
    country: str | None = None
    active: tuple[int, int] | None = None  # publishing window, default: full span


@dataclass(frozen=True)
class MigrationSpec:
    source: str
    target: str
    target_coauthors: int = 2
    papers: int = 1


@dataclass(frozen=True)
class CollaborationSpec:
    a: str
    b: str
    pi_edge: bool = True
    side_authors: int = 3
    papers: int = 1


@dataclass(frozen=True)
class PlantedSpec:
    groups: tuple[GroupSpec, ...]
    migrations: tuple[MigrationSpec, ...] = ()
    collaborations: tuple[CollaborationSpec, ...] = ()
    years: tuple[int, int] = (1991, 2008)
    seed: int = 0


@dataclass(frozen=True)
class PlantedEvent:
    kind: str  # migration | collaboration
    groups: tuple[str, str]
    expected_link_type: str
    pi_edge: bool | None = None
    migrant: str | None = None


@dataclass(frozen=True)
class GroundTruth:
    membership: dict[str, str]  # author key -> group name
    pis: dict[str, str]  # group name -> PI key
    events: tuple[PlantedEvent, ...]

    def to_json(self) -> str:
        payload = {
            "membership": dict(sorted(self.membership.items())),
            "pis": dict(sorted(self.pis.items())),
            "events": [
                {
                    "kind": e.kind,
                    "groups": list(e.groups),
                    "expected_link_type": e.expected_link_type,
                    "pi_edge": e.pi_edge,
                    "migrant": e.migrant,
                }
                for e in self.events
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "GroundTruth":
        payload = json.loads(text)
        events = tuple(
            PlantedEvent(
                kind=e["kind"],
                groups=tuple(e["groups"]),
                expected_link_type=e["expected_link_type"],
                pi_edge=e.get("pi_edge"),
                migrant=e.get("migrant"),
            )
            for e in payload["events"]
        )
        return cls(membership=payload["membership"], pis=payload["pis"], events=events)


def _validate(spec: PlantedSpec) -> dict[str, GroupSpec]:
    groups = {}
    for g in spec.groups:
        name = g.name.upper()
        if not name.isalnum():
            raise ValueError(f"group name {g.name!r} must be alphanumeric")
        if name in groups:
            raise ValueError(f"duplicate group name {g.name!r}")
        if g.size < 3:
            raise ValueError(f"group {g.name!r}: size must be >= 3")
        if g.structure not in ("star", "multihub", "hubless"):
            raise ValueError(f"group {g.name!r}: unknown structure {g.structure!r}")
        groups[name] = g
    seen_pairs = set()
    for event in list(spec.migrations) + list(spec.collaborations):
        names = (
            (event.source, event.target) if isinstance(event, MigrationSpec) else (event.a, event.b)
        )
        for n in names:
            if n.upper() not in groups:
                raise ValueError(f"event references missing group {n!r}")
        if names[0].upper() == names[1].upper():
            raise ValueError(f"event connects group {names[0]!r} to itself")
        pair = tuple(sorted(n.upper() for n in names))
        if pair in seen_pairs:
            raise ValueError(f"two events share the group pair {pair}")
        seen_pairs.add(pair)
    for c in spec.collaborations:
        if c.side_authors < 3:
            raise ValueError("collaboration events need side_authors >= 3")
        for name in (c.a, c.b):
            g = groups[name.upper()]
            need = c.side_authors if c.pi_edge else c.side_authors + 1
            if g.size < need:
                raise ValueError(f"group {name!r} too small for a {c.side_authors}-a-side collaboration")
    for m in spec.migrations:
        if m.target_coauthors < 1:
            raise ValueError("migration events need target_coauthors >= 1")
        if groups[m.target.upper()].size < m.target_coauthors + 1:
            raise ValueError(f"group {m.target!r} too small for the migration event")
    return groups


def _spread_years(count: int, window: tuple[int, int]) -> list[int]:
    """Deterministic paper years covering both ends of the window."""
    start, end = window
    if count == 1:
        return [start]
    span = end - start
    return [start + round(i * span / (count - 1)) for i in range(count)]


def _chunks(items: list[str], rng: random.Random, lo: int = 2, hi: int = 3) -> list[list[str]]:
    out = []
    i = 0
    while i < len(items):
        take = rng.randint(lo, hi)
        if len(items) - i - take == 1:  # never strand a single leftover
            take += 1
        out.append(items[i : i + take])
        i += take
    return out


def generate(spec: PlantedSpec) -> tuple[Corpus, GroundTruth]:
    """Produce the corpus and its planted ground truth."""
    groups = _validate(spec)
    rng = random.Random(spec.seed)
    membership: dict[str, str] = {}
    pis: dict[str, str] = {}
    members: dict[str, list[str]] = {}
    country_of: dict[str, str | None] = {}

    for name, g in groups.items():
        keys = [f"{name}{i:03d}" for i in range(g.size)]
        members[name] = keys
        pis[name] = keys[0]
        for key in keys:
            membership[key] = name
            country_of[key] = g.country.upper() if g.country else None

    papers: list[tuple[list[str], tuple[int, int]]] = []  # (authors, year window)

    for name, g in groups.items():
        window = g.active or spec.years
        keys = members[name]
        group_papers: list[list[str]] = []
        if g.structure == "star":
            pi = keys[0]
            # three coverage rounds keep the group much denser than any
            # planted bridge, and give the PI a dominant paper count
            for _ in range(3):
                rest = keys[1:]
                rng.shuffle(rest)
                for chunk in _chunks(rest, rng):
                    group_papers.append([pi] + chunk)
        elif g.structure == "multihub":
            hubs = keys[: max(2, min(3, g.size // 5))]
            rest_pool = keys[len(hubs) :]
            group_papers.append(list(hubs))  # ties the hubs together
            for _ in range(3):
                rest = list(rest_pool)
                rng.shuffle(rest)
                for j, chunk in enumerate(_chunks(rest, rng)):
                    group_papers.append([hubs[j % len(hubs)]] + chunk)
        else:  # hubless: two ring passes of pair/triple papers, no dominant node
            n = len(keys)
            for i in range(n):
                group_papers.append([keys[i], keys[(i + 1) % n]])
                group_papers.append([keys[i], keys[(i + 2) % n], keys[(i + 4) % n]])
        # The leader must hold a strictly dominant paper count (it is the
        # operational PI downstream). Repeat-pair papers raise its count
        # without adding internal edges, so hubless groups stay hubless.
        if g.structure != "star":
            partners = [keys[1], keys[2], keys[-1]] if g.structure == "hubless" else keys[1:3]
            for j in range(5):
                group_papers.append([keys[0], partners[j % len(partners)]])
        years = _spread_years(len(group_papers), window)
        for authors, year in zip(group_papers, years):
            papers.append((authors, (year, year)))

    events: list[PlantedEvent] = []
    for m in spec.migrations:
        source, target = m.source.upper(), m.target.upper()
        migrant = rng.choice(members[source][1:])
        for _ in range(m.papers):
            partners = rng.sample(members[target], m.target_coauthors)
            papers.append(([migrant] + partners, _overlap(groups, source, target, spec.years)))
        events.append(
            PlantedEvent(
                kind="migration",
                groups=(source, target),
                expected_link_type="transfer",
                migrant=migrant,
            )
        )
    for c in spec.collaborations:
        a, b = c.a.upper(), c.b.upper()
        side = {}
        for name in (a, b):
            pool = members[name]
            if c.pi_edge:
                side[name] = [pis[name]] + rng.sample(pool[1:], c.side_authors - 1)
            else:
                side[name] = rng.sample(pool[1:], c.side_authors)
        for _ in range(c.papers):
            papers.append((side[a] + side[b], _overlap(groups, a, b, spec.years)))
        events.append(
            PlantedEvent(
                kind="collaboration",
                groups=(a, b),
                expected_link_type="collaboration",
                pi_edge=c.pi_edge,
            )
        )

    records = []
    for i, (authors, window) in enumerate(papers, start=1):
        year = window[0] if window[0] == window[1] else rng.randint(window[0], window[1])
        countries = sorted(c for c in (country_of[k] for k in authors) if c)
        records.append(
            PublicationRecord(
                record_id=f"p{i:06d}",
                year=year,
                authors=tuple(dict.fromkeys(authors)),
                countries=tuple(countries),
                n_references=rng.randint(5, 40),
            )
        )
    corpus = Corpus(records=tuple(records), time_span=spec.years)
    truth = GroundTruth(membership=membership, pis=pis, events=tuple(events))
    return corpus, truth


def _overlap(groups, a: str, b: str, default: tuple[int, int]) -> tuple[int, int]:
    wa = groups[a].active or default
    wb = groups[b].active or default
    lo, hi = max(wa[0], wb[0]), min(wa[1], wb[1])
    return (lo, hi) if lo <= hi else default


# ---------------------------------------------------------------------------
# quick spec construction (used by the CLI and the test fixtures)


def build_spec(
    groups: int = 10,
    group_size: int = 12,
    structure: str = "star",
    migrations: int = 0,
    collaborations_with_pi_edge: int = 0,
    collaborations_without_pi_edge: int = 0,
    years: tuple[int, int] = (1991, 2008),
    seed: int = 0,
    countries=DEFAULT_COUNTRIES,
) -> PlantedSpec:
    """Assemble a PlantedSpec from scalar knobs.

    Groups are named G001..; ``structure`` may be star, multihub, hubless
    or mixed (alternating star/hubless). Event group pairs are drawn
    without replacement from all unordered pairs, seeded.
    """
    rng = random.Random(seed)
    structures = {
        "star": ["star"],
        "multihub": ["multihub"],
        "hubless": ["hubless"],
        "mixed": ["star", "hubless"],
    }[structure]
    group_specs = tuple(
        GroupSpec(
            name=f"G{i + 1:03d}",
            size=group_size,
            structure=structures[i % len(structures)],
            country=countries[i % len(countries)] if countries else None,
        )
        for i in range(groups)
    )
    names = [g.name for g in group_specs]
    pairs = [(names[i], names[j]) for i in range(len(names)) for j in range(i + 1, len(names))]
    needed = migrations + collaborations_with_pi_edge + collaborations_without_pi_edge
    if needed > len(pairs):
        raise ValueError(f"{needed} events need {needed} distinct group pairs, only {len(pairs)} exist")
    rng.shuffle(pairs)
    chosen = pairs[:needed]
    migration_specs = tuple(MigrationSpec(source=a, target=b) for a, b in chosen[:migrations])
    rest = chosen[migrations:]
    collab_specs = tuple(
        CollaborationSpec(a=a, b=b, pi_edge=(i < collaborations_with_pi_edge))
        for i, (a, b) in enumerate(rest)
    )
    return PlantedSpec(
        groups=group_specs,
        migrations=migration_specs,
        collaborations=collab_specs,
        years=years,
        seed=seed,
    )


SPEC_KEYS = (
    "groups",
    "group_size",
    "structure",
    "migrations",
    "collaborations_with_pi_edge",
    "collaborations_without_pi_edge",
    "years",
    "seed",
)


def parse_spec_file(text: str, seed_override: int | None = None) -> PlantedSpec:
    """Flat key=value spec file -> PlantedSpec (unknown keys rejected)."""
    values: dict[str, str] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in SPEC_KEYS:
            raise ValueError(f"line {line_no}: expected '<key> = <value>' with key in {SPEC_KEYS}")
        values[key] = value.strip()
    kwargs: dict = {}
    for key, value in values.items():
        if key == "structure":
            kwargs[key] = value
        elif key == "years":
            lo, _, hi = value.partition("-")
            kwargs[key] = (int(lo), int(hi))
        else:
            kwargs[key] = int(value)
    if seed_override is not None:
        kwargs["seed"] = seed_override
    return build_spec(**kwargs)
