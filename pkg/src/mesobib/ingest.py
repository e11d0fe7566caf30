"""Publication record ingestion.

Two readers produce the same in-memory record model:

* :func:`parse_field_tagged` reads field-tagged plain text exports
  (two-letter tags at line start, one record per ``ER``-terminated block).
* :func:`parse_tabular` reads the canonical corpus CSV
  (``record_id,year,authors,countries,n_references`` with semicolon-packed
  list cells); :func:`write_tabular` is its exact inverse.

After parsing, :func:`filter_corpus` applies the record filters (at least
two known authors, more than one cited reference) and :func:`corpus_stats`
summarizes the surviving corpus.
"""

from __future__ import annotations

import csv
import io
import logging
import statistics
from dataclasses import dataclass

log = logging.getLogger(__name__)

TABULAR_COLUMNS = ("record_id", "year", "authors", "countries", "n_references")

ANON_KEY = "ANON"


def author_key(raw: str) -> str:
    """Normalize an author name to its canonical key string.

    Accepted inputs are ``"Surname, Initials"`` (field-tagged exports) and
    ``"SURNAME_INITIALS"`` (the tabular format's own keys). The key is
    ``SURNAME_INITIALS``: surname uppercased with internal whitespace
    collapsed, initials reduced to their letters, concatenated and
    uppercased. A name without a comma or underscore is treated as a bare
    surname (e.g. ``"Anon"``). Normalization is idempotent.
    """
    s = " ".join(raw.replace('"', " ").split())
    if "," in s:
        surname, initials = s.split(",", 1)
    elif "_" in s:
        surname, initials = s.rsplit("_", 1)
    else:
        surname, initials = s, ""
    surname = " ".join(surname.replace("_", " ").split()).upper()
    initials = "".join(ch for ch in initials if ch.isalpha()).upper()
    return f"{surname}_{initials}" if initials else surname


def is_anonymous(key: str) -> bool:
    """True for the placeholder key that marks an unknown author."""
    return key == ANON_KEY


@dataclass(frozen=True)
class PublicationRecord:
    """One paper: id, year, author keys in record order, country multiset."""

    record_id: str
    year: int
    authors: tuple[str, ...]
    countries: tuple[str, ...]
    n_references: int


@dataclass(frozen=True)
class Corpus:
    records: tuple[PublicationRecord, ...]
    time_span: tuple[int, int] | None

    def author_records(self) -> dict[str, set[str]]:
        """Map author key -> ids of records the author appears on."""
        out: dict[str, set[str]] = {}
        for rec in self.records:
            for key in rec.authors:
                out.setdefault(key, set()).add(rec.record_id)
        return out


@dataclass(frozen=True)
class ParseResult:
    records: tuple[PublicationRecord, ...]
    warnings: tuple[str, ...]


@dataclass(frozen=True)
class FilterResult:
    corpus: Corpus
    dropped_author_rule: int
    dropped_reference_rule: int


@dataclass(frozen=True)
class CorpusStats:
    record_count: int
    author_count: int
    mean_authors: float
    median_authors: float


def _dedupe(keys: list[str]) -> tuple[str, ...]:
    return tuple(dict.fromkeys(keys))


# Country-name variants folded to one canonical name. Loaded from
# data/country_aliases.txt by default; callers may pass their own table.
_DEFAULT_ALIASES: dict[str, str] | None = None


def default_country_aliases() -> dict[str, str]:
    global _DEFAULT_ALIASES
    if _DEFAULT_ALIASES is None:
        _DEFAULT_ALIASES = load_country_aliases()
    return dict(_DEFAULT_ALIASES)


def load_country_aliases(path: str | None = None) -> dict[str, str]:
    """Read an alias table: one ``variant = canonical`` pair per line."""
    if path is None:
        from importlib import resources

        text = resources.files("mesobib").joinpath("data/country_aliases.txt").read_text("utf-8")
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    table: dict[str, str] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        variant, _, canonical = line.partition("=")
        table[variant.strip().upper()] = canonical.strip().upper()
    return table


def extract_country(address_line: str, aliases: dict[str, str] | None = None) -> str | None:
    """Country name from an address line: the token after the last comma.

    Trailing periods are dropped and US addresses of the form
    ``"NY 14853 USA"`` collapse to ``USA``. Returns None when the line has
    no usable token.
    """
    if aliases is None:
        aliases = default_country_aliases()
    token = address_line.rsplit(",", 1)[-1].strip().rstrip(".").upper()
    token = " ".join(token.split())
    if not token:
        return None
    if token.endswith(" USA"):
        token = "USA"
    return aliases.get(token, token)


def parse_field_tagged(text: str, aliases: dict[str, str] | None = None) -> ParseResult:
    """Parse field-tagged plain text into publication records.

    Recognized tags: ``AU`` (one author per line, continuation lines
    indented), ``PY`` (year), ``C1`` (address lines, trailing country
    token), ``NR`` (reference count), ``ER`` (end of record). Unknown tags
    are ignored. A block missing PY or AU is skipped and counted as a
    warning; a trailing block without ER is still emitted when complete.
    Record ids are synthesized sequentially (``rec-000001`` ...).
    """
    records: list[PublicationRecord] = []
    warnings: list[str] = []

    authors: list[str] = []
    year: int | None = None
    countries: list[str] = []
    n_refs = 0
    saw_content = False
    tag = ""

    def flush(line_no: int) -> None:
        nonlocal authors, year, countries, n_refs, saw_content, tag
        if saw_content:
            if not authors or year is None:
                warnings.append(f"line {line_no}: record skipped (missing {'AU' if not authors else 'PY'})")
            else:
                records.append(
                    PublicationRecord(
                        record_id=f"rec-{len(records) + 1:06d}",
                        year=year,
                        authors=_dedupe(authors),
                        countries=tuple(sorted(countries)),
                        n_references=n_refs,
                    )
                )
        authors, year, countries, n_refs = [], None, [], 0
        saw_content = False
        tag = ""

    lines = text.splitlines()
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        if line[:1].isspace():
            value = line.strip()  # continuation of the current tag
        else:
            tag, _, value = line.partition(" ")
            tag = tag.strip()
            value = value.strip()
            if tag == "ER":
                flush(line_no)
                continue
        if tag in ("AU", "PY", "C1", "NR"):
            saw_content = True
        if tag == "AU" and value:
            authors.append(author_key(value))
        elif tag == "PY":
            try:
                year = int(value)
            except ValueError:
                year = None
        elif tag == "C1" and value:
            country = extract_country(value, aliases)
            if country is not None:
                countries.append(country)
        elif tag == "NR":
            try:
                n_refs = max(0, int(value))
            except ValueError:
                n_refs = 0
    flush(len(lines))

    if warnings:
        log.warning("field-tagged parse: %d record(s) skipped", len(warnings))
    return ParseResult(records=tuple(records), warnings=tuple(warnings))


def parse_tabular(text: str) -> ParseResult:
    """Parse the canonical corpus CSV.

    Raises ValueError naming the column when a mandatory column is absent.
    Rows with an unparseable year, an unparseable reference count, an empty
    authors cell, or a duplicate record_id are skipped with a warning.
    """
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    for column in TABULAR_COLUMNS:
        if column not in header:
            raise ValueError(f"missing mandatory column: {column}")

    records: list[PublicationRecord] = []
    warnings: list[str] = []
    seen_ids: set[str] = set()
    for row_no, row in enumerate(reader, start=2):
        record_id = (row["record_id"] or "").strip()
        if not record_id:
            warnings.append(f"row {row_no}: skipped (empty record_id)")
            continue
        if record_id in seen_ids:
            warnings.append(f"row {row_no}: skipped (duplicate record_id {record_id})")
            continue
        try:
            year = int(row["year"])
        except (TypeError, ValueError):
            warnings.append(f"row {row_no}: skipped (unparseable year)")
            continue
        try:
            n_refs = int(row["n_references"])
        except (TypeError, ValueError):
            warnings.append(f"row {row_no}: skipped (unparseable n_references)")
            continue
        authors = _dedupe([author_key(a) for a in (row["authors"] or "").split(";") if a.strip()])
        if not authors:
            warnings.append(f"row {row_no}: skipped (no authors)")
            continue
        countries = tuple(sorted(c.strip().upper() for c in (row["countries"] or "").split(";") if c.strip()))
        seen_ids.add(record_id)
        records.append(
            PublicationRecord(
                record_id=record_id,
                year=year,
                authors=authors,
                countries=countries,
                n_references=max(0, n_refs),
            )
        )
    if warnings:
        log.warning("tabular parse: %d row(s) skipped", len(warnings))
    return ParseResult(records=tuple(records), warnings=tuple(warnings))


def write_tabular(records) -> str:
    """Serialize records to the canonical corpus CSV (byte-stable)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TABULAR_COLUMNS)
    for rec in records:
        writer.writerow(
            [
                rec.record_id,
                rec.year,
                ";".join(rec.authors),
                ";".join(sorted(rec.countries)),
                rec.n_references,
            ]
        )
    return buf.getvalue()


def filter_corpus(records) -> FilterResult:
    """Apply the record filters and assemble a corpus.

    A record is dropped when fewer than two distinct known authors remain
    after removing anonymous keys, or when it cites at most one reference.
    Kept records have their anonymous keys removed.
    """
    kept: list[PublicationRecord] = []
    dropped_authors = 0
    dropped_refs = 0
    for rec in records:
        real = tuple(k for k in rec.authors if not is_anonymous(k))
        if len(real) < 2:
            dropped_authors += 1
            continue
        if rec.n_references <= 1:
            dropped_refs += 1
            continue
        if len(real) != len(rec.authors):
            rec = PublicationRecord(rec.record_id, rec.year, real, rec.countries, rec.n_references)
        kept.append(rec)
    span = (min(r.year for r in kept), max(r.year for r in kept)) if kept else None
    return FilterResult(
        corpus=Corpus(records=tuple(kept), time_span=span),
        dropped_author_rule=dropped_authors,
        dropped_reference_rule=dropped_refs,
    )


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Record/author counts and per-paper author count mean and median."""
    if not corpus.records:
        return CorpusStats(0, 0, 0.0, 0.0)
    counts = [len(r.authors) for r in corpus.records]
    authors = {k for r in corpus.records for k in r.authors}
    return CorpusStats(
        record_count=len(corpus.records),
        author_count=len(authors),
        mean_authors=sum(counts) / len(counts),
        median_authors=float(statistics.median(counts)),
    )
