"""Categorical and temporal cluster statistics, and the field report.

Clusters are grouped by size (small <= 10 < medium <= 40 < large) and by
age cohort over three time slices of the corpus span. The module also
holds the plain statistical machinery used throughout the report:
Pearson correlation and the chi-square association test (with its own
regularized-incomplete-gamma survival function, series + continued
fraction, absolute error <= 1e-10).
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field

from .ingest import Corpus


def size_category(n: int) -> str:
    """small (n <= 10), medium (10 < n <= 40) or large (40 < n)."""
    if n < 1:
        raise ValueError("cluster size must be positive")
    if n <= 10:
        return "small"
    if n <= 40:
        return "medium"
    return "large"


SIZE_CATEGORIES = ("small", "medium", "large")


class AgeCohort(enum.Enum):
    CONTINUOUS = "continuous"
    RECENT = "recent"
    NEW = "new"
    EXTINCT = "extinct"


AGE_COHORTS = tuple(c.value for c in AgeCohort)


def age_cohort(activity) -> tuple[AgeCohort, bool]:
    """Cohort of a 3-slice activity vector, plus a gap flag.

    (1,1,1) continuous, (0,1,1) recent, (0,0,1) new, anything inactive in
    the last slice extinct. The pattern (1,0,1) spans the whole period and
    counts as continuous; the returned flag marks the gap.
    """
    activity = tuple(bool(x) for x in activity)
    if len(activity) != 3:
        raise ValueError("age cohorts are defined over exactly 3 time slices")
    if not any(activity):
        raise ValueError("cluster with no activity")
    first, second, third = activity
    if not third:
        return AgeCohort.EXTINCT, False
    if first and second:
        return AgeCohort.CONTINUOUS, False
    if first and not second:
        return AgeCohort.CONTINUOUS, True
    if second:
        return AgeCohort.RECENT, False
    return AgeCohort.NEW, False


def author_years(corpus: Corpus) -> dict[str, set[int]]:
    """Publication years per author over the full (unreduced) corpus."""
    out: dict[str, set[int]] = {}
    for rec in corpus.records:
        for key in rec.authors:
            out.setdefault(key, set()).add(rec.year)
    return out


def cluster_activity(members, years_by_author: dict[str, set[int]], spans) -> tuple[bool, ...]:
    """Per-slice OR of the members' publishing activity."""
    flags = []
    for start, end in spans:
        active = any(
            any(start <= y <= end for y in years_by_author.get(m, ()))
            for m in members
        )
        flags.append(active)
    return tuple(flags)


def pearson_r(x, y) -> float:
    """Product-moment correlation of two equal-length series (n >= 3)."""
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    if len(x) != len(y):
        raise ValueError("series lengths differ")
    if len(x) < 3:
        raise ValueError("need at least 3 points")
    n = len(x)
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    cov = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    vx = math.fsum((a - mx) ** 2 for a in x)
    vy = math.fsum((b - my) ** 2 for b in y)
    if vx == 0.0 or vy == 0.0:
        raise ValueError("degenerate series (zero variance)")
    return cov / math.sqrt(vx * vy)


@dataclass(frozen=True)
class ContingencyTable:
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    def row_totals(self) -> list[int]:
        return [sum(row) for row in self.counts]

    def col_totals(self) -> list[int]:
        return [sum(col) for col in zip(*self.counts)]

    def total(self) -> int:
        return sum(self.row_totals())

    def drop_empty(self) -> "ContingencyTable":
        """Copy without all-zero rows/columns (they carry no information)."""
        keep_rows = [i for i, t in enumerate(self.row_totals()) if t > 0]
        keep_cols = [j for j, t in enumerate(self.col_totals()) if t > 0]
        return ContingencyTable(
            row_labels=tuple(self.row_labels[i] for i in keep_rows),
            col_labels=tuple(self.col_labels[j] for j in keep_cols),
            counts=tuple(tuple(self.counts[i][j] for j in keep_cols) for i in keep_rows),
        )


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    df: int
    p: float


def _gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x) = Gamma(a,x)/Gamma(a)."""
    if a <= 0.0 or x < 0.0:
        raise ValueError("gamma_q needs a > 0 and x >= 0")
    if x == 0.0:
        return 1.0
    log_prefactor = -x + a * math.log(x) - math.lgamma(a)
    if x < a + 1.0:
        # lower-tail series, then complement
        term = 1.0 / a
        total = term
        denom = a
        for _ in range(1000):
            denom += 1.0
            term *= x / denom
            total += term
            if abs(term) < abs(total) * 1e-17:
                break
        return 1.0 - total * math.exp(log_prefactor)
    # modified Lentz continued fraction for the upper tail
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b if b != 0.0 else 1.0 / tiny
    h = d
    for i in range(1, 1000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-17:
            break
    return h * math.exp(log_prefactor)


def chi_square(table: ContingencyTable) -> ChiSquareResult:
    """Pearson chi-square test of independence on a contingency table.

    Expected counts come from the row/column marginals; any zero marginal
    is an error. df = (rows-1)(cols-1); the p-value is the chi-square
    survival function at the statistic.
    """
    rows = len(table.counts)
    cols = len(table.counts[0]) if rows else 0
    if rows < 2 or cols < 2:
        raise ValueError("contingency table must be at least 2x2")
    if any(len(row) != cols for row in table.counts):
        raise ValueError("ragged contingency table")
    if any(c < 0 for row in table.counts for c in row):
        raise ValueError("negative count")
    row_totals = table.row_totals()
    col_totals = table.col_totals()
    if 0 in row_totals or 0 in col_totals:
        raise ValueError("zero marginal; drop empty rows/columns first")
    total = table.total()
    stat = 0.0
    for i in range(rows):
        for j in range(cols):
            expected = row_totals[i] * col_totals[j] / total
            stat += (table.counts[i][j] - expected) ** 2 / expected
    df = (rows - 1) * (cols - 1)
    return ChiSquareResult(statistic=stat, df=df, p=_gamma_q(df / 2.0, stat / 2.0))


def format_p(p: float) -> str:
    """4 significant digits; values below 1e-16 print as '< 1e-16'."""
    if p < 1e-16:
        return "< 1e-16"
    return f"{p:.4g}"


# ---------------------------------------------------------------------------
# field report


@dataclass(frozen=True)
class ClusterRow:
    """One cluster's report-facing properties."""

    cluster_id: int
    size: int
    publications: int
    size_category: str
    hubness: str
    age: str
    age_gap: bool
    geo: str
    collaborating: bool
    in_transfer: bool


@dataclass(frozen=True)
class FieldData:
    """Everything the report needs to know about one field."""

    name: str
    rows: tuple[ClusterRow, ...]
    transfer_links: int
    collaboration_links: int
    role_fractions: dict[str, float] = field(default_factory=dict)
    scalar_stats: dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class ReportRow:
    field: str
    section: str
    label: str
    value: float | int | str


@dataclass
class FieldReport:
    rows: list[ReportRow]
    tables: dict[str, tuple[ContingencyTable, ChiSquareResult | None]]

    def section(self, field_name: str, section: str) -> dict[str, float | int | str]:
        return {r.label: r.value for r in self.rows if r.field == field_name and r.section == section}

    def to_csv(self) -> str:
        # repr keeps full float precision so downstream sums reproduce exactly
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["field", "section", "label", "value"])
        for row in self.rows:
            value = repr(row.value) if isinstance(row.value, float) else str(row.value)
            writer.writerow([row.field, row.section, row.label, value])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = []
        current = None
        for row in self.rows:
            head = (row.field, row.section)
            if head != current:
                if current is not None:
                    lines.append("")
                lines.append(f"[{row.field}] {row.section}")
                current = head
            lines.append(f"  {row.label:<28} {_format_value(row.value)}")
        for name, (table, chi2) in self.tables.items():
            lines.append("")
            lines.append(f"[table] {name}")
            width = max([len(l) for l in table.row_labels] + [12])
            header = " " * (width + 2) + "  ".join(f"{c:>12}" for c in table.col_labels)
            lines.append(header)
            for label, row in zip(table.row_labels, table.counts):
                lines.append(f"  {label:<{width}}" + "  ".join(f"{c:>12}" for c in row))
            if chi2 is not None:
                lines.append(
                    f"  chi2 = {chi2.statistic:.4f}, df = {chi2.df}, p = {format_p(chi2.p)}"
                )
        return "\n".join(lines) + "\n"


def _format_value(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    return f"{value:.10g}"


def _share_rows(field_name: str, section: str, labels, counts: dict[str, int]) -> list[ReportRow]:
    total = sum(counts.get(l, 0) for l in labels)
    if total == 0:
        return [ReportRow(field_name, section, l, 0.0) for l in labels]
    return [ReportRow(field_name, section, l, counts.get(l, 0) / total) for l in labels]


def field_report(fields) -> FieldReport:
    """Assemble the comparative report for one or more fields.

    Per field: the five share rows (size, age cohort, hubness,
    collaboration participation, link type), size percentiles, the
    size-publication correlation, and any scalar stats handed in. Pooled
    over all fields: the association cross-tabulations with chi-square
    tests where the reduced table is still at least 2x2.
    """
    import numpy as np

    hubness_labels = ("no-hub", "single-hub", "multi-hub")
    rows: list[ReportRow] = []

    for fd in fields:
        counts_size: dict[str, int] = {}
        counts_age: dict[str, int] = {}
        counts_hub: dict[str, int] = {}
        counts_collab = {"collaborating": 0, "non-collaborating": 0}
        for cr in fd.rows:
            counts_size[cr.size_category] = counts_size.get(cr.size_category, 0) + 1
            counts_age[cr.age] = counts_age.get(cr.age, 0) + 1
            counts_hub[cr.hubness] = counts_hub.get(cr.hubness, 0) + 1
            counts_collab["collaborating" if cr.collaborating else "non-collaborating"] += 1
        rows += _share_rows(fd.name, "size_share", SIZE_CATEGORIES, counts_size)
        rows += _share_rows(fd.name, "age_share", AGE_COHORTS, counts_age)
        rows += _share_rows(fd.name, "hubness_share", hubness_labels, counts_hub)
        rows += _share_rows(fd.name, "collaboration_participation", ("collaborating", "non-collaborating"), counts_collab)
        rows += _share_rows(
            fd.name,
            "link_type_share",
            ("transfer", "collaboration"),
            {"transfer": fd.transfer_links, "collaboration": fd.collaboration_links},
        )

        sizes = [cr.size for cr in fd.rows]
        if sizes:
            arr = np.array(sizes, dtype=float)
            for label, value in (
                ("min", arr.min()),
                ("p10", np.percentile(arr, 10)),
                ("p25", np.percentile(arr, 25)),
                ("median", np.percentile(arr, 50)),
                ("p75", np.percentile(arr, 75)),
                ("p90", np.percentile(arr, 90)),
                ("max", arr.max()),
            ):
                rows.append(ReportRow(fd.name, "size_percentile", label, float(value)))
        rows.append(ReportRow(fd.name, "summary", "cluster_count", len(fd.rows)))
        if sizes:
            rows.append(ReportRow(fd.name, "summary", "mean_size", float(np.mean(sizes))))
            rows.append(ReportRow(fd.name, "summary", "median_size", float(np.percentile(sizes, 50))))
        pubs = [cr.publications for cr in fd.rows]
        if len(sizes) >= 3 and len(set(sizes)) > 1 and len(set(pubs)) > 1:
            rows.append(ReportRow(fd.name, "summary", "pearson_size_publications", pearson_r(sizes, pubs)))
            if all(v > 0 for v in sizes + pubs):
                rows.append(
                    ReportRow(
                        fd.name,
                        "summary",
                        "pearson_log_size_publications",
                        pearson_r([math.log10(v) for v in sizes], [math.log10(v) for v in pubs]),
                    )
                )
        for label in sorted(fd.scalar_stats):
            rows.append(ReportRow(fd.name, "summary", label, fd.scalar_stats[label]))
        if fd.role_fractions:
            for role in ("R1", "R2", "R3", "R4", "R5", "R6", "R7"):
                rows.append(ReportRow(fd.name, "role_share", role, fd.role_fractions.get(role, 0.0)))

    tables = _association_tables(fields, hubness_labels)
    for name, (table, chi2) in tables.items():
        if chi2 is not None:
            rows.append(ReportRow("all", "association", f"{name}_chi2", chi2.statistic))
            rows.append(ReportRow("all", "association", f"{name}_df", chi2.df))
            rows.append(ReportRow("all", "association", f"{name}_p", format_p(chi2.p)))
    return FieldReport(rows=rows, tables=tables)


def _association_tables(fields, hubness_labels):
    def build(name: str, row_labels, col_labels, cell) -> ContingencyTable:
        counts = tuple(
            tuple(sum(1 for fd in fields for cr in fd.rows if cell(fd, cr) == (r, c)) for c in col_labels)
            for r in row_labels
        )
        return ContingencyTable(tuple(row_labels), tuple(col_labels), counts)

    field_names = [fd.name for fd in fields]
    specs = {
        "size_x_hubness": build(
            "size_x_hubness", SIZE_CATEGORIES, hubness_labels, lambda fd, cr: (cr.size_category, cr.hubness)
        ),
        "field_x_hubness": build(
            "field_x_hubness", field_names, hubness_labels, lambda fd, cr: (fd.name, cr.hubness)
        ),
        "age_of_small_hubless": build(
            "age_of_small_hubless",
            field_names,
            AGE_COHORTS,
            lambda fd, cr: (fd.name, cr.age) if cr.size_category == "small" and cr.hubness == "no-hub" else None,
        ),
        "collaborating_x_size": build(
            "collaborating_x_size",
            ("collaborating", "non-collaborating"),
            SIZE_CATEGORIES,
            lambda fd, cr: ("collaborating" if cr.collaborating else "non-collaborating", cr.size_category),
        ),
        "collaborating_x_age": build(
            "collaborating_x_age",
            ("collaborating", "non-collaborating"),
            AGE_COHORTS,
            lambda fd, cr: ("collaborating" if cr.collaborating else "non-collaborating", cr.age),
        ),
    }
    out: dict[str, tuple[ContingencyTable, ChiSquareResult | None]] = {}
    for name, table in specs.items():
        reduced = table.drop_empty()
        result = None
        if len(reduced.row_labels) >= 2 and len(reduced.col_labels) >= 2:
            result = chi_square(reduced)
        out[name] = (table, result)
    return out
