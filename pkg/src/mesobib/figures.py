"""Matplotlib renderings of the report tables.

The report stage writes these alongside its delimited output; every
figure is derived from data that is also available in CSV form, so the
plots are a convenience, not a data surface.
"""

from __future__ import annotations

import os
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

_SECTION_ORDER = (
    ("size_share", "cluster size"),
    ("age_share", "age cohort"),
    ("hubness_share", "hubness"),
    ("collaboration_participation", "collaboration participation"),
    ("link_type_share", "link type"),
)

_AGE_MARKERS = {"continuous": "o", "recent": "D", "new": "^", "extinct": "x"}


def _save(fig, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp.png")
    fig.savefig(tmp, dpi=150, metadata={"Software": "mesobib"})
    plt.close(fig)
    os.replace(tmp, path)


def save_growth_figure(points, path: Path) -> None:
    years = [p.slice_end for p in points]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(years, [p.author_count for p in points], "o-", color="tab:blue")
    ax.set_xlabel("year (cumulative)")
    ax.set_ylabel("authors in reduced network", color="tab:blue")
    ax2 = ax.twinx()
    ax2.plot(years, [p.giant_fraction for p in points], "s--", color="tab:red")
    ax2.set_ylabel("giant component fraction", color="tab:red")
    ax2.set_ylim(0, 1.05)
    ax.set_title("Cumulative network growth")
    fig.tight_layout()
    _save(fig, path)


def save_role_figure(fractions: dict[str, float], path: Path) -> None:
    roles = ["R1", "R2", "R3", "R4", "R5", "R6", "R7"]
    values = [fractions.get(r, 0.0) for r in roles]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(roles, values, color="gray", edgecolor="black")
    ax.set_ylabel("fraction of nodes")
    ax.set_title("Node role distribution")
    fig.tight_layout()
    _save(fig, path)


def save_share_figure(report, field_name: str, path: Path) -> None:
    """Horizontal stacked bars, one per share section of the report."""
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ys = []
    names = []
    for row_idx, (section, label) in enumerate(reversed(_SECTION_ORDER)):
        shares = report.section(field_name, section)
        left = 0.0
        for i, (share_label, value) in enumerate(shares.items()):
            if not isinstance(value, (int, float)):
                continue
            ax.barh(row_idx, value, left=left, color=plt.cm.Greys(0.25 + 0.18 * i), edgecolor="black")
            if value > 0.04:
                ax.text(left + value / 2, row_idx, f"{share_label}\n{value:.0%}", ha="center", va="center", fontsize=7)
            left += value
        ys.append(row_idx)
        names.append(label)
    ax.set_yticks(ys)
    ax.set_yticklabels(names)
    ax.set_xlim(0, 1)
    ax.set_xlabel("share")
    ax.set_title(f"Cluster population properties ({field_name})")
    fig.tight_layout()
    _save(fig, path)


def save_size_publications_figure(rows, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    for age, marker in _AGE_MARKERS.items():
        xs = [r.size for r in rows if r.age == age]
        ys = [r.publications for r in rows if r.age == age]
        if xs:
            ax.scatter(xs, ys, marker=marker, label=age, alpha=0.7)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("cluster size (authors)")
    ax.set_ylabel("publications")
    ax.set_title("Cluster size vs publication output")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def render_report_figures(out_dir: Path, report, growth, rows, field_name: str) -> list[Path]:
    out_dir = Path(out_dir)
    paths = []
    if growth:
        target = out_dir / "growth_curve.png"
        save_growth_figure(growth, target)
        paths.append(target)
    roles = {k: v for k, v in report.section(field_name, "role_share").items() if isinstance(v, float)}
    if roles:
        target = out_dir / "role_distribution.png"
        save_role_figure(roles, target)
        paths.append(target)
    target = out_dir / "cluster_properties.png"
    save_share_figure(report, field_name, target)
    paths.append(target)
    if rows:
        target = out_dir / "size_vs_publications.png"
        save_size_publications_figure(rows, target)
        paths.append(target)
    return paths
