"""Optional matplotlib rendering of the analytics tables.

The delimited tables stay the canonical outputs; these helpers draw the
same data to an image file when the CLI is given a --figure path. The Agg
backend is forced so rendering works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _finish(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def save_timeline_figure(bins, path: str, title: str = "") -> None:
    periods = [p for p, _ in bins]
    counts = [c for _, c in bins]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.45 * len(bins)), 3.2))
    ax.bar(range(len(bins)), counts, color="#4878a8")
    ax.set_xticks(range(len(bins)))
    ax.set_xticklabels(periods, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("relations")
    if title:
        ax.set_title(title)
    _finish(fig, path)


def save_proportions_figure(rows, partners, path: str) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 0.6 * max(len(rows), 2) + 1.5))
    targets = [r.target for r in rows]
    left = [0.0] * len(rows)
    for partner in partners:
        widths = [r.shares.get(partner, 0.0) for r in rows]
        ax.barh(targets, widths, left=left, label=partner)
        left = [l + w for l, w in zip(left, widths)]
    ax.set_xlim(0, 1)
    ax.set_xlabel("share")
    ax.legend(fontsize=8)
    _finish(fig, path)


def save_venn_figure(regions, targets, path: str) -> None:
    """Two or three sets as overlapping circles, otherwise a region bar chart."""
    if len(targets) in (2, 3):
        centers = {2: [(-0.5, 0.0), (0.5, 0.0)],
                   3: [(-0.5, -0.3), (0.5, -0.3), (0.0, 0.6)]}[len(targets)]
        label_pos = _venn_label_positions(targets, centers)
        fig, ax = plt.subplots(figsize=(5.0, 4.5))
        for (x, y), name in zip(centers, targets):
            ax.add_patch(plt.Circle((x, y), 0.95, fill=False, lw=1.5))
            ax.annotate(name, (x, y + 1.05), ha="center", fontsize=9)
        for members, count in regions.items():
            x, y = label_pos[members]
            ax.annotate(str(count), (x, y), ha="center", va="center", fontsize=10)
        ax.set_xlim(-2.0, 2.0)
        ax.set_ylim(-1.8, 2.0)
        ax.set_aspect("equal")
        ax.axis("off")
        _finish(fig, path)
        return
    fig, ax = plt.subplots(figsize=(6.0, 3.2))
    labels = ["&".join(m) for m in regions]
    ax.bar(range(len(regions)), list(regions.values()), color="#4878a8")
    ax.set_xticks(range(len(regions)))
    ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("distinct partners")
    _finish(fig, path)


def _venn_label_positions(targets, centers):
    """Region label coordinates: average of member centers, pushed outward
    for singletons so counts do not collide in the overlap zone."""
    positions = {}
    by_name = dict(zip(targets, centers))
    for size in range(1, len(targets) + 1):
        from itertools import combinations

        for members in combinations(targets, size):
            xs = [by_name[m][0] for m in members]
            ys = [by_name[m][1] for m in members]
            x, y = sum(xs) / len(xs), sum(ys) / len(ys)
            if size == 1:
                x, y = x * 1.5, y * 1.5 - (0.1 if len(targets) == 2 else 0.0)
            positions[members] = (x, y)
    return positions


def save_parallel_figure(rows, partners, path: str) -> None:
    fig, ax = plt.subplots(figsize=(max(4.0, 1.4 * len(partners)), 3.6))
    xs = range(len(partners))
    for doc_id, _month, counts in rows:
        ax.plot(xs, [counts[p] for p in partners], marker="o", alpha=0.6,
                label=doc_id)
    ax.set_xticks(list(xs))
    ax.set_xticklabels(partners, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("occurrences")
    if rows and len(rows) <= 8:
        ax.legend(fontsize=7)
    _finish(fig, path)


def save_tests_figure(results, path: str) -> None:
    computed = [r for r in results if r.p_values]
    names = ("KOLMOGOROV", "WILCOXON", "STUDENT")
    fig, ax = plt.subplots(figsize=(max(4.0, 0.9 * len(computed)), 3.6))
    width = 0.27
    for offset, name in enumerate(names):
        xs = [i + (offset - 1) * width for i in range(len(computed))]
        ax.bar(xs, [r.p_values[name] for r in computed], width=width, label=name)
    ax.set_xticks(range(len(computed)))
    ax.set_xticklabels([r.pair for r in computed], rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("p-value")
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=8)
    _finish(fig, path)
