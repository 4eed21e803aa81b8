"""Plot-ready aggregates over extracted relations.

A RelationStore indexes corpus-level relation rows by target, pair and
partner category. Every operation returns plain data (bins, shares, region
counts, matrices, test results) suitable for delimited export or external
rendering. Dates ride in from relation context and are normalized to
calendar months.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .errors import NoDatesError, TooManySetsError
from .stattests import ks_two_sample, welch_t, wilcoxon_rank_sum
from .textnorm import fold

_FRENCH_MONTHS = {
    "janvier": 1, "fevrier": 2, "mars": 3, "avril": 4, "mai": 5, "juin": 6,
    "juillet": 7, "aout": 8, "septembre": 9, "octobre": 10,
    "novembre": 11, "decembre": 12,
}

_NUMERIC_MY = re.compile(r"(\d{1,2})[.\-/](\d{4})\Z")
_NUMERIC_DMY = re.compile(r"\d{1,2}[.\-/](\d{1,2})[.\-/](\d{4})\Z")


def parse_month(value: str | None) -> str | None:
    """Normalize a date expression to "MM.YYYY", or None if unparseable.

    Accepts numeric month-year ("10.2012", "10-2012"), numeric
    day-month-year, and French "15 janvier 1992" / "janvier 1992" forms.
    """
    if not value:
        return None
    text = fold(value.strip())
    m = _NUMERIC_MY.match(text)
    if m and 1 <= int(m.group(1)) <= 12:
        return f"{int(m.group(1)):02d}.{m.group(2)}"
    m = _NUMERIC_DMY.match(text)
    if m and 1 <= int(m.group(1)) <= 12:
        return f"{int(m.group(1)):02d}.{m.group(2)}"
    parts = text.replace(",", " ").split()
    for i, part in enumerate(parts):
        if part in _FRENCH_MONTHS and i + 1 < len(parts) and re.fullmatch(r"\d{4}", parts[i + 1]):
            return f"{_FRENCH_MONTHS[part]:02d}.{parts[i + 1]}"
    return None


def month_index(label: str) -> int:
    month, year = label.split(".")
    return int(year) * 12 + int(month) - 1


def month_label(index: int) -> str:
    return f"{index % 12 + 1:02d}.{index // 12}"


@dataclass(frozen=True)
class RelationRow:
    doc_id: str
    target: str
    partner: str
    partner_category: str
    relation_type: str
    evidence_unit: int | None = None
    month: str | None = None
    context: dict[str, str] = field(default_factory=dict)


class RelationStore:
    """Read-only indexed view over corpus relation rows."""

    def __init__(self, rows: list[RelationRow]):
        self.rows = list(rows)
        self._by_target: dict[str, list[RelationRow]] = {}
        self._by_pair: dict[tuple[str, str], list[RelationRow]] = {}
        for row in self.rows:
            self._by_target.setdefault(row.target, []).append(row)
            self._by_pair.setdefault((row.target, row.partner), []).append(row)

    @classmethod
    def from_relations(cls, relations, date_context_key: str = "date") -> "RelationStore":
        rows = []
        for rel in relations:
            rows.append(RelationRow(
                doc_id=rel.doc_id,
                target=rel.first.canonical,
                partner=rel.second.canonical,
                partner_category=rel.second.category,
                relation_type=rel.relation_type,
                evidence_unit=rel.evidence_unit,
                month=parse_month(rel.context.get(date_context_key)),
                context=dict(rel.context)))
        return cls(rows)

    def target_rows(self, target: str) -> list[RelationRow]:
        return list(self._by_target.get(target, []))

    def pair_rows(self, target: str, partner: str) -> list[RelationRow]:
        return list(self._by_pair.get((target, partner), []))

    def partners_of(self, target: str, categories=None) -> list[tuple[str, str]]:
        """Distinct (partner, partner_category), sorted."""
        found = {
            (row.partner, row.partner_category)
            for row in self._by_target.get(target, [])
            if categories is None or row.partner_category in categories
        }
        return sorted(found)

    def target_counts(self) -> dict[str, int]:
        """Occurrence count per target canonical, for frequency filtering."""
        return {target: len(rows) for target, rows in sorted(self._by_target.items())}


def _monthly_counts(rows) -> dict[int, int]:
    counts: dict[int, int] = {}
    for row in rows:
        if row.month is not None:
            idx = month_index(row.month)
            counts[idx] = counts.get(idx, 0) + 1
    return counts


def timeline(store: RelationStore, relation_key: str,
             time_range: tuple[str, str] | None = None) -> list[tuple[str, int]]:
    """Monthly occurrence bins for a "target:partner" key, zero-filled."""
    target, _, partner = relation_key.partition(":")
    if not partner:
        raise ValueError('relation key must look like "target:partner"')
    counts = _monthly_counts(store.pair_rows(target, partner))
    if not counts:
        raise NoDatesError(f"no dated rows for {relation_key!r}")
    if time_range is not None:
        low, high = month_index(time_range[0]), month_index(time_range[1])
        if low > high:
            raise ValueError("time range is reversed")
    else:
        low, high = min(counts), max(counts)
    return [(month_label(i), counts.get(i, 0)) for i in range(low, high + 1)]


@dataclass(frozen=True)
class ProportionRow:
    target: str
    shares: dict[str, float]
    total: int
    flagged: bool  # True when the target has no counts over the listed partners


def proportions(store: RelationStore, targets: list[str],
                partners: list[str]) -> list[ProportionRow]:
    """Per target, the share of each listed partner among listed partners."""
    if not targets or not partners:
        raise ValueError("targets and partners must be non-empty")
    out = []
    for target in targets:
        counts = {p: len(store.pair_rows(target, p)) for p in partners}
        total = sum(counts.values())
        if total == 0:
            out.append(ProportionRow(target=target, shares={}, total=0, flagged=True))
        else:
            shares = {p: c / total for p, c in counts.items()}
            out.append(ProportionRow(target=target, shares=shares, total=total,
                                     flagged=False))
    return out


def venn_counts(store: RelationStore, targets: list[str],
                partner_categories: list[str]) -> dict[tuple[str, ...], int]:
    """Exclusive region counts of distinct partners across 2-4 target sets."""
    if len(targets) > 4:
        raise TooManySetsError(f"at most 4 targets, got {len(targets)}")
    if len(targets) < 2:
        raise ValueError("venn needs at least 2 targets")
    partner_sets = {
        t: set(store.partners_of(t, set(partner_categories))) for t in targets
    }
    all_partners = set().union(*partner_sets.values())
    regions: dict[tuple[str, ...], int] = {}
    for partner in all_partners:
        members = tuple(t for t in targets if partner in partner_sets[t])
        regions[members] = regions.get(members, 0) + 1
    return dict(sorted(regions.items(), key=lambda kv: (len(kv[0]), kv[0])))


def parallel_matrix(store: RelationStore, e1: str, e2: list[str],
                    time_range: tuple[str, str] | None = None):
    """One row per dated document containing ``e1``: per-partner counts.

    Returns (rows, columns) where each row is (doc_id, month, counts dict).
    """
    if not e2:
        raise ValueError("e2 must be non-empty")
    bounds = None
    if time_range is not None:
        bounds = (month_index(time_range[0]), month_index(time_range[1]))
    docs: dict[str, str] = {}
    for row in store.target_rows(e1):
        if row.month is None:
            continue
        if bounds is not None and not bounds[0] <= month_index(row.month) <= bounds[1]:
            continue
        docs.setdefault(row.doc_id, row.month)
    rows = []
    for doc_id in sorted(docs, key=lambda d: (month_index(docs[d]), d)):
        counts = {
            partner: sum(1 for r in store.pair_rows(e1, partner) if r.doc_id == doc_id)
            for partner in e2
        }
        rows.append((doc_id, docs[doc_id], counts))
    return rows, list(e2)


TEST_NAMES = ("KOLMOGOROV", "WILCOXON", "STUDENT")
# reserved in exports, never computed: the fourth test of the original
# report format is not specified anywhere we can implement from
RESERVED_TESTS = ("GROWTHCURVES",)


@dataclass(frozen=True)
class TestResult:
    pair: str
    p_values: dict[str, float]
    statistics: dict[str, float]
    note: str | None = None


def _pair_series(store: RelationStore, target: str, a: str, b: str):
    counts_a = _monthly_counts(store.pair_rows(target, a))
    counts_b = _monthly_counts(store.pair_rows(target, b))
    if not counts_a or not counts_b:
        return None
    low = min(min(counts_a), min(counts_b))
    high = max(max(counts_a), max(counts_b))
    series_a = [counts_a.get(i, 0) for i in range(low, high + 1)]
    series_b = [counts_b.get(i, 0) for i in range(low, high + 1)]
    return series_a, series_b


def pairwise_tests(store: RelationStore, target: str,
                   partner_category: str) -> list[TestResult]:
    """All three tests for every unordered partner pair of one category.

    Series are monthly relation counts over the union date span of the
    pair, zero-filled. Pairs with fewer than two months of span are
    reported with a note instead of p-values.
    """
    partners = [p for p, _cat in store.partners_of(target, {partner_category})]
    results: list[TestResult] = []
    for i, a in enumerate(partners):
        for b in partners[i + 1 :]:
            label = f"{target}:{a}/{target}:{b}"
            series = _pair_series(store, target, a, b)
            if series is None or len(series[0]) < 2:
                results.append(TestResult(pair=label, p_values={}, statistics={},
                                          note="insufficient data"))
                continue
            xs, ys = series
            d, p_ks = ks_two_sample(xs, ys)
            z, p_w = wilcoxon_rank_sum(xs, ys)
            t, p_t = welch_t(xs, ys)
            results.append(TestResult(
                pair=label,
                p_values={"KOLMOGOROV": p_ks, "WILCOXON": p_w, "STUDENT": p_t},
                statistics={"KOLMOGOROV": d, "WILCOXON": z, "STUDENT": t}))
    results.sort(key=lambda r: r.pair)
    return results


def saturation_report(results: list[TestResult], threshold: float = 1.0) -> list[str]:
    """Pair labels whose every computed p-value reaches the threshold."""
    out = [
        r.pair for r in results
        if r.p_values and all(p >= threshold for p in r.p_values.values())
    ]
    return sorted(out)
