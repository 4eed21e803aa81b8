import itertools
import random

import pytest

from relmine.analytics import (RelationRow, RelationStore, pairwise_tests,
                               parallel_matrix, parse_month, proportions,
                               saturation_report, timeline, venn_counts)
from relmine.errors import NoDatesError, TooManySetsError


def row(target, partner, category="b", doc="d1", month=None, unit=0):
    return RelationRow(doc_id=doc, target=target, partner=partner,
                       partner_category=category,
                       relation_type=f"p-{category}", evidence_unit=unit,
                       month=month)


def test_parse_month_forms():
    assert parse_month("09.2010") == "09.2010"
    assert parse_month("10-2012") == "10.2012"
    assert parse_month("15 janvier 1992") == "01.1992"
    assert parse_month("12 octobre 2010") == "10.2010"
    assert parse_month("août 2011") == "08.2011"
    assert parse_month("15-03-2011") == "03.2011"
    assert parse_month("pas une date") is None
    assert parse_month(None) is None


def test_timeline_hand_counted():
    store = RelationStore([
        row("colza", "mildiou", "m", month="10.2010"),
        row("colza", "mildiou", "m", month="10.2010", doc="d2"),
        row("colza", "mildiou", "m", month="11.2010", doc="d3"),
    ])
    assert timeline(store, "colza:mildiou") == [("10.2010", 2), ("11.2010", 1)]


def test_timeline_zero_fills_gaps():
    store = RelationStore([
        row("colza", "mildiou", "m", month="10.2010"),
        row("colza", "mildiou", "m", month="01.2011"),
    ])
    bins = timeline(store, "colza:mildiou")
    assert bins == [("10.2010", 1), ("11.2010", 0), ("12.2010", 0), ("01.2011", 1)]


def test_timeline_range_restricts_bins():
    store = RelationStore([
        row("colza", "mildiou", "m", month="08.2010"),
        row("colza", "mildiou", "m", month="10.2010"),
        row("colza", "mildiou", "m", month="03.2011"),
    ])
    bins = timeline(store, "colza:mildiou", ("09.2010", "02.2011"))
    assert [b for b, _ in bins] == ["09.2010", "10.2010", "11.2010", "12.2010",
                                    "01.2011", "02.2011"]
    assert dict(bins)["10.2010"] == 1


def test_timeline_no_dates():
    with pytest.raises(NoDatesError):
        timeline(RelationStore([]), "colza:mildiou")
    with pytest.raises(NoDatesError):
        timeline(RelationStore([row("colza", "mildiou")]), "colza:mildiou")


def test_proportions_hand_counted():
    store = RelationStore(
        [row("blé", "mouche du chou")] * 3 + [row("blé", "puceron")])
    (result,) = proportions(store, ["blé"], ["mouche du chou", "puceron"])
    assert result.shares == {"mouche du chou": 0.75, "puceron": 0.25}
    assert not result.flagged
    assert abs(sum(result.shares.values()) - 1.0) < 1e-9


def test_proportions_zero_row_flagged():
    store = RelationStore([row("blé", "mouche du chou")])
    rows = proportions(store, ["blé", "colza"], ["mouche du chou", "puceron"])
    assert rows[0].flagged is False
    assert rows[1].flagged is True and rows[1].shares == {}


def test_venn_forced_two_sets():
    store = RelationStore([
        row("A", "shared"), row("B", "shared"),
        row("A", "only-a"), row("B", "only-b"),
    ])
    regions = venn_counts(store, ["A", "B"], ["b"])
    assert regions == {("A",): 1, ("B",): 1, ("A", "B"): 1}


def test_venn_limits():
    store = RelationStore([row("A", "x")])
    with pytest.raises(TooManySetsError):
        venn_counts(store, ["A", "B", "C", "D", "E"], ["b"])
    with pytest.raises(ValueError):
        venn_counts(store, ["A"], ["b"])


def venn_oracle(store, targets, categories):
    partner_sets = {
        t: {(r.partner, r.partner_category) for r in store.rows
            if r.target == t and r.partner_category in categories}
        for t in targets
    }
    regions = {}
    for size in range(1, len(targets) + 1):
        for subset in itertools.combinations(targets, size):
            inside = set.intersection(*(partner_sets[t] for t in subset))
            outside = set.union(set(), *(partner_sets[t] for t in targets
                                         if t not in subset))
            count = len(inside - outside)
            if count:
                regions[subset] = count
    return regions


def test_proportions_over_frequency_filtered_targets():
    # targets restricted to canonicals occurring more than twice
    store = RelationStore(
        [row("blé", "mouche du chou")] * 4
        + [row("maïs", "puceron")] * 3
        + [row("tournesol", "puceron")]  # too rare, filtered out
    )
    targets = [t for t, n in store.target_counts().items() if n > 2]
    assert targets == ["blé", "maïs"]
    rows = proportions(store, targets, ["mouche du chou", "puceron"])
    assert [r.target for r in rows] == ["blé", "maïs"]
    assert rows[0].shares["mouche du chou"] == 1.0
    assert rows[1].shares["puceron"] == 1.0


def test_venn_three_crop_targets_over_two_categories():
    store = RelationStore([
        row("blé", "puceron", "b"), row("blé", "mildiou", "m"),
        row("orge de printemps", "puceron", "b"),
        row("tournesol", "mildiou", "m"), row("tournesol", "taupin", "b"),
        row("blé", "Bourgogne", "r"),  # outside the requested categories
    ])
    regions = venn_counts(store, ["blé", "orge de printemps", "tournesol"],
                          ["b", "m"])
    assert regions == {
        ("tournesol",): 1,
        ("blé", "orge de printemps"): 1,
        ("blé", "tournesol"): 1,
    }


def test_venn_matches_powerset_oracle_and_partitions():
    rng = random.Random(21)
    targets = ["t1", "t2", "t3", "t4"]
    rows = []
    for _ in range(120):
        rows.append(row(rng.choice(targets), f"p{rng.randint(0, 15)}",
                        rng.choice("bm")))
    store = RelationStore(rows)
    for k in (2, 3, 4):
        chosen = targets[:k]
        regions = venn_counts(store, chosen, ["b", "m"])
        assert regions == venn_oracle(store, chosen, {"b", "m"})
        all_partners = {(r.partner, r.partner_category) for r in store.rows
                        if r.target in chosen and r.partner_category in "bm"}
        assert sum(regions.values()) == len(all_partners)


def test_parallel_matrix_counts_and_zero_column():
    store = RelationStore([
        row("colza", "mouche du chou", month="09.2010", doc="da"),
        row("colza", "mouche du chou", month="09.2010", doc="da"),
        row("colza", "mildiou", "m", month="10.2010", doc="db"),
    ])
    rows, columns = parallel_matrix(store, "colza",
                                    ["mouche du chou", "mildiou", "absent"])
    assert columns == ["mouche du chou", "mildiou", "absent"]
    assert [(doc, month) for doc, month, _ in rows] == \
        [("da", "09.2010"), ("db", "10.2010")]
    counts_da = rows[0][2]
    assert counts_da == {"mouche du chou": 2, "mildiou": 0, "absent": 0}
    # row sums equal a linear scan over the listed partners
    for doc_id, _, counts in rows:
        expected = sum(1 for r in store.rows
                       if r.doc_id == doc_id and r.target == "colza"
                       and r.partner in columns)
        assert sum(counts.values()) == expected


def test_store_indexes_agree_with_linear_scan():
    rng = random.Random(8)
    rows = [row(f"t{rng.randint(0, 3)}", f"p{rng.randint(0, 5)}",
                rng.choice("bm"), doc=f"d{rng.randint(0, 4)}")
            for _ in range(200)]
    store = RelationStore(rows)
    for target in {r.target for r in rows}:
        assert store.target_rows(target) == [r for r in rows if r.target == target]
        for partner in {r.partner for r in rows}:
            assert store.pair_rows(target, partner) == \
                [r for r in rows if r.target == target and r.partner == partner]


def dated_rows(target, partner, months):
    return [row(target, partner, month=m, doc=f"{partner}{i}")
            for i, m in enumerate(months)]


def test_pairwise_tests_identical_series():
    months = ["01.2011", "01.2011", "03.2011", "04.2011", "04.2011", "06.2011"]
    store = RelationStore(dated_rows("blé", "adventice", months) +
                          dated_rows("blé", "limace des jardins", months))
    results = pairwise_tests(store, "blé", "b")
    assert len(results) == 1
    result = results[0]
    assert result.pair == "blé:adventice/blé:limace des jardins"
    assert result.p_values["KOLMOGOROV"] == 1.0
    assert result.statistics["STUDENT"] == 0.0
    assert saturation_report(results) == ["blé:adventice/blé:limace des jardins"]


def test_pairwise_results_sorted_and_saturation_threshold():
    months_a = ["01.2011", "02.2011", "02.2011", "04.2011"]
    months_b = ["01.2011", "01.2011", "03.2011", "04.2011"]
    months_c = ["02.2011", "03.2011", "03.2011", "05.2011"]
    store = RelationStore(dated_rows("blé", "thrips", months_a) +
                          dated_rows("blé", "pyrale", months_b) +
                          dated_rows("blé", "cicadelle", months_c))
    results = pairwise_tests(store, "blé", "b")
    assert [r.pair for r in results] == sorted(r.pair for r in results)
    assert len(results) == 3
    excluded = [r.pair for r in results
                if any(p < 1.0 for p in r.p_values.values())]
    assert set(saturation_report(results)).isdisjoint(excluded)


def test_pairwise_insufficient_data_recorded():
    store = RelationStore(dated_rows("blé", "thrips", ["01.2011"]) +
                          dated_rows("blé", "pyrale", ["01.2011"]))
    results = pairwise_tests(store, "blé", "b")
    assert len(results) == 1
    assert results[0].note == "insufficient data"
    assert results[0].p_values == {}
    assert saturation_report(results) == []
