"""Acceptance criteria, one test per criterion.

Each test prints a PASS line on success (visible with pytest -s). Criteria
with a runtime budget assert it.
"""

import glob
import math
import random
import re
import time
from collections import Counter

import numpy as np
import pytest
from scipy import stats as sps

from relmine.cli import main as cli_main
from relmine.corpus import SegmentationConfig, ingest_text, segment
from relmine.grammar import match_at, scan
from relmine.lexicon import (compile_matcher, load_dictionary, parse_dictionary,
                             serialize_dictionary)
from relmine.metrics import (GoldCorpus, GoldEntity, GoldFormat, MatchPolicy,
                             f_measure, mentions_to_tagged, parse_tagged_tokens,
                             score)
from relmine.ner import EntityMention, MentionSource, extract_entities
from relmine.relate import (INFINITE, CoocConfig, CoocMode, cooc_constrained,
                            cooc_window, extract_contextual, extract_relations,
                            marker_positions)
from relmine.stattests import ks_two_sample, welch_t, wilcoxon_rank_sum
from relmine.textnorm import fold

from conftest import data_path


def ok(number, text):
    print(f"\nACCEPTANCE {number}: PASS - {text}")


def mention(doc, category, start, end, canonical):
    return EntityMention(doc_id=doc.doc_id, category=category, canonical=canonical,
                         surface=doc.surface_span(start, end), start_word=start,
                         end_word=end, source=MentionSource.DICTIONARY)


def test_criterion_1_metric_formulas():
    started = time.perf_counter()
    assert abs(f_measure(96.46, 95.52, 1.0) - 95.98) <= 0.01

    rng = random.Random(101)
    for _ in range(50):
        possible = rng.randint(1, 40)
        produced = rng.randint(1, 40)
        correct = rng.randint(0, min(possible, produced))
        beta = rng.choice([0.5, 1.0, 2.0])
        gold = GoldCorpus()
        for i in range(possible):
            gold.add_entity("d", GoldEntity(category="X", value=f"g{i}"))
        predicted = [
            EntityMention(doc_id="d", category="X", canonical=f"g{i}",
                          surface="", start_word=i, end_word=i,
                          source=MentionSource.DICTIONARY)
            for i in range(correct)
        ] + [
            EntityMention(doc_id="d", category="X", canonical=f"wrong{i}",
                          surface="", start_word=100 + i, end_word=100 + i,
                          source=MentionSource.DICTIONARY)
            for i in range(produced - correct)
        ]
        report = score(gold, predicted, MatchPolicy.CANONICAL_SET, beta=beta)
        precision = 100.0 * correct / produced
        recall = 100.0 * correct / possible
        if precision == 0 and recall == 0:
            expected_f = 0.0
        else:
            expected_f = ((beta * beta + 1) * precision * recall
                          / (beta * beta * recall + precision))
        assert math.isclose(report.total.precision, precision, abs_tol=1e-9)
        assert math.isclose(report.total.recall, recall, abs_tol=1e-9)
        assert math.isclose(report.total.f1, expected_f, abs_tol=1e-9)
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    ok(1, f"F formula matches the reference value and 50 random triples ({elapsed:.2f}s)")


def test_criterion_2_cooccurrence_oracle_equivalence():
    started = time.perf_counter()
    rng = random.Random(202)
    grid = [0, 2, 7, 25, INFINITE]

    def random_case():
        n = rng.randint(10, 200)
        words = [rng.choice(["w", "x", "entre", "avec", "y"]) for _ in range(n)]
        doc = ingest_text(" ".join(words).encode(), "syn")
        mentions = []
        for _ in range(rng.randint(0, 20)):
            start = rng.randrange(n)
            end = min(n - 1, start + rng.randint(0, 2))
            category = rng.choice(["p", "m", "b"])
            mentions.append(mention(doc, category, start, end,
                                    f"{category}-{start}-{end}"))
        return doc, mentions

    def eq2(mentions, wl, wr):
        out = set()
        for i, t in enumerate(mentions):
            if t.category != "p":
                continue
            for j, p in enumerate(mentions):
                if i == j or p.category not in ("m", "b"):
                    continue
                if (t.start_word - wl) <= p.start_word <= (t.start_word + wr):
                    out.add((t.span, p.span, p.category))
        return out

    def keys(rels):
        return {(r.first.span, r.second.span, r.second.category) for r in rels}

    for _ in range(100):
        doc, mentions = random_case()
        for wl in grid:
            for wr in grid:
                cfg = CoocConfig(mode=CoocMode.WINDOW, target_category="p",
                                 partner_categories=["m", "b"],
                                 window_left=wl, window_right=wr)
                assert keys(cooc_window(doc, mentions, cfg)) == eq2(mentions, wl, wr)

        wl, wr = rng.choice(grid), rng.choice(grid)
        ccfg = CoocConfig(mode=CoocMode.CONSTRAINED, target_category="p",
                          partner_categories=["m", "b"], markers=["entre", "avec"],
                          window_left=wl, window_right=wr,
                          constrained_scope=CoocMode.WINDOW)
        marks = marker_positions(doc, ["entre", "avec"])
        expected = set()
        for first_span, second_span, category in eq2(mentions, wl, wr):
            pi, pj = first_span[0], second_span[0]
            for pk in marks:
                if min(pi, pj) < pk < max(pi, pj) and abs(pi - pk) <= abs(pi - pj):
                    expected.add((first_span, second_span, category))
                    break
        assert keys(cooc_constrained(doc, mentions, ccfg)) == expected
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    ok(2, f"window and constrained cooccurrence equal brute-force oracles ({elapsed:.2f}s)")


def test_criterion_3_heuristic_filtering(matcher, grammar_set):
    with open(data_path("bsv", "bsv_2011_03_centre.txt"), "rb") as handle:
        doc = ingest_text(handle.read(), "bsv3")
    cfg = SegmentationConfig(header_line_count=10, main_entity_category="p",
                             avoid_start_phrases=["Raisonner la lutte contre"])
    doc = segment(doc, cfg, matcher)
    mentions = extract_entities(doc, matcher, grammar_set)
    base = dict(mode=CoocMode.TEXT_UNIT, target_category="p",
                partner_categories=["m", "b"], h1=True)

    pairs_h3 = {(r.first.canonical, r.second.canonical)
                for r in extract_relations(doc, mentions, CoocConfig(h3=True, **base))}
    assert pairs_h3 == {("céréale", "piétin échaudage"),
                        ("colza", "grosse altise"), ("colza", "mildiou")}

    pairs_no_h3 = {(r.first.canonical, r.second.canonical)
                   for r in extract_relations(doc, mentions, CoocConfig(h3=False, **base))}
    assert pairs_no_h3 == pairs_h3 | {("céréale", "taupin")}
    ok(3, "avoid block yields nothing under h3 and the false pair without it")


def test_criterion_4_contextual_triple(matcher, grammar_set):
    with open(data_path("contextual", "contextual_colza.txt"), "rb") as handle:
        doc = ingest_text(handle.read(), "ctx")
    doc = segment(doc, SegmentationConfig(header_line_count=0,
                                          main_entity_category="p"), matcher)
    triples = {(t.first.surface, t.second.surface, t.context["damage"])
               for t in extract_contextual(doc, ["p", "m", "damage"],
                                           matcher, grammar_set)}
    assert triples == {("Colza", "Charançon de la tige du colza",
                        "nuisibilité est élevée")}
    assert not any("mouche" in second.lower() for _, second, _ in triples)
    ok(4, "exactly the expected ternary relation is emitted")


def test_criterion_5_longest_match_and_resolution():
    crops = parse_dictionary([
        "blé:N:blé:BLE:blés:Triticum:blé dur:blé tendre:",
        "blé dur:L:BLE DUR:T. durum:Triticum durum:bles durs:blés durs:blé dur:",
    ], "p")
    matcher = compile_matcher([crops])
    doc = ingest_text("semis de blé dur en plaine".encode(), "d")
    mentions = extract_entities(doc, matcher, None)
    assert [(m.canonical, m.span) for m in mentions] == [("blé dur", (2, 3))]

    rng = random.Random(505)
    alphabet = ["a", "b", "c", "d", "e"]
    for _ in range(1000):
        entries = []
        for i in range(rng.randint(1, 4)):
            length = rng.randint(1, 3)
            base = [rng.choice(alphabet) for _ in range(length)]
            variants = {" ".join(base)}
            if length > 1 and rng.random() < 0.7:
                variants.add(" ".join(base[: rng.randint(1, length - 1)]))
            entries.append(f"e{i}:L:" + ":".join(sorted(variants)) + ":")
        dictionary = parse_dictionary(entries, "p")
        doc = ingest_text(" ".join(rng.choice(alphabet) for _ in range(30)).encode(), "r")
        resolved = extract_entities(doc, compile_matcher([dictionary]), None)
        spans = [m.span for m in resolved]
        for s, e in spans:
            assert not any(os <= s and e <= oe and (os, oe) != (s, e)
                           for os, oe in spans)
    ok(5, "nested variants collapse to the maximal mention in 1000 random cases")


def test_criterion_6_grammar_engine(grammar_set):
    for text, length in (("15 janvier 1992", 3), ("10-2012", 3)):
        tokens = ingest_text(text.encode(), "d").tokens
        hit = match_at(grammar_set, "date", tokens, 0)
        assert hit is not None and hit[0] == length - 1

    doc = ingest_text("Stades : 90 à 100% de couverture du sol .".encode(), "s")
    hit = match_at(grammar_set, "stage", doc.tokens, 0)
    assert hit is not None and hit[0] == len(doc.tokens) - 1
    (capture,) = hit[1]
    assert (capture.open_tag, capture.close_tag) == ("<STA>", "</STA>")
    assert doc.surface_span(capture.start_word, capture.end_word) == \
        "90 à 100 % de couverture du sol"

    rng = random.Random(606)
    words = ["stade", "stades", "janvier", "mars", "de", "sol", "à", "risque",
             "élevée", "15", "90", "0,27", "1992", ".", ";", ":", "-", "%",
             "infestations", "larves", "pied", "w"]
    for _ in range(100):
        doc = ingest_text(" ".join(rng.choice(words)
                                   for _ in range(rng.randint(1, 30))).encode(), "r")
        got = {(m.category, m.start_word, m.end_word) for m in scan(grammar_set, doc)}
        expected = set()
        for entry, category in grammar_set.entry_points:
            pos = 0
            while pos < len(doc.tokens):
                hit = match_at(grammar_set, entry, doc.tokens, pos)
                if hit is None:
                    pos += 1
                    continue
                expected.add((category, pos, hit[0]))
                pos = hit[0] + 1
        assert got == expected
    ok(6, "date/stage grammars accept the reference strings; scan matches the oracle")


def test_criterion_7_romeo_run():
    started = time.perf_counter()
    characters = load_dictionary(data_path("dictionaries", "characters.dic"),
                                 "character")
    assert len(characters.entries) == 22
    scenes = load_dictionary(data_path("dictionaries", "scenes.dic"), "scene")
    matcher = compile_matcher([characters, scenes])
    speaker_re = re.compile(r"^([A-Z][A-Z' ]+)\.$")

    pair_counts = Counter()
    total_scenes = 0
    for path in sorted(glob.glob(data_path("romeo") + "/act*.txt")):
        with open(path, "rb") as handle:
            raw = handle.read()
        doc_id = path.rsplit("/", 1)[-1][:-4]
        doc = segment(ingest_text(raw, doc_id),
                      SegmentationConfig(header_line_count=0,
                                         main_entity_category="scene"), matcher)
        total_scenes += sum(1 for u in doc.text_units if u.kind.value == "section")
        mentions = extract_entities(doc, matcher, None)

        gold_speakers = {fold(m.group(1))
                         for line in raw.decode().split("\n")
                         if (m := speaker_re.match(line.strip()))}
        extracted = {fold(m.surface) for m in mentions if m.category == "character"}
        assert gold_speakers <= extracted  # recall 100%

        cfg = CoocConfig(mode=CoocMode.TEXT_UNIT, target_category="character",
                         partner_categories=["character"], h1=False, h3=True)
        for rel in extract_relations(doc, mentions, cfg):
            if rel.first.canonical != rel.second.canonical:
                pair_counts[frozenset((rel.first.canonical, rel.second.canonical))] += 1

    assert total_scenes == 24
    top3 = [pair for pair, _ in pair_counts.most_common(3)]
    assert frozenset(("Romeo", "Juliet")) in top3
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0
    ok(7, f"22-character run: full speaker recall, Romeo-Juliet in top 3 ({elapsed:.2f}s)")


def _permutation_pvalues(x, y, seed, n_resamples=10_000):
    """Label-permutation two-sided p-values for the three statistics."""
    rng = np.random.default_rng(seed)
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    n1, n2 = len(x), len(y)
    n = n1 + n2
    pooled = np.concatenate([x, y])
    perms = rng.permuted(np.tile(pooled, (n_resamples, 1)), axis=1)
    a, b = perms[:, :n1], perms[:, n1:]

    va = a.var(axis=1, ddof=1) / n1
    vb = b.var(axis=1, ddof=1) / n2
    with np.errstate(divide="ignore", invalid="ignore"):
        t_perm = np.abs(a.mean(axis=1) - b.mean(axis=1)) / np.sqrt(va + vb)
    t_perm = np.nan_to_num(t_perm)

    ranks = sps.rankdata(perms, axis=1)
    w_perm = np.abs(ranks[:, :n1].sum(axis=1) - n1 * (n + 1) / 2)

    order = np.argsort(perms, axis=1, kind="stable")
    srt = np.take_along_axis(perms, order, axis=1)
    from_x = order < n1
    gap = np.abs(np.cumsum(from_x, axis=1) / n1 - np.cumsum(~from_x, axis=1) / n2)
    boundary = np.ones_like(gap, dtype=bool)
    boundary[:, :-1] = srt[:, 1:] != srt[:, :-1]
    d_perm = np.where(boundary, gap, 0.0).max(axis=1)

    d_obs, _ = ks_two_sample(x, y)
    t_obs, _ = welch_t(x, y)
    ranks_obs = sps.rankdata(pooled)
    w_obs = abs(ranks_obs[:n1].sum() - n1 * (n + 1) / 2)

    def pval(stat_perm, stat_obs):
        return (1 + int(np.sum(stat_perm >= stat_obs - 1e-12))) / (n_resamples + 1)

    return {
        "KOLMOGOROV": pval(d_perm, d_obs),
        "WILCOXON": pval(w_perm, w_obs),
        "STUDENT": pval(t_perm, abs(t_obs)),
    }


def test_criterion_8_statistical_tests():
    series = [4, 7, 2, 9, 5, 5, 8, 1, 6, 3, 7, 4]
    d, p_ks = ks_two_sample(series, series)
    assert d == 0.0 and p_ks == 1.0
    t, _ = welch_t(series, series)
    assert t == 0.0

    rng = np.random.default_rng(808)
    worst = {"KOLMOGOROV": 0.0, "WILCOXON": 0.0, "STUDENT": 0.0}
    for case in range(50):
        n = 48
        lam1 = rng.uniform(8.0, 40.0)
        lam2 = lam1 * rng.uniform(1.0, 1.25)
        x = rng.poisson(lam1, n)
        y = rng.poisson(lam2, n)
        computed = {
            "KOLMOGOROV": ks_two_sample(x, y)[1],
            "WILCOXON": wilcoxon_rank_sum(x, y)[1],
            "STUDENT": welch_t(x, y)[1],
        }
        oracle = _permutation_pvalues(x, y, seed=900 + case)
        for name in computed:
            gap = abs(computed[name] - oracle[name])
            worst[name] = max(worst[name], gap)
            assert gap <= 0.03, (name, case, computed[name], oracle[name])
    ok(8, "p-values within 0.03 of 10k-resample permutation oracle "
          + ", ".join(f"{k}:{v:.3f}" for k, v in worst.items()))


def test_criterion_9_determinism_and_round_trips(tmp_path):
    args = lambda out: [
        "relate", "--corpus", data_path("bsv"),
        "--dict", f"p={data_path('dictionaries', 'crops.dic')}",
        "--dict", f"m={data_path('dictionaries', 'diseases.dic')}",
        "--dict", f"b={data_path('dictionaries', 'pests.dic')}",
        "--dict", f"r={data_path('dictionaries', 'regions.dic')}",
        "--grammar", data_path("grammars", "date.gmr"),
        "--grammar", data_path("grammars", "stage.gmr"),
        "--grammar", data_path("grammars", "damage.gmr"),
        "--main-category", "p", "--avoid-start", "Raisonner la lutte contre",
        "--target", "p", "--partners", "m,b", "--h2", "--header-cats", "r,date",
        "--out", str(out),
    ]
    assert cli_main(args(tmp_path / "r1")) == 0
    assert cli_main(args(tmp_path / "r2")) == 0
    for name in ("relations.csv", "relations.json"):
        with open(tmp_path / "r1" / name, "rb") as f1, \
                open(tmp_path / "r2" / name, "rb") as f2:
            assert f1.read() == f2.read()

    for dic_path in sorted(glob.glob(data_path("dictionaries") + "/*.dic")):
        with open(dic_path, encoding="utf-8") as handle:
            first = parse_dictionary(handle, "x")
        second = parse_dictionary(serialize_dictionary(first), "x")
        assert second.entries == first.entries

    surfaces = ["le", "blé", "souffre", "du", "piétin", "échaudage", "ici"]
    mentions = [
        EntityMention(doc_id="d", category="p", canonical="blé", surface="blé",
                      start_word=1, end_word=1, source=MentionSource.DICTIONARY),
        EntityMention(doc_id="d", category="m", canonical="piétin échaudage",
                      surface="piétin échaudage", start_word=4, end_word=5,
                      source=MentionSource.DICTIONARY),
    ]
    for scheme in (GoldFormat.BIO, GoldFormat.BILOU):
        lines = mentions_to_tagged(mentions, len(surfaces), surfaces, scheme)
        spans = parse_tagged_tokens("\n".join(lines) + "\n", scheme)
        assert {(c, s) for c, _, s in spans} == {("p", (1, 1)), ("m", (4, 5))}
    ok(9, "byte-identical reruns; dictionary and BIO/BILOU round trips lossless")
