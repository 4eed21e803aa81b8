"""Command-line front-end.

Subcommands: extract, relate, eval, stats, dict-stats. Flags can also come
from a JSON config file (--config); explicit flags win. All outputs are
deterministic: identical config and corpus give byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import analytics, formats, plots
from .corpus import ParagraphSplit, SegmentationConfig
from .errors import RelmineError
from .lexicon import load_dictionary, stats as dict_stats
from .metrics import (GoldFormat, MatchPolicy, format_report_table, load_gold,
                      score)
from .pipeline import Resources, load_resources, run_extract, run_relate
from .relate import INFINITE, CoocConfig, CoocMode

log = logging.getLogger("relmine")


def _split_csv(value: str | None) -> list[str]:
    if not value:
        return []
    return [item.strip() for item in value.split(",") if item.strip()]


def _parse_bound(value) -> float:
    if value is None:
        return INFINITE
    text = str(value).strip().lower()
    if text in ("inf", "infinite"):
        return INFINITE
    return int(text)


def _parse_dict_specs(specs) -> list[tuple[str, str]]:
    out = []
    for spec in specs or []:
        if "=" not in spec:
            raise RelmineError(f"--dict expects <category>=<path>, got {spec!r}")
        category, path = spec.split("=", 1)
        out.append((category, path))
    categories = [c for c, _ in out]
    if len(set(categories)) != len(categories):
        raise RelmineError("category tags must be unique per run")
    return out


def _resource_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", required=True, help="directory of .txt documents")
    parser.add_argument("--dict", action="append", default=[], metavar="CAT=PATH",
                        help="dictionary file for a category (repeatable)")
    parser.add_argument("--grammar", action="append", default=[], metavar="PATH",
                        help="grammar file (repeatable)")
    parser.add_argument("--header-lines", type=int, default=10)
    parser.add_argument("--main-category", default=None,
                        help="category whose line-initial matches open sections")
    parser.add_argument("--avoid-start", action="append", default=[],
                        help="phrase opening an avoid block (repeatable)")
    parser.add_argument("--avoid-end", action="append", default=[],
                        help="phrase closing an avoid block (repeatable)")
    parser.add_argument("--paragraph-split", default="blank-line",
                        choices=[p.value for p in ParagraphSplit])
    parser.add_argument("--lossy-decode", action="store_true",
                        help="replace undecodable bytes instead of failing")


def _build_resources(args) -> Resources:
    seg = SegmentationConfig(
        header_line_count=args.header_lines,
        main_entity_category=args.main_category,
        avoid_start_phrases=list(args.avoid_start),
        avoid_end_phrases=list(args.avoid_end),
        paragraph_split=ParagraphSplit(args.paragraph_split))
    return load_resources(_parse_dict_specs(args.dict), list(args.grammar), seg,
                          lossy_decode=args.lossy_decode)


def _write(path: str, text: str) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)


def _emit(text: str, out: str | None) -> None:
    if out:
        _write(out, text)
    else:
        sys.stdout.write(text)


def cmd_extract(args) -> int:
    resources = _build_resources(args)
    result = run_extract(args.corpus, resources, jobs=args.jobs)
    if not result.documents and not result.failures:
        log.warning("corpus %s contains no documents", args.corpus)
    out_dir = args.out or "."
    if args.format in ("csv", "both"):
        _write(os.path.join(out_dir, "mentions.csv"),
               formats.mentions_to_csv(result.mentions))
        for doc in result.documents:
            doc_mentions = [m for m in result.mentions if m.doc_id == doc.doc_id]
            _write(os.path.join(out_dir, "mentions", f"{doc.doc_id}.csv"),
                   formats.mentions_to_csv(doc_mentions))
    if args.format in ("json", "both"):
        _write(os.path.join(out_dir, "mentions.json"),
               formats.mentions_to_json(result.mentions))
    for path, error in result.failures:
        log.warning("failed: %s (%s)", path, error)
    return 0


def cmd_relate(args) -> int:
    resources = _build_resources(args)
    result = run_extract(args.corpus, resources, jobs=args.jobs)
    contextual = _split_csv(args.contextual) or None
    cfg = CoocConfig(
        mode=CoocMode(args.mode),
        target_category=args.target or "",
        partner_categories=_split_csv(args.partners),
        window_left=_parse_bound(args.wl),
        window_right=_parse_bound(args.wr),
        markers=_split_csv(args.markers),
        h1=args.h1, h2=args.h2, h3=args.h3,
        header_categories=_split_csv(args.header_cats),
        constrained_scope=CoocMode(args.constrained_scope))
    if contextual is None and not cfg.target_category:
        raise RelmineError("--target is required unless --contextual is used")
    relations = run_relate(result, cfg, contextual, resources)
    out_dir = args.out or "."
    if args.format in ("csv", "both"):
        _write(os.path.join(out_dir, "relations.csv"),
               formats.relations_to_csv(relations))
    if args.format in ("json", "both"):
        _write(os.path.join(out_dir, "relations.json"),
               formats.relations_to_json(relations))
    return 0


def cmd_eval(args) -> int:
    policy = MatchPolicy(args.policy)
    gold = load_gold(args.gold, GoldFormat(args.gold_format))
    if policy is MatchPolicy.ORDERED_PAIR_CANONICAL:
        predicted = formats.relation_rows_from_file(args.pred)
    else:
        predicted = formats.load_mentions(args.pred)
    report = score(gold, predicted, policy, beta=args.beta, average=args.average)
    if args.format == "table":
        _emit(format_report_table(report) + "\n", args.out)
    elif args.format == "csv":
        _emit(formats.report_to_csv(report), args.out)
    else:
        _emit(formats.report_to_json(report), args.out)
    return 0


def cmd_stats(args) -> int:
    store = analytics.RelationStore(formats.relation_rows_from_file(args.relations))
    time_range = None
    if args.time_from or args.time_to:
        if not (args.time_from and args.time_to):
            raise RelmineError("--from and --to must be given together")
        time_range = (args.time_from, args.time_to)

    if args.stats_command == "timeline":
        bins = analytics.timeline(store, args.key, time_range)
        header, rows = formats.timeline_table(bins)
        if args.figure:
            plots.save_timeline_figure(bins, args.figure, title=args.key)
    elif args.stats_command == "prop":
        targets, partners = _split_csv(args.targets), _split_csv(args.partners)
        prop_rows = analytics.proportions(store, targets, partners)
        header, rows = formats.proportions_table(prop_rows, partners)
        if args.figure:
            plots.save_proportions_figure(prop_rows, partners, args.figure)
    elif args.stats_command == "venn":
        targets = _split_csv(args.targets)
        regions = analytics.venn_counts(store, targets, _split_csv(args.cats))
        header, rows = formats.venn_table(regions)
        if args.figure:
            plots.save_venn_figure(regions, targets, args.figure)
    elif args.stats_command == "parallel":
        partners = _split_csv(args.e2)
        matrix_rows, columns = analytics.parallel_matrix(store, args.e1, partners,
                                                         time_range)
        header, rows = formats.parallel_table(matrix_rows, columns)
        if args.figure:
            plots.save_parallel_figure(matrix_rows, columns, args.figure)
    elif args.stats_command == "test":
        results = analytics.pairwise_tests(store, args.target, args.cat)
        header, rows = formats.tests_table(results)
        if args.figure:
            plots.save_tests_figure(results, args.figure)
    elif args.stats_command == "saturation":
        results = analytics.pairwise_tests(store, args.target, args.cat)
        labels = analytics.saturation_report(results, threshold=args.threshold)
        header, rows = formats.saturation_table(labels)
    else:  # pragma: no cover - argparse enforces choices
        raise RelmineError(f"unknown stats subcommand {args.stats_command!r}")

    if args.format == "json":
        _emit(formats.table_to_json(header, rows), args.out)
    else:
        _emit(formats.table_to_csv(header, rows), args.out)
    return 0


def cmd_dict_stats(args) -> int:
    dictionaries = [load_dictionary(path, category)
                    for category, path in _parse_dict_specs(args.dict)]
    rows = dict_stats(dictionaries)
    header = ["category", "entries", "leafs", "concepts", "lexemes"]
    body = [[r.category, r.entries, r.leafs, r.concepts, r.lexemes] for r in rows]
    if args.format == "json":
        _emit(formats.table_to_json(header, body), args.out)
    elif args.format == "csv":
        _emit(formats.table_to_csv(header, body), args.out)
    else:
        widths = [max(len(str(x)) for x in [h, *[row[i] for row in body]])
                  for i, h in enumerate(header)]
        lines = ["  ".join(str(h).ljust(w) for h, w in zip(header, widths))]
        for row in body:
            lines.append("  ".join(str(x).ljust(w) for x, w in zip(row, widths)))
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relmine",
        description="entity and relation extraction over text corpora")
    parser.add_argument("--config", default=None,
                        help="JSON file of flag defaults; explicit flags override")
    sub = parser.add_subparsers(dest="command", required=True)

    p_extract = sub.add_parser("extract", help="extract entity mentions")
    _resource_args(p_extract)
    p_extract.add_argument("--out", default=None)
    p_extract.add_argument("--jobs", type=int, default=1)
    p_extract.add_argument("--format", default="both", choices=["csv", "json", "both"])
    p_extract.set_defaults(func=cmd_extract)

    p_relate = sub.add_parser("relate", help="extract relations")
    _resource_args(p_relate)
    p_relate.add_argument("--out", default=None)
    p_relate.add_argument("--jobs", type=int, default=1)
    p_relate.add_argument("--format", default="both", choices=["csv", "json", "both"])
    p_relate.add_argument("--mode", default="text-unit",
                          choices=[m.value for m in CoocMode])
    p_relate.add_argument("--target", default=None)
    p_relate.add_argument("--partners", default=None, help="comma-separated categories")
    p_relate.add_argument("--wl", default=None, help="left window bound or 'inf'")
    p_relate.add_argument("--wr", default=None, help="right window bound or 'inf'")
    p_relate.add_argument("--markers", default=None, help="comma-separated markers")
    p_relate.add_argument("--h1", action=argparse.BooleanOptionalAction, default=True)
    p_relate.add_argument("--h2", action=argparse.BooleanOptionalAction, default=False)
    p_relate.add_argument("--h3", action=argparse.BooleanOptionalAction, default=True)
    p_relate.add_argument("--header-cats", default=None,
                          help="categories attached document-wide from the header")
    p_relate.add_argument("--constrained-scope", default="window",
                          choices=["text-unit", "window"])
    p_relate.add_argument("--contextual", default=None, metavar="T1,T2,T3",
                          help="ternary contextual extraction on three categories")
    p_relate.set_defaults(func=cmd_relate)

    p_eval = sub.add_parser("eval", help="score predictions against gold")
    p_eval.add_argument("--gold", required=True)
    p_eval.add_argument("--gold-format", default="csv",
                        choices=[f.value for f in GoldFormat])
    p_eval.add_argument("--pred", required=True)
    p_eval.add_argument("--policy", default="canonical-set",
                        choices=[p.value for p in MatchPolicy])
    p_eval.add_argument("--beta", type=float, default=1.0)
    p_eval.add_argument("--average", default="micro", choices=["micro", "macro"])
    p_eval.add_argument("--format", default="table", choices=["table", "csv", "json"])
    p_eval.add_argument("--out", default=None)
    p_eval.set_defaults(func=cmd_eval)

    p_stats = sub.add_parser("stats", help="analytics over a relation export")
    stats_sub = p_stats.add_subparsers(dest="stats_command", required=True)
    for name in ("timeline", "prop", "venn", "parallel", "test", "saturation"):
        p = stats_sub.add_parser(name)
        p.add_argument("--relations", required=True,
                       help="relations.json or relations.csv from a relate run")
        p.add_argument("--out", default=None)
        p.add_argument("--format", default="csv", choices=["csv", "json"])
        p.add_argument("--figure", default=None,
                       help="also render the table to this image file")
        p.add_argument("--from", dest="time_from", default=None, metavar="MM.YYYY")
        p.add_argument("--to", dest="time_to", default=None, metavar="MM.YYYY")
        if name == "timeline":
            p.add_argument("--key", required=True, help='"target:partner"')
        elif name == "prop":
            p.add_argument("--targets", required=True)
            p.add_argument("--partners", required=True)
        elif name == "venn":
            p.add_argument("--targets", required=True)
            p.add_argument("--cats", required=True)
        elif name == "parallel":
            p.add_argument("--e1", required=True)
            p.add_argument("--e2", required=True)
        else:
            p.add_argument("--target", required=True)
            p.add_argument("--cat", required=True)
            if name == "saturation":
                p.add_argument("--threshold", type=float, default=1.0)
        p.set_defaults(func=cmd_stats)

    p_dict = sub.add_parser("dict-stats", help="per-category dictionary counts")
    p_dict.add_argument("--dict", action="append", default=[], metavar="CAT=PATH")
    p_dict.add_argument("--format", default="table", choices=["table", "csv", "json"])
    p_dict.add_argument("--out", default=None)
    p_dict.set_defaults(func=cmd_dict_stats)
    return parser


def _apply_config_defaults(parser: argparse.ArgumentParser, defaults: dict) -> None:
    """Recursively seed flag defaults; a config value satisfies `required`."""
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for sub_parser in action.choices.values():
                _apply_config_defaults(sub_parser, defaults)
        elif action.dest in defaults:
            action.default = defaults[action.dest]
            action.required = False


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s",
                        stream=sys.stderr)
    parser = build_parser()
    config_probe = argparse.ArgumentParser(add_help=False)
    config_probe.add_argument("--config", default=None)
    probed, _ = config_probe.parse_known_args(argv)
    if probed.config:
        with open(probed.config, encoding="utf-8") as handle:
            defaults = json.load(handle)
        _apply_config_defaults(parser, defaults)
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except RelmineError as exc:
        log.error("%s", exc)
        return 1
    except (OSError, ValueError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
