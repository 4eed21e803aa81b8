"""Delimited and JSON export/import of mentions, relations and reports.

All writers are deterministic: rows are pre-sorted by the callers, CSV uses
comma delimiters with minimal quoting and bare "\\n" line ends, JSON is
emitted with sorted keys. Identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json

from .analytics import RelationRow, TestResult, parse_month
from .grammar import Capture
from .metrics import EvalReport, report_rows
from .ner import EntityMention, MentionSource
from .relate import RelationInstance

MENTION_FIELDS = ["doc_id", "category", "canonical", "start_word", "end_word",
                  "surface", "source"]
RELATION_FIELDS = ["doc_id", "relation_type", "target_canonical",
                   "partner_canonical", "evidence_unit", "context_json"]


def _csv_text(header: list[str], rows: list[list]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _json_text(payload) -> str:
    return json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def mentions_to_csv(mentions: list[EntityMention]) -> str:
    rows = [[m.doc_id, m.category, m.canonical, m.start_word, m.end_word,
             m.surface, m.source.value] for m in mentions]
    return _csv_text(MENTION_FIELDS, rows)


def _mention_dict(m: EntityMention) -> dict:
    return {
        "doc_id": m.doc_id, "category": m.category, "canonical": m.canonical,
        "surface": m.surface, "start_word": m.start_word, "end_word": m.end_word,
        "source": m.source.value, "text_unit": m.text_unit,
        "captures": [
            {"open": c.open_tag, "close": c.close_tag,
             "start_word": c.start_word, "end_word": c.end_word}
            for c in m.captures
        ],
    }


def mentions_to_json(mentions: list[EntityMention]) -> str:
    return _json_text([_mention_dict(m) for m in mentions])


def mention_from_dict(data: dict) -> EntityMention:
    return EntityMention(
        doc_id=data["doc_id"], category=data["category"],
        canonical=data["canonical"], surface=data["surface"],
        start_word=data["start_word"], end_word=data["end_word"],
        source=MentionSource(data["source"]), text_unit=data.get("text_unit"),
        captures=tuple(
            Capture(c["open"], c["close"], c["start_word"], c["end_word"])
            for c in data.get("captures", [])
        ))


def load_mentions_json(path: str) -> list[EntityMention]:
    with open(path, encoding="utf-8") as handle:
        return [mention_from_dict(entry) for entry in json.load(handle)]


def load_mentions_csv(path: str) -> list[EntityMention]:
    with open(path, encoding="utf-8", newline="") as handle:
        return [
            EntityMention(
                doc_id=r["doc_id"], category=r["category"], canonical=r["canonical"],
                surface=r["surface"], start_word=int(r["start_word"]),
                end_word=int(r["end_word"]), source=MentionSource(r["source"]))
            for r in csv.DictReader(handle)
        ]


def load_mentions(path: str) -> list[EntityMention]:
    if path.endswith(".json"):
        return load_mentions_json(path)
    return load_mentions_csv(path)


def relations_to_csv(relations: list[RelationInstance]) -> str:
    rows = []
    for r in relations:
        context = json.dumps(r.context, ensure_ascii=False, sort_keys=True)
        rows.append([r.doc_id, r.relation_type, r.first.canonical,
                     r.second.canonical,
                     "" if r.evidence_unit is None else r.evidence_unit, context])
    return _csv_text(RELATION_FIELDS, rows)


def relations_to_json(relations: list[RelationInstance]) -> str:
    payload = []
    for r in relations:
        payload.append({
            "doc_id": r.doc_id, "relation_type": r.relation_type,
            "evidence_unit": r.evidence_unit, "context": dict(r.context),
            "target": _mention_dict(r.first), "partner": _mention_dict(r.second),
        })
    return _json_text(payload)


def relation_rows_from_file(path: str) -> list[RelationRow]:
    """Load relation rows for analytics from a JSON or CSV relation export."""
    if path.endswith(".json"):
        with open(path, encoding="utf-8") as handle:
            entries = json.load(handle)
        rows = []
        for entry in entries:
            context = dict(entry.get("context", {}))
            rows.append(RelationRow(
                doc_id=entry["doc_id"],
                target=entry["target"]["canonical"],
                partner=entry["partner"]["canonical"],
                partner_category=entry["partner"]["category"],
                relation_type=entry["relation_type"],
                evidence_unit=entry.get("evidence_unit"),
                month=parse_month(context.get("date")),
                context=context))
        return rows
    with open(path, encoding="utf-8", newline="") as handle:
        reader = csv.DictReader(handle)
        rows = []
        for record in reader:
            context = json.loads(record.get("context_json") or "{}")
            rel_type = record["relation_type"]
            partner_category = rel_type.split("-", 1)[1] if "-" in rel_type else ""
            unit = record.get("evidence_unit") or ""
            rows.append(RelationRow(
                doc_id=record["doc_id"],
                target=record["target_canonical"],
                partner=record["partner_canonical"],
                partner_category=partner_category,
                relation_type=rel_type,
                evidence_unit=int(unit) if unit else None,
                month=parse_month(context.get("date")),
                context=context))
        return rows


def report_to_csv(report: EvalReport) -> str:
    rows = [[r.label, f"{r.precision:.2f}", f"{r.recall:.2f}", f"{r.f1:.2f}",
             r.correct, r.produced, r.possible] for r in report_rows(report)]
    return _csv_text(["category", "P", "R", "F1", "correct", "produced", "possible"], rows)


def report_to_json(report: EvalReport) -> str:
    payload = {
        "beta": report.beta,
        "average": report.average,
        "rows": [
            {"label": r.label, "precision": r.precision, "recall": r.recall,
             "f1": r.f1, "correct": r.correct, "produced": r.produced,
             "possible": r.possible, "precision_defined": r.precision_defined,
             "recall_defined": r.recall_defined}
            for r in report_rows(report)
        ],
    }
    return _json_text(payload)


# --- analytics tables ------------------------------------------------------

def timeline_table(bins: list[tuple[str, int]]):
    return ["period", "count"], [[period, count] for period, count in bins]


def proportions_table(rows, partners: list[str]):
    header = ["target", *partners, "total", "flagged"]
    body = []
    for row in rows:
        shares = [f"{row.shares.get(p, 0.0):.6f}" if not row.flagged else ""
                  for p in partners]
        body.append([row.target, *shares, row.total, "yes" if row.flagged else "no"])
    return header, body


def venn_table(regions: dict[tuple[str, ...], int]):
    body = [["&".join(members), count] for members, count in regions.items()]
    return ["region", "count"], body


def parallel_table(rows, partners: list[str]):
    header = ["doc_id", "month", *partners]
    body = [[doc_id, month, *[counts[p] for p in partners]]
            for doc_id, month, counts in rows]
    return header, body


def tests_table(results: list[TestResult]):
    header = ["pair", "KOLMOGOROV", "WILCOXON", "STUDENT", "GROWTHCURVES",
              "stat_KOLMOGOROV", "stat_WILCOXON", "stat_STUDENT", "note"]
    body = []
    for r in results:
        def fmt(mapping, name):
            return f"{mapping[name]:.4f}" if name in mapping else ""
        body.append([
            r.pair, fmt(r.p_values, "KOLMOGOROV"), fmt(r.p_values, "WILCOXON"),
            fmt(r.p_values, "STUDENT"), "",
            fmt(r.statistics, "KOLMOGOROV"), fmt(r.statistics, "WILCOXON"),
            fmt(r.statistics, "STUDENT"), r.note or ""])
    return header, body


def saturation_table(labels: list[str]):
    return ["pair"], [[label] for label in labels]


def table_to_csv(header: list[str], rows: list[list]) -> str:
    return _csv_text(header, rows)


def table_to_json(header: list[str], rows: list[list]) -> str:
    return _json_text([dict(zip(header, row)) for row in rows])
