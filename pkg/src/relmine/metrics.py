"""Gold annotation loading (colon-delimited and BIO/BILOU) and P/R/F scoring.

The F measure is the beta-weighted harmonic combination
F = (b^2 + 1) * P * R / (b^2 * R + P), reported in percent. Zero
denominators score 0 and are flagged rather than treated as 100.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field

from .errors import FormatError, TagSequenceError
from .textnorm import fold


class GoldFormat(enum.Enum):
    CSV_LIKE = "csv"
    BIO = "bio"
    BILOU = "bilou"


class MatchPolicy(enum.Enum):
    EXACT_SPAN = "exact-span"
    CANONICAL_SET = "canonical-set"
    ORDERED_PAIR_CANONICAL = "ordered-pair"


@dataclass(frozen=True)
class GoldEntity:
    category: str
    value: str
    span: tuple[int, int] | None = None  # token index span when known


@dataclass(frozen=True)
class GoldRelation:
    relation_type: str
    first: str
    second: str
    third: str | None = None


@dataclass
class GoldCorpus:
    entities: dict[str, list[GoldEntity]] = field(default_factory=dict)
    relations: dict[str, list[GoldRelation]] = field(default_factory=dict)

    def add_entity(self, doc_id: str, entity: GoldEntity) -> None:
        bucket = self.entities.setdefault(doc_id, [])
        if entity not in bucket:
            bucket.append(entity)

    def add_relation(self, doc_id: str, relation: GoldRelation) -> None:
        bucket = self.relations.setdefault(doc_id, [])
        if relation not in bucket:
            bucket.append(relation)


def load_gold(path: str, format: GoldFormat, strict: bool = True) -> GoldCorpus:
    """Load a gold file, or every gold file of a directory.

    For BIO/BILOU the doc id is the file stem. The colon-delimited format
    carries the doc id per line:

        E:<doc_id>:<category>:<value>
        R:<doc_id>:<relation_type>:<first>:<second>[:<third>]
    """
    gold = GoldCorpus()
    if os.path.isdir(path):
        for name in sorted(os.listdir(path)):
            full = os.path.join(path, name)
            if os.path.isfile(full):
                _load_gold_file(gold, full, format, strict)
    else:
        _load_gold_file(gold, path, format, strict)
    return gold


def _load_gold_file(gold: GoldCorpus, path: str, format: GoldFormat, strict: bool) -> None:
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    if format is GoldFormat.CSV_LIKE:
        _parse_csv_like(gold, text)
        return
    doc_id = os.path.splitext(os.path.basename(path))[0]
    spans = parse_tagged_tokens(text, scheme=format, strict=strict)
    for category, value, span in spans:
        gold.add_entity(doc_id, GoldEntity(category=category, value=value, span=span))


def _parse_csv_like(gold: GoldCorpus, text: str) -> None:
    for line_no, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f for f in line.split(":")]
        if fields and fields[-1] == "":
            fields.pop()
        kind = fields[0] if fields else ""
        if kind == "E":
            if len(fields) != 4:
                raise FormatError("entity lines need E:<doc>:<category>:<value>", line_no)
            gold.add_entity(fields[1], GoldEntity(category=fields[2], value=fields[3]))
        elif kind == "R":
            if len(fields) not in (5, 6):
                raise FormatError(
                    "relation lines need R:<doc>:<type>:<first>:<second>[:<third>]", line_no)
            third = fields[5] if len(fields) == 6 else None
            gold.add_relation(fields[1], GoldRelation(
                relation_type=fields[2], first=fields[3], second=fields[4], third=third))
        else:
            raise FormatError(f"unknown annotation kind {kind!r}", line_no)


def parse_tagged_tokens(text: str, scheme: GoldFormat, strict: bool = True):
    """Reconstruct (category, surface, span) entities from token\\ttag lines.

    Token indices run over the whole file; blank lines separate sentences
    and reset the tag-sequence context without resetting indices.
    """
    bilou = scheme is GoldFormat.BILOU
    spans: list[tuple[str, str, tuple[int, int]]] = []
    open_cat: str | None = None
    open_start = 0
    open_tokens: list[str] = []
    index = 0

    def close():
        nonlocal open_cat, open_tokens
        if open_cat is not None:
            spans.append((open_cat, " ".join(open_tokens), (open_start, index - 1)))
        open_cat = None
        open_tokens = []

    for line_no, raw in enumerate(text.split("\n"), start=1):
        line = raw.rstrip()
        if not line:
            if strict and bilou and open_cat is not None:
                raise TagSequenceError("entity still open at sentence break", line_no)
            close()
            continue
        if "\t" not in line:
            raise FormatError("expected token<TAB>tag", line_no)
        token, tag = line.split("\t", 1)
        tag = tag.strip()
        if tag == "O":
            if strict and bilou and open_cat is not None:
                raise TagSequenceError("O tag closes an unfinished entity", line_no)
            close()
        elif "-" in tag:
            marker, category = tag.split("-", 1)
            if marker not in ("B", "I") and not (bilou and marker in ("L", "U")):
                raise FormatError(f"unknown tag marker {marker!r}", line_no)
            if marker == "B" or (bilou and marker == "U"):
                if strict and bilou and open_cat is not None:
                    raise TagSequenceError(
                        f"{tag} starts while an entity is open", line_no)
                close()
                open_cat, open_start = category, index
                open_tokens = [token]
                if bilou and marker == "U":
                    index += 1
                    close()
                    continue
            else:  # I or L continue an open entity
                if open_cat != category:
                    if strict:
                        raise TagSequenceError(
                            f"{tag} does not continue an open {category} entity", line_no)
                    close()
                    open_cat, open_start = category, index
                    open_tokens = [token]
                else:
                    open_tokens.append(token)
                if bilou and marker == "L":
                    index += 1
                    close()
                    continue
        else:
            raise FormatError(f"malformed tag {tag!r}", line_no)
        index += 1
    if strict and bilou and open_cat is not None:
        raise TagSequenceError("entity still open at end of file")
    close()
    return spans


def mentions_to_tagged(mentions, total_tokens: int, token_surfaces,
                       scheme: GoldFormat = GoldFormat.BIO) -> list[str]:
    """Emit token\\ttag lines for a set of non-overlapping mentions.

    Mentions overlapping an already-emitted span are skipped (the schemes
    cannot encode overlaps); callers wanting exactness pass resolved,
    disjoint mentions.
    """
    tags = ["O"] * total_tokens
    taken = [False] * total_tokens
    for m in sorted(mentions, key=lambda m: (m.start_word, -(m.end_word - m.start_word))):
        if any(taken[m.start_word : m.end_word + 1]):
            continue
        for i in range(m.start_word, m.end_word + 1):
            taken[i] = True
        if scheme is GoldFormat.BILOU and m.start_word == m.end_word:
            tags[m.start_word] = f"U-{m.category}"
            continue
        tags[m.start_word] = f"B-{m.category}"
        for i in range(m.start_word + 1, m.end_word + 1):
            tags[i] = f"I-{m.category}"
        if scheme is GoldFormat.BILOU:
            tags[m.end_word] = f"L-{m.category}"
    return [f"{token_surfaces[i]}\t{tags[i]}" for i in range(total_tokens)]


# --- scoring ---------------------------------------------------------------

@dataclass(frozen=True)
class ReportRow:
    label: str
    correct: int
    produced: int
    possible: int
    precision: float
    recall: float
    f1: float
    precision_defined: bool = True
    recall_defined: bool = True


@dataclass
class EvalReport:
    rows: list[ReportRow]
    total: ReportRow
    beta: float
    average: str = "micro"


def f_measure(precision: float, recall: float, beta: float = 1.0) -> float:
    """Beta-weighted F from precision/recall given in percent (or ratios)."""
    if precision == 0 and recall == 0:
        return 0.0
    return (beta * beta + 1) * precision * recall / (beta * beta * recall + precision)


def _row(label: str, correct: int, produced: int, possible: int, beta: float) -> ReportRow:
    p_defined = produced > 0
    r_defined = possible > 0
    precision = 100.0 * correct / produced if p_defined else 0.0
    recall = 100.0 * correct / possible if r_defined else 0.0
    return ReportRow(label=label, correct=correct, produced=produced,
                     possible=possible, precision=precision, recall=recall,
                     f1=f_measure(precision, recall, beta),
                     precision_defined=p_defined, recall_defined=r_defined)


def _entity_key(policy, category, value, span):
    if policy is MatchPolicy.EXACT_SPAN:
        if span is None:
            raise ValueError("exact-span scoring needs spans on both sides")
        return (category, span[0], span[1])
    return (category, fold(value))


def _predicted_entity_items(predicted):
    for m in predicted:
        yield m.doc_id, m.category, m.canonical, (m.start_word, m.end_word)


def _predicted_relation_items(predicted):
    # accepts RelationInstance (full mentions) or RelationRow (store rows)
    for r in predicted:
        if hasattr(r, "first"):
            yield r.doc_id, r.relation_type, r.first.canonical, r.second.canonical
        else:
            yield r.doc_id, r.relation_type, r.target, r.partner


def score(gold: GoldCorpus, predicted, match_policy: MatchPolicy,
          beta: float = 1.0, average: str = "micro") -> EvalReport:
    """Score predicted mentions or relations against a gold corpus.

    Entity policies group rows per category; the relation policy groups per
    relation type. The TOT row pools counts (micro) by default; "macro"
    averages the per-group percentages instead.
    """
    if beta <= 0:
        raise ValueError("beta must be positive")
    gold_sets: dict[str, set] = {}
    pred_sets: dict[str, set] = {}

    if match_policy is MatchPolicy.ORDERED_PAIR_CANONICAL:
        for doc_id, items in gold.relations.items():
            for g in items:
                key = (doc_id, fold(g.first), fold(g.second))
                gold_sets.setdefault(g.relation_type, set()).add(key)
        for doc_id, rel_type, first, second in _predicted_relation_items(predicted):
            key = (doc_id, fold(first), fold(second))
            pred_sets.setdefault(rel_type, set()).add(key)
    else:
        for doc_id, items in gold.entities.items():
            for g in items:
                key = (doc_id,) + _entity_key(match_policy, g.category, g.value, g.span)
                gold_sets.setdefault(g.category, set()).add(key)
        for doc_id, category, value, span in _predicted_entity_items(predicted):
            key = (doc_id,) + _entity_key(match_policy, category, value, span)
            pred_sets.setdefault(category, set()).add(key)

    labels = sorted(set(gold_sets) | set(pred_sets))
    rows = []
    for label in labels:
        g = gold_sets.get(label, set())
        p = pred_sets.get(label, set())
        rows.append(_row(label, len(g & p), len(p), len(g), beta))

    if average == "macro" and rows:
        precision = sum(r.precision for r in rows) / len(rows)
        recall = sum(r.recall for r in rows) / len(rows)
        total = ReportRow(label="TOT", correct=sum(r.correct for r in rows),
                          produced=sum(r.produced for r in rows),
                          possible=sum(r.possible for r in rows),
                          precision=precision, recall=recall,
                          f1=f_measure(precision, recall, beta))
    else:
        total = _row("TOT", sum(r.correct for r in rows),
                     sum(r.produced for r in rows),
                     sum(r.possible for r in rows), beta)
    return EvalReport(rows=rows, total=total, beta=beta, average=average)


def report_rows(report: EvalReport) -> list[ReportRow]:
    return [*report.rows, report.total]


def format_report_table(report: EvalReport) -> str:
    """Aligned plain-text table."""
    header = f"{'category':<12} {'P':>7} {'R':>7} {'F1':>7} {'corr':>6} {'prod':>6} {'poss':>6}"
    lines = [header, "-" * len(header)]
    for row in report_rows(report):
        lines.append(
            f"{row.label:<12} {row.precision:>7.2f} {row.recall:>7.2f} "
            f"{row.f1:>7.2f} {row.correct:>6} {row.produced:>6} {row.possible:>6}")
    return "\n".join(lines)
