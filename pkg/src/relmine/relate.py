"""Relation extraction by cooccurrence analysis over document structure.

Three cooccurrence tests are implemented: shared text unit, positional
window around the target mention, and either of those constrained by a
lexical marker lying between the two mentions. The three architecture
heuristics plug into the text-unit test: the target must sit in the unit
title (h1), header mentions of configured categories are attached to every
relation as document-wide context (h2), and avoid blocks are excluded as
evidence (h3). A separate pass extracts ternary contextual relations by
nested line-initial paragraph splitting.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .corpus import Document, UnitKind
from .errors import ArityUnsupportedError
from .grammar import GrammarSet
from .lexicon import EntityMatcher
from .ner import EntityMention, MentionSource, extract_entities

INFINITE = math.inf


class CoocMode(enum.Enum):
    TEXT_UNIT = "text-unit"
    WINDOW = "window"
    CONSTRAINED = "constrained"


@dataclass
class CoocConfig:
    mode: CoocMode
    target_category: str
    partner_categories: list[str]
    window_left: float = INFINITE
    window_right: float = INFINITE
    markers: list[str] = field(default_factory=list)
    h1: bool = False
    h2: bool = False
    h3: bool = False
    header_categories: list[str] = field(default_factory=list)
    # which underlying test the marker constraint applies to
    constrained_scope: CoocMode = CoocMode.WINDOW

    def __post_init__(self):
        if self.mode is CoocMode.CONSTRAINED:
            if not self.markers:
                raise ValueError("constrained mode requires at least one marker")
            if self.constrained_scope is CoocMode.CONSTRAINED:
                raise ValueError("constrained_scope must be text-unit or window")
        for bound in (self.window_left, self.window_right):
            if bound != INFINITE and (bound < 0 or bound != int(bound)):
                raise ValueError("window bounds must be nonnegative integers or INFINITE")


@dataclass(frozen=True)
class RelationInstance:
    doc_id: str
    first: EntityMention
    second: EntityMention
    relation_type: str
    evidence_unit: int | None
    context: dict[str, str] = field(default_factory=dict)

    def key(self) -> tuple:
        return (self.first.canonical, self.second.canonical, self.evidence_unit)


def _split_mentions(mentions, cfg):
    targets = [m for m in mentions if m.category == cfg.target_category]
    partners = [m for m in mentions if m.category in cfg.partner_categories]
    return targets, partners


def _header_context(doc: Document, mentions, cfg: CoocConfig) -> dict[str, str]:
    """First header mention of each configured category (heuristic 2)."""
    if not cfg.h2 or not cfg.header_categories:
        return {}
    header = next((u for u in doc.text_units if u.kind is UnitKind.HEADER), None)
    if header is None:
        return {}
    context: dict[str, str] = {}
    for category in cfg.header_categories:
        hits = [m for m in mentions
                if m.category == category and header.contains(m.start_word)]
        if hits:
            context[category] = min(hits, key=lambda m: m.start_word).canonical
    return context


def _effective_units(doc: Document, h3: bool) -> dict[int, int]:
    """Map unit id to its cooccurrence scope unit id.

    With h3 disabled, an avoid block is not carved out of the analysis: its
    text is scoped back to the nearest preceding section, which is how the
    spurious pair inside an avoid block resurfaces when the heuristic is
    turned off.
    """
    mapping: dict[int, int] = {}
    last_section: int | None = None
    for unit in doc.text_units:
        if unit.kind is UnitKind.SECTION:
            last_section = unit.unit_id
            mapping[unit.unit_id] = unit.unit_id
        elif unit.kind is UnitKind.AVOID and not h3 and last_section is not None:
            mapping[unit.unit_id] = last_section
        else:
            mapping[unit.unit_id] = unit.unit_id
    return mapping


def _relation(doc, target, partner, unit_id, context) -> RelationInstance:
    return RelationInstance(
        doc_id=doc.doc_id, first=target, second=partner,
        relation_type=f"{target.category}-{partner.category}",
        evidence_unit=unit_id, context=dict(context))


def cooc_text_unit(doc: Document, mentions: list[EntityMention],
                   cfg: CoocConfig) -> list[RelationInstance]:
    """Pairs whose mentions share a text unit, subject to heuristics 1-3."""
    targets, partners = _split_mentions(mentions, cfg)
    context = _header_context(doc, mentions, cfg)
    unit_by_id = {u.unit_id: u for u in doc.text_units}
    scope = _effective_units(doc, cfg.h3)

    def scope_of(m: EntityMention) -> int | None:
        if m.text_unit is None:
            return None
        return scope.get(m.text_unit)

    out: list[RelationInstance] = []
    for target in targets:
        target_scope = scope_of(target)
        if target_scope is None:
            continue
        unit = unit_by_id[target_scope]
        if cfg.h3 and unit.kind is UnitKind.AVOID:
            continue
        if cfg.h1:
            if unit.title_span is None:
                continue
            ts, te = unit.title_span
            if not ts <= target.start_word <= te:
                continue
        for partner in partners:
            if partner is target:
                continue
            if scope_of(partner) != target_scope:
                continue
            out.append(_relation(doc, target, partner, target_scope, context))
    return out


def _in_avoid(doc: Document, mention: EntityMention) -> bool:
    if mention.text_unit is None:
        return False
    unit = doc.text_units[mention.text_unit]
    return unit.kind is UnitKind.AVOID


def cooc_window(doc: Document, mentions: list[EntityMention],
                cfg: CoocConfig) -> list[RelationInstance]:
    """Pairs with the partner inside [target - WL, target + WR]."""
    targets, partners = _split_mentions(mentions, cfg)
    context = _header_context(doc, mentions, cfg)
    out: list[RelationInstance] = []
    for target in targets:
        if cfg.h3 and _in_avoid(doc, target):
            continue
        low = target.start_word - cfg.window_left
        high = target.start_word + cfg.window_right
        for partner in partners:
            if partner is target:
                continue
            if cfg.h3 and _in_avoid(doc, partner):
                continue
            if low <= partner.start_word <= high:
                out.append(_relation(doc, target, partner, target.text_unit, context))
    return out


def marker_positions(doc: Document, markers: list[str]) -> list[int]:
    """Start positions of every whole-token occurrence of any marker phrase."""
    from .textnorm import fold_phrase

    folded = doc.folded()
    positions: set[int] = set()
    for marker in markers:
        phrase = fold_phrase(marker)
        if not phrase:
            continue
        for start in range(len(folded) - len(phrase) + 1):
            if tuple(folded[start : start + len(phrase)]) == phrase:
                positions.add(start)
    return sorted(positions)


def cooc_constrained(doc: Document, mentions: list[EntityMention],
                     cfg: CoocConfig) -> list[RelationInstance]:
    """Underlying text-unit or window pairs filtered by an interposed marker.

    A pair survives when some marker occurrence k lies strictly between the
    two mention positions and |Pi - Pk| <= |Pi - Pj|.
    """
    base_cfg = CoocConfig(
        mode=cfg.constrained_scope, target_category=cfg.target_category,
        partner_categories=cfg.partner_categories, window_left=cfg.window_left,
        window_right=cfg.window_right, h1=cfg.h1, h2=cfg.h2, h3=cfg.h3,
        header_categories=cfg.header_categories)
    if cfg.constrained_scope is CoocMode.TEXT_UNIT:
        candidates = cooc_text_unit(doc, mentions, base_cfg)
    else:
        candidates = cooc_window(doc, mentions, base_cfg)
    marks = marker_positions(doc, cfg.markers)
    out = []
    for rel in candidates:
        pi, pj = rel.first.start_word, rel.second.start_word
        low, high = min(pi, pj), max(pi, pj)
        if any(low < pk < high and abs(pi - pk) <= abs(pi - pj) for pk in marks):
            out.append(rel)
    return out


def _relation_sort_key(rel: RelationInstance):
    return (rel.evidence_unit if rel.evidence_unit is not None else -1,
            rel.first.start_word, rel.second.start_word,
            rel.first.canonical, rel.second.canonical, rel.relation_type)


def extract_relations(doc: Document, mentions: list[EntityMention],
                      cfg: CoocConfig) -> list[RelationInstance]:
    """Dispatch on the configured mode and deduplicate.

    Structure-free fallback: in text-unit mode, a document without any
    section is scoped per paragraph unit with the title requirement (h1)
    dropped. Duplicate (first canonical, second canonical, evidence unit)
    triples collapse to one.
    """
    if cfg.mode is CoocMode.TEXT_UNIT:
        has_sections = any(u.kind is UnitKind.SECTION for u in doc.text_units)
        effective = cfg
        if cfg.h1 and not has_sections:
            effective = CoocConfig(
                mode=cfg.mode, target_category=cfg.target_category,
                partner_categories=cfg.partner_categories,
                window_left=cfg.window_left, window_right=cfg.window_right,
                h1=False, h2=cfg.h2, h3=cfg.h3,
                header_categories=cfg.header_categories)
        relations = cooc_text_unit(doc, mentions, effective)
    elif cfg.mode is CoocMode.WINDOW:
        relations = cooc_window(doc, mentions, cfg)
    else:
        relations = cooc_constrained(doc, mentions, cfg)

    relations.sort(key=_relation_sort_key)
    seen: set[tuple] = set()
    out = []
    for rel in relations:
        if rel.key() in seen:
            continue
        seen.add(rel.key())
        out.append(rel)
    return out


# --- ternary contextual relations ----------------------------------------

@dataclass(frozen=True)
class ParagraphSpan:
    start_line: int
    end_line: int  # inclusive
    start_word: int | None
    end_word: int | None  # inclusive


def _line_ranges(doc: Document) -> list[tuple[int, int] | None]:
    ranges: list[tuple[int, int] | None] = [None] * len(doc.lines)
    for token in doc.tokens:
        current = ranges[token.line_index]
        if current is None:
            ranges[token.line_index] = (token.word_index, token.word_index)
        else:
            ranges[token.line_index] = (current[0], token.word_index)
    return ranges


def _starts_category(doc: Document, folded, line_range, category: str,
                     matcher: EntityMatcher):
    """Longest category match anchored at a capitalized line-initial token."""
    if line_range is None:
        return None
    first_word = line_range[0]
    if not doc.tokens[first_word].surface[:1].isupper():
        return None
    return matcher.match_at(folded, first_word, category=category)


def transform_paragraphs(doc: Document, lines: tuple[int, int] | None,
                         category: str, matcher: EntityMatcher) -> list[ParagraphSpan]:
    """Partition a line range at capitalized line-initial category matches.

    Every input line lands in exactly one returned paragraph; the trailing
    partial paragraph is always pushed. A segment with no match comes back
    as a single paragraph.
    """
    start_line, end_line = lines if lines is not None else (0, len(doc.lines) - 1)
    folded = doc.folded()
    ranges = _line_ranges(doc)
    breaks = [
        line for line in range(start_line, end_line + 1)
        if _starts_category(doc, folded, ranges[line], category, matcher) is not None
    ]
    bounds = [start_line, *[b for b in breaks if b != start_line], end_line + 1]
    out: list[ParagraphSpan] = []
    for left, right in zip(bounds, bounds[1:]):
        if left >= right:
            continue
        words = [ranges[line] for line in range(left, right) if ranges[line] is not None]
        out.append(ParagraphSpan(
            start_line=left, end_line=right - 1,
            start_word=words[0][0] if words else None,
            end_word=words[-1][1] if words else None))
    return out


def _head_mention(doc: Document, folded, ranges, para: ParagraphSpan,
                  category: str, matcher: EntityMatcher) -> EntityMention | None:
    match = _starts_category(doc, folded, ranges[para.start_line], category, matcher)
    if match is None:
        return None
    canonical = dict(match.pairs).get(category)
    unit = doc.unit_for_word(match.start)
    return EntityMention(
        doc_id=doc.doc_id, category=category, canonical=canonical,
        surface=doc.surface_span(match.start, match.end),
        start_word=match.start, end_word=match.end,
        source=MentionSource.DICTIONARY,
        text_unit=None if unit is None else unit.unit_id)


def extract_contextual(doc: Document, tags: list[str], matcher: EntityMatcher,
                       gs: GrammarSet | None = None) -> list[RelationInstance]:
    """Ternary relations via nested paragraph splitting.

    The document splits on tags[0], each piece splits again on tags[1], and
    every tags[2] value found inside an inner piece binds the enclosing
    tags[0] value and the inner tags[1] value into one relation, with the
    tags[2] value stored in the relation context.
    """
    if len(tags) != 3:
        raise ArityUnsupportedError(f"expected exactly 3 category tags, got {len(tags)}")
    t0, t1, t2 = tags
    folded = doc.folded()
    ranges = _line_ranges(doc)
    context_mentions = [m for m in extract_entities(doc, matcher, gs)
                        if m.category == t2]

    out: list[RelationInstance] = []
    for outer in transform_paragraphs(doc, None, t0, matcher):
        head0 = _head_mention(doc, folded, ranges, outer, t0, matcher)
        if head0 is None:
            continue
        inner_lines = (outer.start_line, outer.end_line)
        for inner in transform_paragraphs(doc, inner_lines, t1, matcher):
            head1 = _head_mention(doc, folded, ranges, inner, t1, matcher)
            if head1 is None or inner.start_word is None:
                continue
            for value in context_mentions:
                if inner.start_word <= value.start_word and value.end_word <= inner.end_word:
                    out.append(RelationInstance(
                        doc_id=doc.doc_id, first=head0, second=head1,
                        relation_type=f"{t0}-{t1}",
                        evidence_unit=head1.text_unit,
                        context={t2: value.canonical}))
    out.sort(key=lambda r: (r.first.start_word, r.second.start_word,
                            sorted(r.context.items())))
    return out
