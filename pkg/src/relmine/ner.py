"""Entity mention extraction: dictionary scan plus grammar scan, then
containment resolution keeping maximal spans.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

from .corpus import Document
from .grammar import Capture, GrammarSet, scan as grammar_scan
from .lexicon import EntityMatcher


class MentionSource(enum.Enum):
    DICTIONARY = "dictionary"
    GRAMMAR = "grammar"


@dataclass(frozen=True)
class EntityMention:
    doc_id: str
    category: str
    canonical: str
    surface: str
    start_word: int
    end_word: int  # inclusive
    source: MentionSource
    captures: tuple[Capture, ...] = ()
    text_unit: int | None = None

    @property
    def span(self) -> tuple[int, int]:
        return (self.start_word, self.end_word)

    @property
    def length(self) -> int:
        return self.end_word - self.start_word + 1


def _sort_key(m: EntityMention):
    return (m.start_word, -m.length, m.category, m.canonical, m.source.value)


def extract_entities(doc: Document, matcher: EntityMatcher | None,
                     gs: GrammarSet | None = None) -> list[EntityMention]:
    """Dictionary and grammar mentions of one document, overlap-resolved.

    The dictionary pass reports the longest match at every start position
    (all categories tied at that length); the grammar pass reports
    non-overlapping longest matches per entry point. Strictly contained
    spans are then removed and the result is sorted by start position,
    longest first.
    """
    mentions: list[EntityMention] = []
    if matcher is not None:
        folded = doc.folded()
        for match in matcher.iter_matches(folded):
            for category, canonical in match.pairs:
                mentions.append(EntityMention(
                    doc_id=doc.doc_id, category=category, canonical=canonical,
                    surface=doc.surface_span(match.start, match.end),
                    start_word=match.start, end_word=match.end,
                    source=MentionSource.DICTIONARY))
    if gs is not None:
        for gm in grammar_scan(gs, doc, matcher):
            surface = doc.surface_span(gm.start_word, gm.end_word)
            mentions.append(EntityMention(
                doc_id=doc.doc_id, category=gm.category, canonical=surface,
                surface=surface, start_word=gm.start_word, end_word=gm.end_word,
                source=MentionSource.GRAMMAR, captures=gm.captures))
    resolved = resolve_overlaps(mentions)
    return [_with_unit(doc, m) for m in resolved]


def _with_unit(doc: Document, mention: EntityMention) -> EntityMention:
    unit = doc.unit_for_word(mention.start_word)
    return replace(mention, text_unit=None if unit is None else unit.unit_id)


def resolve_overlaps(mentions: list[EntityMention]) -> list[EntityMention]:
    """Drop every mention whose span is strictly contained in another's.

    Containment is category-blind; equal spans all survive, as do partial
    overlaps. Exact duplicates collapse to one. Output order is ascending
    start position, longest span first.
    """
    unique: dict[tuple, EntityMention] = {}
    for m in mentions:
        unique.setdefault((m.category, m.canonical, m.span, m.source), m)
    spans = {m.span for m in unique.values()}

    def contained(span: tuple[int, int]) -> bool:
        start, end = span
        for other_start, other_end in spans:
            if (other_start, other_end) == span:
                continue
            if other_start <= start and end <= other_end:
                return True
        return False

    kept = [m for m in unique.values() if not contained(m.span)]
    kept.sort(key=_sort_key)
    return kept
