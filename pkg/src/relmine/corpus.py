"""Document model: ingestion, tokenization and structural segmentation.

A document is an ordered token stream with line bookkeeping. Segmentation
carves the token range into text units according to the architecture
heuristics: a fixed-size header block, sections opened by a line-initial
capitalized match of the main entity category, avoid blocks introduced by
configured phrases, and plain paragraphs for whatever remains. Text units
are the cooccurrence scopes used downstream.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace

from .errors import EmptyDocumentError, EncodingError, SegmentationError
from .textnorm import fold, fold_phrase, tokenize_line


class UnitKind(enum.Enum):
    HEADER = "header"
    SECTION = "section"
    PARAGRAPH = "paragraph"
    AVOID = "avoid"


class ParagraphSplit(enum.Enum):
    BLANK_LINE = "blank-line"
    SENTENCE = "sentence"
    NONE = "none"


@dataclass(frozen=True)
class Token:
    surface: str
    folded: str
    word_index: int
    line_index: int
    char_offset: int
    is_line_initial: bool


@dataclass(frozen=True)
class TextUnit:
    unit_id: int
    kind: UnitKind
    start_word: int
    end_word: int  # inclusive
    title_span: tuple[int, int] | None = None

    def contains(self, word_index: int) -> bool:
        return self.start_word <= word_index <= self.end_word


@dataclass(frozen=True)
class Document:
    doc_id: str
    source_path: str = ""
    lines: tuple[str, ...] = ()
    tokens: tuple[Token, ...] = ()
    text_units: tuple[TextUnit, ...] = ()
    metadata: dict[str, str] = field(default_factory=dict)

    def folded(self) -> list[str]:
        return [t.folded for t in self.tokens]

    def surface_span(self, start_word: int, end_word: int) -> str:
        """Original text of a token span, space-joined."""
        return " ".join(t.surface for t in self.tokens[start_word : end_word + 1])

    def unit_for_word(self, word_index: int) -> TextUnit | None:
        for unit in self.text_units:
            if unit.contains(word_index):
                return unit
        return None


@dataclass
class SegmentationConfig:
    header_line_count: int = 10
    main_entity_category: str | None = None
    avoid_start_phrases: list[str] = field(default_factory=list)
    avoid_end_phrases: list[str] = field(default_factory=list)
    paragraph_split: ParagraphSplit = ParagraphSplit.BLANK_LINE


def ingest_text(raw: bytes | str, doc_id: str, *, source_path: str = "",
                strict: bool = True) -> Document:
    """Decode, split into lines and tokenize. No text units yet."""
    if isinstance(raw, bytes):
        try:
            text = raw.decode("utf-8", errors="strict" if strict else "replace")
        except UnicodeDecodeError as exc:
            raise EncodingError(f"{doc_id}: {exc}") from exc
    else:
        text = raw
    if not text.strip():
        raise EmptyDocumentError(f"{doc_id}: no non-whitespace content")

    lines = tuple(line.rstrip("\r") for line in text.split("\n"))
    tokens: list[Token] = []
    for line_index, line in enumerate(lines):
        for position, (surface, offset) in enumerate(tokenize_line(line)):
            tokens.append(Token(
                surface=surface,
                folded=fold(surface),
                word_index=len(tokens),
                line_index=line_index,
                char_offset=offset,
                is_line_initial=position == 0,
            ))
    return Document(doc_id=doc_id, source_path=source_path, lines=lines,
                    tokens=tuple(tokens))


class _Region:
    """Mutable unit under construction during the segmentation walk."""

    def __init__(self, kind, start_word, end_word, title_span=None):
        self.kind = kind
        self.start_word = start_word
        self.end_word = end_word
        self.title_span = title_span


def _line_token_ranges(doc: Document) -> list[tuple[int, int] | None]:
    """Per line: (first_word, last_word) or None for token-free lines."""
    ranges: list[tuple[int, int] | None] = [None] * len(doc.lines)
    for token in doc.tokens:
        current = ranges[token.line_index]
        if current is None:
            ranges[token.line_index] = (token.word_index, token.word_index)
        else:
            ranges[token.line_index] = (current[0], token.word_index)
    return ranges


def _phrase_at(folded: list[str], first_word: int, phrases: list[tuple[str, ...]]) -> bool:
    for phrase in phrases:
        if phrase and tuple(folded[first_word : first_word + len(phrase)]) == phrase:
            return True
    return False


_SENTENCE_END = {".", "!", "?"}


def segment(doc: Document, cfg: SegmentationConfig, matcher=None) -> Document:
    """Return a copy of ``doc`` with text units populated.

    Recomputes from scratch, so applying it twice is a no-op. ``matcher``
    is an EntityMatcher compiled over at least the main entity category;
    section detection is skipped when it is None.
    """
    if cfg.header_line_count < 0:
        raise ValueError("header_line_count must be >= 0")
    if cfg.header_line_count and cfg.header_line_count >= len(doc.lines):
        raise SegmentationError(
            f"{doc.doc_id}: header_line_count {cfg.header_line_count} not below "
            f"line count {len(doc.lines)}")

    line_ranges = _line_token_ranges(doc)
    folded = doc.folded()
    avoid_starts = [fold_phrase(p) for p in cfg.avoid_start_phrases]
    avoid_ends = [fold_phrase(p) for p in cfg.avoid_end_phrases]

    regions: list[_Region] = []
    header_last_line = -1
    if cfg.header_line_count:
        header_words = [r for r in line_ranges[: cfg.header_line_count] if r is not None]
        if header_words:
            regions.append(_Region(UnitKind.HEADER, header_words[0][0], header_words[-1][1]))
        header_last_line = cfg.header_line_count - 1

    split_at_blank = cfg.paragraph_split in (ParagraphSplit.BLANK_LINE, ParagraphSplit.SENTENCE)
    current: _Region | None = None
    for line_index in range(header_last_line + 1, len(doc.lines)):
        line_range = line_ranges[line_index]
        if line_range is None:
            if current is not None and current.kind is UnitKind.PARAGRAPH and split_at_blank:
                regions.append(current)
                current = None
            continue
        first_word, last_word = line_range
        first_token = doc.tokens[first_word]

        section_match = None
        if matcher is not None and cfg.main_entity_category and first_token.surface[:1].isupper():
            section_match = matcher.match_at(folded, first_word,
                                             category=cfg.main_entity_category)
        in_avoid = current is not None and current.kind is UnitKind.AVOID

        if not in_avoid and _phrase_at(folded, first_word, avoid_starts):
            if current is not None:
                regions.append(current)
            current = _Region(UnitKind.AVOID, first_word, last_word)
            continue
        if section_match is not None:
            if current is not None:
                regions.append(current)
            title = (first_word, first_word + section_match.length - 1)
            current = _Region(UnitKind.SECTION, first_word, last_word, title)
            continue
        if in_avoid:
            current.end_word = last_word
            if _phrase_at(folded, first_word, avoid_ends):
                regions.append(current)
                current = None
            continue
        if current is not None and current.kind is UnitKind.SECTION:
            current.end_word = last_word
            continue
        if current is None:
            current = _Region(UnitKind.PARAGRAPH, first_word, last_word)
        else:
            current.end_word = last_word
    if current is not None:
        regions.append(current)

    if cfg.paragraph_split is ParagraphSplit.SENTENCE:
        regions = _expand_sentences(doc, regions)

    units = tuple(
        TextUnit(unit_id=unit_id, kind=r.kind, start_word=r.start_word,
                 end_word=r.end_word, title_span=r.title_span)
        for unit_id, r in enumerate(regions)
    )
    return replace(doc, text_units=units)


def _expand_sentences(doc: Document, regions: list[_Region]) -> list[_Region]:
    """Sub-split paragraph regions at sentence-final punctuation tokens."""
    out: list[_Region] = []
    for region in regions:
        if region.kind is not UnitKind.PARAGRAPH:
            out.append(region)
            continue
        start = region.start_word
        for word in range(region.start_word, region.end_word + 1):
            if doc.tokens[word].surface in _SENTENCE_END:
                out.append(_Region(UnitKind.PARAGRAPH, start, word))
                start = word + 1
        if start <= region.end_word:
            out.append(_Region(UnitKind.PARAGRAPH, start, region.end_word))
    return out


# --- serialization -------------------------------------------------------

def document_to_dict(doc: Document) -> dict:
    return {
        "doc_id": doc.doc_id,
        "source_path": doc.source_path,
        "lines": list(doc.lines),
        "tokens": [
            {"surface": t.surface, "folded": t.folded, "word_index": t.word_index,
             "line_index": t.line_index, "char_offset": t.char_offset,
             "is_line_initial": t.is_line_initial}
            for t in doc.tokens
        ],
        "text_units": [
            {"unit_id": u.unit_id, "kind": u.kind.value, "start_word": u.start_word,
             "end_word": u.end_word,
             "title_span": list(u.title_span) if u.title_span else None}
            for u in doc.text_units
        ],
        "metadata": dict(doc.metadata),
    }


def document_from_dict(data: dict) -> Document:
    tokens = tuple(Token(**entry) for entry in data["tokens"])
    units = tuple(
        TextUnit(unit_id=u["unit_id"], kind=UnitKind(u["kind"]),
                 start_word=u["start_word"], end_word=u["end_word"],
                 title_span=tuple(u["title_span"]) if u["title_span"] else None)
        for u in data["text_units"]
    )
    return Document(doc_id=data["doc_id"], source_path=data["source_path"],
                    lines=tuple(data["lines"]), tokens=tokens, text_units=units,
                    metadata=dict(data["metadata"]))
