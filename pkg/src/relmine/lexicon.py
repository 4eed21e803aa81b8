"""Hierarchical entity dictionaries and the compiled longest-match matcher.

Dictionary files are colon-delimited, one entry per line: canonical name,
an N (node) or L (leaf) kind label, then lexical variants. A leaf is linked
to the node whose variant list mentions the leaf's canonical name. All
loaded dictionaries compile into a single token-sequence trie; lookups
return the longest variant starting at a position, folded-comparison, with
ties across categories reported side by side.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .errors import DuplicateCanonicalError, FormatError
from .textnorm import fold_phrase


class EntryKind(enum.Enum):
    NODE = "N"
    LEAF = "L"


@dataclass
class DictionaryEntry:
    canonical: str
    kind: EntryKind
    variants: list[str]
    parent: str | None = None


@dataclass
class Dictionary:
    category: str
    entries: list[DictionaryEntry] = field(default_factory=list)

    def entry(self, canonical: str) -> DictionaryEntry | None:
        for e in self.entries:
            if e.canonical == canonical:
                return e
        return None


def parse_dictionary(lines, category: str) -> Dictionary:
    """Parse colon-delimited entry lines into a Dictionary.

    Trailing empty fields (lines ending in ':') are tolerated. The canonical
    name is prepended to the variant list when the line does not repeat it.
    """
    entries: list[DictionaryEntry] = []
    seen: set[str] = set()
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip():
            continue
        fields = line.split(":")
        if len(fields) < 2:
            raise FormatError("expected at least canonical and kind fields", line_no)
        canonical = fields[0].strip()
        kind_label = fields[1].strip()
        if kind_label not in ("N", "L"):
            raise FormatError(f"kind must be N or L, got {kind_label!r}", line_no)
        if not canonical:
            raise FormatError("empty canonical name", line_no)
        if canonical in seen:
            raise DuplicateCanonicalError(canonical)
        seen.add(canonical)
        variants: list[str] = []
        for variant in fields[2:]:
            variant = variant.strip()
            if variant and variant not in variants:
                variants.append(variant)
        if canonical not in variants:
            variants.insert(0, canonical)
        entries.append(DictionaryEntry(canonical=canonical,
                                       kind=EntryKind(kind_label),
                                       variants=variants))
    dictionary = Dictionary(category=category, entries=entries)
    _link_parents(dictionary)
    return dictionary


def _link_parents(dictionary: Dictionary) -> None:
    """A leaf's parent is the first node listing the leaf's canonical name."""
    nodes = [e for e in dictionary.entries if e.kind is EntryKind.NODE]
    for entry in dictionary.entries:
        if entry.kind is not EntryKind.LEAF:
            continue
        for node in nodes:
            if entry.canonical in node.variants and node.canonical != entry.canonical:
                entry.parent = node.canonical
                break


def serialize_dictionary(dictionary: Dictionary) -> list[str]:
    """Emit entry lines in the colon-delimited file format.

    The stored variant list (canonical included) is written as-is, so a
    reparse reproduces the exact entry set.
    """
    return [
        ":".join([entry.canonical, entry.kind.value, *entry.variants]) + ":"
        for entry in dictionary.entries
    ]


def load_dictionary(path, category: str) -> Dictionary:
    with open(path, encoding="utf-8") as handle:
        return parse_dictionary(handle, category)


@dataclass(frozen=True)
class Match:
    """Longest dictionary hit at one start position."""
    start: int
    length: int
    pairs: tuple[tuple[str, str], ...]  # (category, canonical), all tied for length

    @property
    def end(self) -> int:
        return self.start + self.length - 1


class EntityMatcher:
    """Multi-pattern longest-match index over folded variant token sequences.

    Immutable after construction; safe to share across workers. The same
    surface may belong to several categories: all categories tied at the
    longest length are reported. Within a category, a variant claimed by
    several entries resolves to the entry with the longest canonical name,
    then the lexicographically smallest.
    """

    def __init__(self, dictionaries: list[Dictionary]):
        self._root: dict = {}
        self._categories: set[str] = set()
        # (pattern, category) -> canonical, with the duplicate-variant rule
        claimed: dict[tuple[tuple[str, ...], str], str] = {}
        for dictionary in dictionaries:
            self._categories.add(dictionary.category)
            for entry in dictionary.entries:
                for variant in entry.variants:
                    pattern = fold_phrase(variant)
                    if not pattern:
                        continue
                    key = (pattern, dictionary.category)
                    holder = claimed.get(key)
                    if holder is None or (-len(entry.canonical), entry.canonical) < (
                            -len(holder), holder):
                        claimed[key] = entry.canonical
        for (pattern, category), canonical in claimed.items():
            node = self._root
            for token in pattern:
                node = node.setdefault(token, {})
            node.setdefault(None, {})[category] = canonical

    @property
    def categories(self) -> frozenset[str]:
        return frozenset(self._categories)

    def match_at(self, folded_tokens, start: int, category: str | None = None) -> Match | None:
        """Longest match beginning at ``start``, optionally within one category."""
        node = self._root
        best: Match | None = None
        position = start
        n = len(folded_tokens)
        while True:
            payload = node.get(None)
            if payload is not None:
                if category is None:
                    pairs = tuple(sorted(payload.items()))
                else:
                    value = payload.get(category)
                    pairs = ((category, value),) if value is not None else ()
                if pairs:
                    best = Match(start=start, length=position - start, pairs=pairs)
            if position >= n:
                break
            node = node.get(folded_tokens[position])
            if node is None:
                break
            position += 1
        return best

    def iter_matches(self, folded_tokens, category: str | None = None):
        """Yield the longest match at every start position that has one."""
        for start in range(len(folded_tokens)):
            match = self.match_at(folded_tokens, start, category)
            if match is not None:
                yield match


def compile_matcher(dictionaries: list[Dictionary]) -> EntityMatcher:
    return EntityMatcher(dictionaries)


@dataclass(frozen=True)
class CategoryStats:
    category: str
    entries: int
    leafs: int
    concepts: int
    lexemes: int


def stats(dictionaries: list[Dictionary]) -> list[CategoryStats]:
    """Raw per-category counts. No identity between the counts is assumed."""
    out = []
    for dictionary in dictionaries:
        leafs = sum(1 for e in dictionary.entries if e.kind is EntryKind.LEAF)
        concepts = sum(1 for e in dictionary.entries if e.kind is EntryKind.NODE)
        lexemes = sum(len(e.variants) for e in dictionary.entries)
        out.append(CategoryStats(category=dictionary.category,
                                 entries=len(dictionary.entries),
                                 leafs=leafs, concepts=concepts, lexemes=lexemes))
    return out
