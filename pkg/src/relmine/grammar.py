"""Finite-state local grammars with subgraph calls and output tags.

A grammar set is parsed from a line-oriented text format:

    graph <name> [tag <open> <close>]
    state <id> [initial] [final]
    trans <from> <to> lit:"..." | class:NUMBER|WORD|PUNCT|ANY
                      | dict:<category> | sub:<name> | eps
    entry <graph> <category>
    # comment

Execution simulates the nondeterministic automaton over the token stream,
consuming folded tokens. Dictionary transitions consume the longest match
of their category; subgraph calls run the named automaton in place and,
when that automaton declares output tags, record the consumed span as a
tagged capture. The longest accepting span wins; zero-length matches are
rejected.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from .corpus import Document, Token
from .errors import (DanglingSubgraphError, GrammarSyntaxError, NoEntryPointError,
                     RecursionLimitError)
from .lexicon import EntityMatcher
from .textnorm import fold

DEFAULT_RECURSION_LIMIT = 16


class TokenClass(enum.Enum):
    NUMBER = "NUMBER"
    WORD = "WORD"
    PUNCT = "PUNCT"
    ANY = "ANY"


class LabelType(enum.Enum):
    LITERAL = "lit"
    CLASS = "class"
    DICTREF = "dict"
    SUBGRAPH = "sub"
    EPSILON = "eps"


@dataclass(frozen=True)
class TransitionLabel:
    type: LabelType
    value: str | TokenClass | None = None


@dataclass
class Automaton:
    name: str
    states: set[int] = field(default_factory=set)
    initial: int | None = None
    finals: set[int] = field(default_factory=set)
    # parse order preserved per state for deterministic exploration
    transitions: dict[int, list[tuple[TransitionLabel, int]]] = field(default_factory=dict)
    output_open: str | None = None
    output_close: str | None = None

    @property
    def tagged(self) -> bool:
        return self.output_open is not None and self.output_close is not None


@dataclass
class GrammarSet:
    automata: dict[str, Automaton] = field(default_factory=dict)
    entry_points: list[tuple[str, str]] = field(default_factory=list)
    recursion_limit: int = DEFAULT_RECURSION_LIMIT


@dataclass(frozen=True)
class Capture:
    open_tag: str
    close_tag: str
    start_word: int
    end_word: int  # inclusive


@dataclass(frozen=True)
class GrammarMention:
    category: str
    graph: str
    start_word: int
    end_word: int  # inclusive
    captures: tuple[Capture, ...]


_NUMBER_RE = re.compile(r"\d+(?:[.,]\d+)*\Z")
_LIT_RE = re.compile(r'lit:"(.*)"\Z')


def _token_in_class(token: Token, cls: TokenClass) -> bool:
    if cls is TokenClass.ANY:
        return True
    if cls is TokenClass.NUMBER:
        return _NUMBER_RE.match(token.surface) is not None
    if cls is TokenClass.WORD:
        return any(ch.isalpha() for ch in token.surface)
    return not any(ch.isalnum() for ch in token.surface)


def _parse_label(text: str, line_no: int) -> TransitionLabel:
    if text == "eps":
        return TransitionLabel(LabelType.EPSILON)
    lit = _LIT_RE.match(text)
    if lit:
        value = fold(lit.group(1))
        if not value:
            raise GrammarSyntaxError("empty literal", line_no)
        return TransitionLabel(LabelType.LITERAL, value)
    if text.startswith("class:"):
        name = text[len("class:"):]
        try:
            return TransitionLabel(LabelType.CLASS, TokenClass(name))
        except ValueError:
            raise GrammarSyntaxError(f"unknown token class {name!r}", line_no) from None
    if text.startswith("dict:"):
        category = text[len("dict:"):]
        if not category:
            raise GrammarSyntaxError("empty dictionary category", line_no)
        return TransitionLabel(LabelType.DICTREF, category)
    if text.startswith("sub:"):
        name = text[len("sub:"):]
        if not name:
            raise GrammarSyntaxError("empty subgraph name", line_no)
        return TransitionLabel(LabelType.SUBGRAPH, name)
    raise GrammarSyntaxError(f"unknown transition label {text!r}", line_no)


def parse_grammar(definition: str, recursion_limit: int = DEFAULT_RECURSION_LIMIT) -> GrammarSet:
    """Parse the textual grammar format into a validated GrammarSet."""
    gs = GrammarSet(recursion_limit=recursion_limit)
    current: Automaton | None = None
    for line_no, raw in enumerate(definition.split("\n"), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        directive = parts[0]
        if directive == "graph":
            if len(parts) not in (2, 5) or (len(parts) == 5 and parts[2] != "tag"):
                raise GrammarSyntaxError("expected: graph <name> [tag <open> <close>]", line_no)
            name = parts[1]
            if name in gs.automata:
                raise GrammarSyntaxError(f"graph {name!r} defined twice", line_no)
            current = Automaton(name=name)
            if len(parts) == 5:
                current.output_open, current.output_close = parts[3], parts[4]
            gs.automata[name] = current
        elif directive == "state":
            if current is None:
                raise GrammarSyntaxError("state outside a graph", line_no)
            if len(parts) < 2:
                raise GrammarSyntaxError("expected: state <id> [initial] [final]", line_no)
            try:
                state = int(parts[1])
            except ValueError:
                raise GrammarSyntaxError(f"state id must be an integer: {parts[1]!r}",
                                         line_no) from None
            flags = parts[2:]
            unknown = [f for f in flags if f not in ("initial", "final")]
            if unknown:
                raise GrammarSyntaxError(f"unknown state flag {unknown[0]!r}", line_no)
            current.states.add(state)
            if "initial" in flags:
                if current.initial is not None and current.initial != state:
                    raise GrammarSyntaxError("graph has two initial states", line_no)
                current.initial = state
            if "final" in flags:
                current.finals.add(state)
        elif directive == "trans":
            if current is None:
                raise GrammarSyntaxError("trans outside a graph", line_no)
            if len(parts) < 4:
                raise GrammarSyntaxError("expected: trans <from> <to> <label>", line_no)
            try:
                src, dst = int(parts[1]), int(parts[2])
            except ValueError:
                raise GrammarSyntaxError("transition endpoints must be integers",
                                         line_no) from None
            if src not in current.states or dst not in current.states:
                raise GrammarSyntaxError("transition endpoint not declared", line_no)
            label = _parse_label(" ".join(parts[3:]), line_no)
            current.transitions.setdefault(src, []).append((label, dst))
        elif directive == "entry":
            if len(parts) != 3:
                raise GrammarSyntaxError("expected: entry <graph> <category>", line_no)
            gs.entry_points.append((parts[1], parts[2]))
        else:
            raise GrammarSyntaxError(f"unknown directive {directive!r}", line_no)

    for auto in gs.automata.values():
        if auto.initial is None:
            raise GrammarSyntaxError(f"graph {auto.name!r} has no initial state")
        for edges in auto.transitions.values():
            for label, _ in edges:
                if label.type is LabelType.SUBGRAPH and label.value not in gs.automata:
                    raise DanglingSubgraphError(label.value)
    for name, _ in gs.entry_points:
        if name not in gs.automata:
            raise DanglingSubgraphError(name)
    if not gs.entry_points:
        raise NoEntryPointError("grammar declares no entry points")
    return gs


def load_grammar(paths, recursion_limit: int = DEFAULT_RECURSION_LIMIT) -> GrammarSet:
    """Concatenate one or more grammar files and parse them as one set."""
    chunks = []
    for path in paths:
        with open(path, encoding="utf-8") as handle:
            chunks.append(handle.read())
    return parse_grammar("\n".join(chunks), recursion_limit)


def _run(gs: GrammarSet, auto: Automaton, tokens, folded, start: int,
         matcher: EntityMatcher | None, depth: int,
         memo: dict) -> dict[int, tuple[Capture, ...]]:
    """All accepting end positions (exclusive) of ``auto`` from ``start``.

    Returns {end_exclusive: captures}; captures come from the first path
    found in breadth-first order, which is deterministic because per-state
    transition lists preserve parse order. Zero-length acceptance is
    discarded. Results per (graph, position) are memoized per top call.
    """
    if depth > gs.recursion_limit:
        raise RecursionLimitError(
            f"subgraph nesting exceeded {gs.recursion_limit} (cyclic grammar?)")
    key = (auto.name, start)
    if key in memo:
        cached = memo[key]
        if cached is None:
            raise RecursionLimitError(
                f"graph {auto.name!r} recurses into itself at position {start}")
        return cached
    memo[key] = None  # in-progress marker

    results: dict[int, tuple[Capture, ...]] = {}
    visited: set[tuple[int, int]] = set()
    queue: list[tuple[int, int, tuple[Capture, ...]]] = [(auto.initial, start, ())]
    visited.add((auto.initial, start))
    head = 0
    while head < len(queue):
        state, pos, captures = queue[head]
        head += 1
        if state in auto.finals and pos > start and pos not in results:
            results[pos] = captures
        for label, target in auto.transitions.get(state, ()):
            moves: list[tuple[int, tuple[Capture, ...]]] = []
            if label.type is LabelType.EPSILON:
                moves.append((pos, captures))
            elif pos >= len(tokens):
                continue
            elif label.type is LabelType.LITERAL:
                if folded[pos] == label.value:
                    moves.append((pos + 1, captures))
            elif label.type is LabelType.CLASS:
                if _token_in_class(tokens[pos], label.value):
                    moves.append((pos + 1, captures))
            elif label.type is LabelType.DICTREF:
                if matcher is not None:
                    hit = matcher.match_at(folded, pos, category=label.value)
                    if hit is not None:
                        moves.append((pos + hit.length, captures))
            elif label.type is LabelType.SUBGRAPH:
                sub = gs.automata[label.value]
                for sub_end, sub_caps in _run(gs, sub, tokens, folded, pos, matcher,
                                              depth + 1, memo).items():
                    moves.append((sub_end, captures + sub_caps))
            for new_pos, new_caps in moves:
                if (target, new_pos) not in visited:
                    visited.add((target, new_pos))
                    queue.append((target, new_pos, new_caps))

    if auto.tagged:
        results = {
            end: caps + (Capture(auto.output_open, auto.output_close, start, end - 1),)
            for end, caps in results.items()
        }
    memo[key] = results
    return results


def match_at(gs: GrammarSet, entry: str, tokens, start: int,
             matcher: EntityMatcher | None = None,
             _folded=None, _memo=None) -> tuple[int, list[Capture]] | None:
    """Longest accepting span of graph ``entry`` starting at ``start``.

    Returns (end_word inclusive, captures) or None when nothing accepts.
    """
    if entry not in gs.automata:
        raise DanglingSubgraphError(entry)
    if not 0 <= start <= len(tokens):
        raise IndexError(f"start {start} outside token range")
    folded = _folded if _folded is not None else [t.folded for t in tokens]
    memo = _memo if _memo is not None else {}
    results = _run(gs, gs.automata[entry], tokens, folded, start, matcher, 0, memo)
    if not results:
        return None
    end = max(results)
    return end - 1, sorted(results[end], key=lambda c: (c.start_word, c.end_word))


def scan(gs: GrammarSet, doc: Document, matcher: EntityMatcher | None = None) -> list[GrammarMention]:
    """Left-to-right non-overlapping longest matches for every entry point."""
    mentions: list[GrammarMention] = []
    folded = doc.folded()
    for graph, category in gs.entry_points:
        memo: dict = {}
        pos = 0
        while pos < len(doc.tokens):
            hit = match_at(gs, graph, doc.tokens, pos, matcher,
                           _folded=folded, _memo=memo)
            if hit is None:
                pos += 1
                continue
            end, captures = hit
            mentions.append(GrammarMention(category=category, graph=graph,
                                           start_word=pos, end_word=end,
                                           captures=tuple(captures)))
            pos = end + 1
    mentions.sort(key=lambda m: (m.start_word, -(m.end_word - m.start_word), m.category))
    return mentions
