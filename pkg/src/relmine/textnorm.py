"""Text normalization: case/accent folding and the whitespace/punctuation tokenizer.

Matching throughout the package happens on a folded shadow of each token
(lowercase, diacritics stripped); original surfaces are preserved for output.
The same tokenizer runs over documents, dictionary variants, grammar literals
and marker phrases so multi-word patterns stay comparable.
"""

from __future__ import annotations

import re
import unicodedata

# Word tokens are runs of letters joined by apostrophes or hyphens between
# letters ("d'hiver", "ray-grass"); numbers keep one or more ','/'.' groups
# between digits ("0,27", "1.234,5"); everything else is a single-char token,
# so "10-2012" splits into "10", "-", "2012".
_TOKEN_RE = re.compile(
    r"\d+(?:[.,]\d+)*"
    r"|[^\W\d_]+(?:['’\-][^\W\d_]+)*"
    r"|\S",
    re.UNICODE,
)


def fold(text: str) -> str:
    """Return the matching shadow of ``text``: accents stripped, casefolded."""
    decomposed = unicodedata.normalize("NFKD", text)
    stripped = "".join(ch for ch in decomposed if not unicodedata.combining(ch))
    return stripped.casefold().replace("’", "'")


def tokenize_line(line: str) -> list[tuple[str, int]]:
    """Split one line into (surface, char_offset) pairs."""
    return [(m.group(0), m.start()) for m in _TOKEN_RE.finditer(line)]


def fold_phrase(phrase: str) -> tuple[str, ...]:
    """Tokenize and fold a free-standing phrase (variant, marker, literal)."""
    return tuple(fold(surface) for surface, _ in tokenize_line(phrase))
