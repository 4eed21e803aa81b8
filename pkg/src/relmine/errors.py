"""Exception hierarchy shared by all relmine modules."""


class RelmineError(Exception):
    """Base class for every error raised by this package."""


class EncodingError(RelmineError):
    """Raw input is not valid UTF-8 and strict decoding was requested."""


class EmptyDocumentError(RelmineError):
    """Input contains no non-whitespace characters."""


class SegmentationError(RelmineError):
    """Segmentation config does not fit the document (header too large)."""


class FormatError(RelmineError):
    """A resource file line does not conform to its format."""

    def __init__(self, message, line_no=None):
        super().__init__(message if line_no is None else f"line {line_no}: {message}")
        self.line_no = line_no


class DuplicateCanonicalError(RelmineError):
    """Two dictionary entries in one category share a canonical name."""

    def __init__(self, name):
        super().__init__(f"duplicate canonical entry: {name!r}")
        self.name = name


class GrammarSyntaxError(RelmineError):
    """A grammar file line cannot be parsed."""

    def __init__(self, message, line_no=None):
        super().__init__(message if line_no is None else f"line {line_no}: {message}")
        self.line_no = line_no


class DanglingSubgraphError(RelmineError):
    """A grammar references a subgraph that is not defined."""

    def __init__(self, name):
        super().__init__(f"reference to undefined graph: {name!r}")
        self.name = name


class NoEntryPointError(RelmineError):
    """A grammar set declares no entry points."""


class RecursionLimitError(RelmineError):
    """Subgraph nesting exceeded the configured bound (cyclic grammar)."""


class TagSequenceError(RelmineError):
    """An annotation tag sequence is invalid under the chosen scheme."""

    def __init__(self, message, line_no=None):
        super().__init__(message if line_no is None else f"line {line_no}: {message}")
        self.line_no = line_no


class ArityUnsupportedError(RelmineError):
    """Contextual extraction supports exactly three category tags."""


class NoDatesError(RelmineError):
    """No relation row in scope carries a date."""


class TooManySetsError(RelmineError):
    """Venn region enumeration is bounded to four target sets."""
