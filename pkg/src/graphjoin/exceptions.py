"""Exception hierarchy shared by every graphjoin module."""


class GraphJoinError(Exception):
    """Base class for all errors raised by graphjoin."""


class SchemaError(GraphJoinError):
    """A schema or tuple does not conform to its declared layout."""


class TypeConflict(SchemaError):
    """A shared attribute name carries different types in two schemas."""


class UnknownAttribute(SchemaError):
    """A predicate or spec names an attribute missing from a schema."""


class InvalidGraph(GraphJoinError):
    """Graph construction received inconsistent vertices or edges."""


class UnsupportedPredicate(GraphJoinError):
    """The predicate cannot be served by the requested algorithm."""


class PredicateSyntaxError(GraphJoinError):
    """A predicate mini-syntax string could not be parsed."""


class StorageError(GraphJoinError):
    """Base class for on-disk format problems."""


class BadMagic(StorageError):
    pass


class VersionMismatch(StorageError):
    pass


class TruncatedFile(StorageError):
    pass


class OversizeValue(StorageError):
    pass


class IdOutOfRange(StorageError, IndexError):
    pass


class SpecMismatch(GraphJoinError):
    """An operand was indexed under a hash spec other than the one the join needs."""


class ParseError(GraphJoinError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class AlreadyEnriched(GraphJoinError):
    pass


class Unreachable(GraphJoinError):
    """A random walk exhausted its step budget before reaching the target size."""

    def __init__(self, message, achieved):
        self.achieved = achieved
        super().__init__(f"{message} (achieved {achieved} vertices)")
