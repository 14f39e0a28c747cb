"""Exception types shared across the toolkit."""


class CigError(Exception):
    """Base class for all toolkit errors."""


class InvalidIdentifier(CigError, ValueError):
    """A name does not match the identifier grammar."""


class DisjointnessViolation(CigError):
    """A service name appears in both the provided and the required set."""


class NotComposable(CigError):
    """Two components share no satisfied services, so composition is undefined."""

    def __init__(self, left: str, right: str):
        self.left = left
        self.right = right
        super().__init__(f"not composable: S is empty for {left} and {right}")


class StatechartError(CigError):
    """Invalid statechart text or structure.

    ``line`` and ``column`` are 1-based positions in the source text when the
    problem was found while parsing, and None for direct construction.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None and column is not None:
            message = f"line {line}, column {column}: {message}"
        elif line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ParseError(StatechartError):
    """Malformed statechart declaration."""


class UnknownState(StatechartError):
    """A transition or initial declaration references an undeclared state."""


class DuplicateState(StatechartError):
    """The same state name is declared twice in one statechart."""


class MissingInitial(StatechartError):
    """A statechart declares no initial state."""


class DuplicateComponent(StatechartError):
    """The same component name appears twice (second header, or twice in a chart set)."""


class NoInteraction(CigError):
    """No cross-component service pairs exist, so there is no interaction graph."""


class SchemaError(CigError):
    """A JSON document does not match the expected schema."""


class DuplicateTestId(CigError):
    """Test-case identifiers collide across libraries."""


class UnreachableProvider(CigError):
    """No event path drives a statechart from its initial state to a providing state."""
