"""Exception hierarchy shared across the package.

The CLI maps :class:`InputError` to exit code 1 and
:class:`InfeasibleError` / :class:`ConvergenceError` to exit code 2.
"""


class CommexError(Exception):
    """Base class for all package errors."""


class InputError(CommexError, ValueError):
    """Bad user input: malformed files, out-of-range parameters."""


class ParseError(InputError):
    def __init__(self, lineno, line, reason="malformed line"):
        self.lineno = lineno
        self.line = line
        super().__init__(f"line {lineno}: {reason}: {line!r}")


class DomainError(InputError):
    """A numeric argument lies outside the domain of the operation."""


class DuplicateEdgeError(InputError):
    pass


class ScenarioError(InputError):
    pass


class UndefinedScoreError(CommexError, ValueError):
    """The score is undefined for this input (e.g. an edgeless graph)."""


class SingularPointError(DomainError):
    pass


class DegenerateError(DomainError):
    pass


class InfeasibleError(CommexError, ValueError):
    """A subset, move or start violates the size constraints."""


class ConvergenceError(CommexError, RuntimeError):
    def __init__(self, message, last_iterate=None, iterations=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.iterations = iterations
