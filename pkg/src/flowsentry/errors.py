"""Exception types shared across the package.

The CLI maps these onto exit codes, so the split matters: bad input files
and malformed queries must be distinguishable from genuine answer
mismatches found by the verification harness.
"""


class ParseError(ValueError):
    """Raised for malformed network or query files; carries a line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class QueryError(ValueError):
    """Raised when a query names unknown edges or violates a precondition."""


class InternalInvariantError(RuntimeError):
    """Raised when a structural invariant that should hold by construction fails.

    These are bugs (or disproved assumptions), never user errors.
    """
