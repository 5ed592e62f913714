"""Exception types shared across the package.

The CLI maps these onto exit codes: ParseError -> 3, ValidationError -> 4,
anything else -> 5.
"""


class ParseError(ValueError):
    """A file could not be parsed: malformed record, bad header, wrong format."""


class ValidationError(ValueError):
    """Parsed data or call arguments violate a documented invariant."""
