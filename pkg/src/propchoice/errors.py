"""Exception types shared across the package.

Every error carries a short machine-readable ``code`` so CLI consumers can
react without parsing prose. The CLI maps exception classes to exit codes:
input parsing problems (2), violated preconditions (3), generator refusals
(4) and enumeration cap overruns (5).
"""

from __future__ import annotations


class PropChoiceError(Exception):
    """Base class; ``code`` is a stable kebab-case identifier."""

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


class ParseError(PropChoiceError):
    """Malformed input document (JSON syntax, schema shape, bad rational)."""


class ValidationError(PropChoiceError):
    """Structurally well-formed input that violates a semantic precondition."""


class NotAMatroidError(ValidationError):
    """A swap guaranteed only for matroidal systems does not exist."""

    def __init__(self, message: str):
        super().__init__("not-a-matroid", message)


class SearchExhaustedError(ValidationError):
    """A search the theory guarantees to succeed came up empty."""

    def __init__(self, message: str):
        super().__init__("search-exhausted", message)


class GeneratorRefusal(PropChoiceError):
    """A fixture generator cannot honour the requested parameters."""


class EnumerationCapExceeded(PropChoiceError):
    """An enumeration outgrew the configured cap."""

    def __init__(self, cap: int, context: str):
        super().__init__(
            "enumeration-cap-exceeded",
            f"enumeration exceeded cap of {cap} while {context}",
        )
        self.cap = cap
