"""Exception hierarchy shared across the toolkit.

Data and validation problems raise :class:`ValidationError`; anything that
went wrong talking to an embedding service raises :class:`ServiceError`.
The CLI maps these onto exit codes 2 and 3 respectively.
"""

from __future__ import annotations


class SprachbundError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(SprachbundError):
    """Bad input data, a violated precondition, or a malformed file."""


class UsageError(SprachbundError):
    """Command line misuse (unknown flag, missing argument, bad combination)."""


class ServiceError(SprachbundError):
    """Embedding service unreachable or responded with a malformed payload."""


class PartialEmbeddingError(ServiceError):
    """The service answered but some sentences never received a vector."""

    def __init__(self, language: str, missing_ids: list[int]):
        self.language = language
        self.missing_ids = sorted(missing_ids)
        super().__init__(
            f"embedding service returned no vector for {len(self.missing_ids)} "
            f"sentence(s) of '{language}': ids {self.missing_ids}"
        )
