"""Error types raised by the extraction and push surfaces.

Every error carries a structured detail dict so CLI output and test
assertions can inspect the offending sentence or artifact without
string matching.
"""

from __future__ import annotations


class ExtractorError(Exception):
    def __init__(self, message: str, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def __str__(self) -> str:
        if not self.details:
            return self.message
        parts = ", ".join(f"{k}={v!r}" for k, v in sorted(self.details.items()))
        return f"{self.message} ({parts})"


class ConfigError(ExtractorError):
    """Configuration value out of range or incompatible with the model."""


class CorpusError(ExtractorError):
    """Corpus file malformed (blank line, stray tab, empty stream)."""


class NumericError(ExtractorError):
    """Non-finite values in gradients or scores."""


class PushError(ExtractorError):
    """Artifact upload rejected or unreachable after retries."""
