"""Error types shared by every module."""

from __future__ import annotations


class MWKError(Exception):
    """Base class for library errors."""


class DomainError(MWKError, ValueError):
    """The input is mathematically invalid (zero unit, reducible modulus, ...)."""


class CapabilityError(MWKError, NotImplementedError):
    """The input is valid but outside what the library can decide or compute."""

    def __init__(self, message: str, capability: str | None = None):
        super().__init__(message)
        self.capability = capability
