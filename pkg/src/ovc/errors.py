"""Exception base shared by every subsystem."""

from __future__ import annotations


class OvcError(Exception):
    """Base class for all errors raised by this package."""
