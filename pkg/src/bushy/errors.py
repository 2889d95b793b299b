"""Shared exception types.

Every failure mode an operation promises to report gets its own class so
callers (and the CLI exit-code mapping) can tell hypothesis violations,
truncation artifacts, and broken internal invariants apart.
"""

from __future__ import annotations


class BushyError(Exception):
    """Base class for all package errors."""


class ValidationError(BushyError):
    """Malformed input object: bad arity, broken structure, bad rule."""


class HypothesisError(BushyError):
    """A lemma-shaped operation was called with its hypothesis violated."""


class TruncationError(BushyError):
    """The finite universe is too shallow to carry out the construction."""


class NoSplittingError(TruncationError):
    """No splitting pair exists at the required width inside the cone.

    Carries the failure branch data when available: the node and fiber
    base searched, and the longest comparable value chain found there.
    """

    def __init__(self, message: str, node=None, fiber_base=None, theta=None):
        super().__init__(message)
        self.node = node
        self.fiber_base = fiber_base
        self.theta = theta


class ExistsSplitError(BushyError):
    """A splitting pair exists where the caller required none; carries it."""

    def __init__(self, message: str, pair=None):
        super().__init__(message)
        self.pair = pair


class InvariantError(BushyError):
    """A derived fact the calculus guarantees failed to hold; a bug or a
    hypothesis the caller faked."""


class OracleLimitError(BushyError):
    """A brute-force oracle exceeded its configured enumeration limit."""


class NotBigError(BushyError):
    """A largeness fact required by the operation's contract fails even in
    its degenerate form (for instance the whole cone is too thin)."""
