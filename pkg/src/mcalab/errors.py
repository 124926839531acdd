"""Exception types raised by the toolkit.

Everything derives from McaLabError so callers can catch broadly; the leaf
classes mirror the failure modes of table validation, frame construction,
rule evaluation and configuration parsing.
"""
from __future__ import annotations

__all__ = [
    "McaLabError",
    "TableInvalidError",
    "InvalidOrderError",
    "InvalidActionError",
    "NotNormalError",
    "NotAbelianError",
    "NotCentralError",
    "NotInvariantError",
    "NotPermutativeError",
    "FrameError",
    "WindowError",
    "SizeLimitError",
    "CapExceededError",
    "SpecError",
]


class McaLabError(ValueError):
    """Base class for all toolkit errors."""


class TableInvalidError(McaLabError):
    """A multiplication table fails a group axiom; the message names the witness."""


class InvalidOrderError(McaLabError):
    """A requested group order or factor order is not a positive integer."""


class InvalidActionError(McaLabError):
    """A semidirect-product action is not a homomorphism into the automorphisms."""


class NotNormalError(McaLabError):
    """Quotient requested by a non-normal subgroup."""


class NotAbelianError(McaLabError):
    """An operation that needs an abelian group was handed a nonabelian one."""


class NotCentralError(McaLabError):
    """An operation that needs a central subgroup was handed a non-central one."""


class NotInvariantError(McaLabError):
    """A map does not leave the distinguished subgroup invariant."""


class NotPermutativeError(McaLabError):
    """A rule lacks the permutativity needed for the requested construction."""


class FrameError(McaLabError):
    """A product frame is inconsistent (bad section, broken bijection, ...)."""


class WindowError(McaLabError):
    """Mismatched or too-small cell windows."""


class SizeLimitError(McaLabError):
    """Input exceeds the enumeration size limit for exhaustive operations."""


class CapExceededError(McaLabError):
    """An exhaustive state space exceeds the configured cap."""


class SpecError(McaLabError):
    """A JSON config/spec document is malformed; the message names the field."""
