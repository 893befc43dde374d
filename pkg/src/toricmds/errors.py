"""Exception types shared across the package.

Each maps to a documented CLI exit code; see cli.py.
"""

from __future__ import annotations


class ToricError(Exception):
    """Base class for package errors."""


class UsageError(ToricError):
    """Bad invocation: unknown option combinations, malformed CLI input."""

    exit_code = 1


class ValidationError(ToricError):
    """Input data fails a documented precondition (bad fan, bad divisor...)."""

    exit_code = 2


class FalsificationAlarm(ToricError):
    """A computed result contradicts a bound the audit asserts.

    Raised only by the bounds audit; this is the signal a claimed inequality
    failed on a concrete instance, so it must never be swallowed.
    """

    exit_code = 3


class CapOverflowError(ToricError):
    """An enumeration exceeded its hard cap (chambers, Mori steps)."""

    exit_code = 4


class InternalError(ToricError):
    """The engine reached a state theory says is impossible; includes the
    offending data so the bug is reproducible."""

    exit_code = 2
