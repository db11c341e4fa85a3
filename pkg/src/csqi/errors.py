"""Exception types raised across the package.

Every error derives from :class:`CsqiError` so callers (the CLI in
particular) can catch the whole family in one place.
"""

from __future__ import annotations


class CsqiError(Exception):
    """Base class for all package errors."""


class InvalidLength(CsqiError, ValueError):
    pass


class LengthMismatch(CsqiError, ValueError):
    pass


class InvalidConfig(CsqiError, ValueError):
    pass


class InvalidInput(CsqiError, ValueError):
    pass


class InvalidSample(CsqiError, ValueError):
    pass


class InvalidRegion(CsqiError, ValueError):
    pass


class InsufficientData(CsqiError, ValueError):
    pass


class NoFiducials(CsqiError):
    pass


class InsufficientFiducials(CsqiError):
    pass


class PeriodTooShort(CsqiError, ValueError):
    pass


class TemplateTrainingFailed(CsqiError):
    pass


class DegenerateTemplate(CsqiError, ValueError):
    pass


class DegenerateSignal(CsqiError, ValueError):
    pass


class NotPrimed(CsqiError, RuntimeError):
    pass


class InstrumentationDisabled(CsqiError, RuntimeError):
    pass


class ConfigMismatch(CsqiError, ValueError):
    pass


class IoError(CsqiError, OSError):
    pass


class ParseError(CsqiError, ValueError):
    """A line of an input file could not be parsed.

    ``line`` is 1-based, or ``None`` when the problem is not tied to a line
    (an empty file, for instance).
    """

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MissingSampleRate(CsqiError, ValueError):
    pass


class UnsupportedVersion(CsqiError, ValueError):
    pass


class CorruptTemplate(CsqiError, ValueError):
    pass
