"""Typed errors raised by the library.

Every failure mode has its own class so callers (and the CLI) can react to
the specific condition; all of them derive from ``FutoptError`` which is a
``ValueError``.
"""

from __future__ import annotations


class FutoptError(ValueError):
    """Base class for every domain error in the package."""


# construction / validation
class TooShort(FutoptError):
    pass


class NonFiniteValue(FutoptError):
    pass


class NonPositiveStep(FutoptError):
    pass


class InvalidParameter(FutoptError):
    pass


# calibration
class DegenerateSeries(FutoptError):
    pass


class NeedsAtLeastFourPoints(FutoptError):
    pass


class NoMeanReversion(FutoptError):
    pass


class OscillatoryOrInvalid(FutoptError):
    pass


class DegenerateVolatility(FutoptError):
    pass


class ZeroPrice(FutoptError):
    pass


class ZeroVolatility(FutoptError):
    pass


class SignFlip(FutoptError):
    pass


class UnsupportedModel(FutoptError):
    pass


# pricing
class NegativeUnderlying(FutoptError):
    pass


class NegativeStrike(FutoptError):
    pass


class NegativeStd(FutoptError):
    pass


class NonPositiveVol(FutoptError):
    pass


# monte carlo
class HorizonMismatch(FutoptError):
    pass


class BudgetExceeded(FutoptError):
    pass


# io
class ParseError(FutoptError):
    def __init__(self, line: int, message: str = ""):
        self.line = line
        super().__init__(f"line {line}: {message}" if message else f"line {line}")


class EmptyFile(FutoptError):
    pass


class NonMonotoneDates(FutoptError):
    pass
