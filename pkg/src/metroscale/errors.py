"""Exception hierarchy.

Everything raised on purpose by the package derives from ``MetrologyError``.
``ConfigError`` subclasses are user mistakes (CLI exit code 1); the rest are
numerical or simulation failures (exit code 2).
"""


class MetrologyError(Exception):
    pass


class ConfigError(MetrologyError):
    pass


class NonHermitian(MetrologyError):
    pass


class NumericalFailure(MetrologyError):
    pass


class DimensionMismatch(MetrologyError):
    pass


class NonUnitary(MetrologyError):
    pass


class NonUnitaryInterleave(NonUnitary):
    pass


class DimensionTooLarge(MetrologyError):
    pass


class ZeroGap(MetrologyError):
    pass


class DegenerateOperatingPoint(MetrologyError):
    pass


class DigitAmbiguous(MetrologyError):
    pass


class ZeroSlope(MetrologyError):
    pass


class InsufficientSamples(MetrologyError):
    pass


class ZeroDerivative(MetrologyError):
    pass


class DegenerateFit(MetrologyError):
    pass


class InvalidReport(MetrologyError):
    pass


class IoFailure(MetrologyError):
    pass
