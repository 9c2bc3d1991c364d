"""Exception hierarchy for ofdm-ici.

Every error raised by the library derives from OfdmIciError so the CLI
can turn any of them into a diagnostic and a non-zero exit status.
"""


class OfdmIciError(Exception):
    """Base class for all ofdm-ici errors."""
    pass


class InvalidConfigError(OfdmIciError, ValueError):
    """A value type was constructed with parameters that break its invariants."""
    pass


class DelayExceedsCpError(OfdmIciError, ValueError):
    """A path delay is not shorter than the cyclic prefix (no-ISI assumption violated)."""
    pass


class SameSubcarrierError(OfdmIciError, ValueError):
    """An ICI coefficient was requested with k == l."""
    pass


class SubcarrierNotUsedError(OfdmIciError, ValueError):
    """A subcarrier index is not in the used-subcarrier set S."""
    pass


class UnknownProfileError(OfdmIciError, KeyError):
    """No tap profile with the requested name is registered."""
    pass


class RealizationParseError(OfdmIciError, ValueError):
    """A channel realization document could not be parsed."""

    def __init__(self, message: str, line: int = 0, field: str = ""):
        self.line = line
        self.field = field
        where = f"line {line}" if line else "document"
        if field:
            where += f", field '{field}'"
        super().__init__(f"{where}: {message}")


class EmptyRealizationError(OfdmIciError, ValueError):
    """A channel realization has no paths."""
    pass


class InvalidOrderError(OfdmIciError, ValueError):
    """Constellation order is not a square of a power of two."""
    pass


class BitLengthError(OfdmIciError, ValueError):
    """A bit vector does not have log2(M) entries."""
    pass


class DegenerateDenominatorError(OfdmIciError, ZeroDivisionError):
    """Var(ICI) + N0 is zero, so the SINR-per-bit ratio is undefined."""
    pass


class ZeroChannelError(OfdmIciError, ZeroDivisionError):
    """|H| == 0, zero-forcing equalization is undefined."""
    pass


class DiscardedResultError(OfdmIciError, ValueError):
    """A BER estimate below the error-bit threshold was used where a valid one is required."""
    pass


class ZeroBepError(OfdmIciError, ZeroDivisionError):
    """The analytic BEP is zero, so the error factor is undefined."""
    pass


class SingularCovarianceError(OfdmIciError, ValueError):
    """The sample covariance is singular or too ill-conditioned to invert."""
    pass


class ScenarioError(OfdmIciError, ValueError):
    """A scenario document failed to parse or validate."""

    def __init__(self, message: str, key_path: str = ""):
        self.key_path = key_path
        super().__init__(f"{key_path}: {message}" if key_path else message)


class OutputError(OfdmIciError, ValueError):
    """A result cell cannot be written (non-finite number or unsupported type)."""
    pass
