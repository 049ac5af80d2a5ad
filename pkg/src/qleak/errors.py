"""Exception hierarchy shared by all qleak modules."""


class QleakError(Exception):
    """Base class for every error raised by this package."""


# --- qasm ---------------------------------------------------------------

class QasmSyntaxError(QleakError):
    """Malformed token or statement; message carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UnsupportedGateError(QleakError):
    """Gate name or statement kind outside the supported subset."""


class RegisterIndexError(QleakError):
    """Register reference at or beyond the declared register size."""


# --- sim ----------------------------------------------------------------

class DimensionError(QleakError):
    """Gate addresses a qubit index outside the state vector."""


class CapacityError(QleakError):
    """Circuit exceeds the configured qubit ceiling."""


# --- trace / features ---------------------------------------------------

class TooFewSamples(QleakError):
    """Not enough samples for the requested statistic."""


class ProbeUnavailable(QleakError):
    """OS resident-set query is not supported on this host."""


class EmptyCorpus(QleakError):
    """Normalizer fitting needs at least two profiles."""


# --- infer / match ------------------------------------------------------

class InsufficientNeighbors(QleakError):
    """Fewer database rows than k after exclusion."""


class EmptyDistribution(QleakError):
    """Empirical distribution has no samples."""


class MissingReference(QleakError):
    """Candidate circuit has no prerecorded reference trace."""


# --- evaluate -----------------------------------------------------------

class UncoveredLabel(QleakError):
    """Qubit count falls outside every configured stratum."""
