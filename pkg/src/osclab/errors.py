"""Exception types shared across the package.

Sampling-level failures (``NearSingular``, ``DegenerateSpectrum``) derive from
``SampleRejected`` so that the disorder-averaging loop can catch and count them
uniformly.
"""


class OsclabError(Exception):
    """Base class for all package errors."""


class ConfigError(OsclabError):
    """Invalid configuration (schema violation, bad parameter range)."""


# --- lattice ---------------------------------------------------------------

class EmptyInterval(ConfigError):
    """An interval [a, b] with a > b."""


class ZeroDim(ConfigError):
    """A box with no axes."""


class BadCut(ConfigError):
    """A decomposition cut outside the interval, repeated, or unordered."""


# --- spectral / correlations ----------------------------------------------

class SampleRejected(OsclabError):
    """A disorder sample that cannot be processed; rejected and counted."""


class NearSingular(SampleRejected):
    """An eigenvalue of the effective Hamiltonian below the positivity floor."""


class DegenerateSpectrum(SampleRejected):
    """Two eigenvalues coincide within relative tolerance (ambiguous modes)."""


class NonpositiveK(ConfigError):
    """Single-site spring constant must be positive."""


class DimensionMismatch(OsclabError):
    """Operands defined on boxes of different sizes."""


class BlockMismatch(OsclabError):
    """Block correlation matrices do not match the decomposition blocks."""


# --- fock oracle ------------------------------------------------------------

class KTooSmall(OsclabError):
    """A spring constant below the oracle floor; truncation would not converge."""


class TooLarge(OsclabError):
    """Truncated space dimension exceeds the hard guard."""


class NoMatch(OsclabError):
    """No truncated eigenvalue within tolerance of the target energy."""


class AmbiguousMatch(OsclabError):
    """Several truncated eigenvalues within tolerance of the target energy."""


class CutoffTooSmall(OsclabError):
    """Thermal weight at the truncation edge is not negligible."""


# --- experiments ------------------------------------------------------------

class NumericalFailure(OsclabError):
    """A run-level numerical failure (maps to CLI exit code 3)."""


class AllSamplesRejected(NumericalFailure):
    """Every requested disorder sample was rejected."""


class RejectionCapExceeded(NumericalFailure):
    """More than 1% of requested samples were rejected."""


class InsufficientData(NumericalFailure):
    """Fewer than 4 usable distances for a decay fit."""


class NonpositiveMeanWarning(UserWarning):
    """A distance bin averaged to a nonpositive mean and was excluded."""
