"""Exception hierarchy shared across the package.

Subclasses are grouped so the CLI can map them onto exit codes:
ConfigError -> 2, DataError -> 3, NumericError -> 4.
"""


class ChairposeError(Exception):
    """Base class for all package errors."""


class ConfigError(ChairposeError):
    """Invalid or inconsistent configuration."""


class DataError(ChairposeError):
    """Invalid input data (files, sequences, shapes)."""


class SequenceTooShort(DataError):
    """Sequence has fewer frames than the operation requires."""


class LengthMismatch(DataError):
    """Two sequences that must be aligned have different lengths."""


class ShapeMismatch(DataError):
    """Array dimensions do not match the declared layout."""


class EmptyDataset(DataError):
    """Training was asked to run on zero windows."""


class ZeroVariance(DataError):
    """A correlation was requested for a constant signal."""


class NonUnitQuaternion(DataError):
    """Quaternion norm deviates from 1 beyond tolerance."""


class NonOrthonormalInput(DataError):
    """Matrix expected to be a rotation is not orthonormal."""


class NumericError(ChairposeError):
    """Numerical failure in an estimator or solver."""


class DegenerateInput(NumericError):
    """A 6D rotation vector collapsed (near-zero or parallel columns)."""


class NonFiniteLoss(NumericError):
    """Training loss became NaN or infinite."""


class SingularMassMatrix(NumericError):
    """Mass matrix failed its positive-definiteness factorization."""


class InfeasibleProblem(NumericError):
    """QP equality system is inconsistent."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class MaxIterations(NumericError):
    """Iterative solver hit its iteration cap without converging."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
