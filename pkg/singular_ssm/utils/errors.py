"""
Exception hierarchy for the singular_ssm package.

Numerical layers raise these; the command-line layer maps them to exit codes.
"""

from typing import Optional


class SingularSSMError(Exception):
    """Base class for all package errors."""
    pass


class SingularTriangular(SingularSSMError):
    """A triangular factor has a diagonal entry at or below the configured floor."""

    def __init__(self, message: str, index: Optional[int] = None, step: Optional[int] = None):
        self.index = index
        self.step = step
        super().__init__(message)

    def at_step(self, step: int) -> "SingularTriangular":
        """Return a copy of this error tagged with a time step."""
        return SingularTriangular(f"step {step}: {self.args[0]}", index=self.index, step=step)


class RankDeficient(SingularSSMError):
    """The full-rank assumptions on C_t, Q_t or F_t are violated."""

    def __init__(self, message: str, factor: Optional[str] = None, step: Optional[int] = None):
        self.factor = factor
        self.step = step
        super().__init__(message)

    def at_step(self, step: int) -> "RankDeficient":
        """Return a copy of this error tagged with a time step."""
        return RankDeficient(f"step {step}: {self.args[0]}", factor=self.factor, step=step)


class DimensionMismatch(SingularSSMError, ValueError):
    """Array shapes are inconsistent with each other or with the model dimensions."""
    pass


class ModelParseError(SingularSSMError):
    """A model, reduced-model or observation file could not be read."""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        location = []
        if field is not None:
            location.append(f"field '{field}'")
        if line is not None:
            location.append(f"line {line}")
        prefix = f"[{', '.join(location)}] " if location else ""
        super().__init__(f"{prefix}{message}")


class SizeLimit(SingularSSMError):
    """A dense reference computation exceeds the desk-scale size limit."""
    pass


class NumericalFailure(SingularSSMError):
    """A fragile baseline produced NaN/Inf or failed a factorization.

    Baselines record this on their output instead of raising it so that benchmark
    tables can show the failure as data.
    """

    def __init__(self, message: str, step: Optional[int] = None):
        self.step = step
        super().__init__(message)
