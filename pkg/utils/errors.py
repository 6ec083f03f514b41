from typing import Any, Optional


class HpssError(Exception):
    """Base class for every error raised by the hpss library."""
    exit_code = 1


class ParseError(HpssError, ValueError):
    """Malformed input file, JSON document or command-line token."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        location = ""
        if line is not None and column is not None:
            location = f" (line {line}, column {column})"
        elif column is not None:
            location = f" (column {column})"
        super().__init__(f"{message}{location}")


class SpecError(HpssError, ValueError):
    """Malformed dimensions, an invalid real frame or invalid example sizes."""


class ContractError(HpssError):
    """A checked pre- or post-condition failed; `witness` holds the offending vector or element."""

    def __init__(self, message: str, witness: Any = None):
        self.witness = witness
        super().__init__(message)


class NotPoissonError(HpssError):
    """The bivector was rejected because it is not holomorphic or not Poisson."""
    exit_code = 2

    def __init__(self, message: str, verdict: Any = None):
        self.verdict = verdict
        super().__init__(message)
