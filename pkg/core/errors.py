"""
Errors Module.

Exception hierarchy shared by the library and the command line layer.
Library code raises these; only `main.py` maps them to exit codes.
"""


class KernelCompressionError(Exception):
    """Base class for every error raised by the toolkit."""


class LibsvmParseError(KernelCompressionError):
    """Raised when a LIBSVM line cannot be parsed."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        self.message = message
        super().__init__(f"line {line_number}: {message}")


class DimensionMismatchError(KernelCompressionError, ValueError):
    """Raised when vector/matrix shapes do not agree."""


class DegenerateProblemError(KernelCompressionError):
    """Raised when a coreset problem has no usable direction (all rows zero, r = 0)."""


class ConfigError(KernelCompressionError):
    """Raised for invalid experiment configuration."""


class DatasetIOError(KernelCompressionError, OSError):
    """Raised when a dataset or output file cannot be read or written."""
