"""Custom exception classes for the underlay simulator."""


class UnderlaySimError(Exception):
    """Base exception for all simulator errors."""

    pass


class DomainError(UnderlaySimError, ValueError):
    """Exception raised when an argument lies outside a function's domain."""

    pass


class DimensionError(UnderlaySimError, ValueError):
    """Exception raised for inconsistent vector or matrix dimensions."""

    pass


class DegeneracyError(UnderlaySimError):
    """Exception raised when Gram-Schmidt meets a dependent component function."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class NumericalError(UnderlaySimError):
    """Exception raised for numerical failures (singular systems, brackets, quadrature)."""

    pass


class ConfigurationError(UnderlaySimError):
    """Exception raised for configuration errors."""

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class FileOperationError(UnderlaySimError):
    """Exception raised for file operation errors."""

    pass
