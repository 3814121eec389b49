"""Exception types shared across the library."""


class BanditfolioError(Exception):
    """Base class for all library-specific errors."""


class PanelFormatError(BanditfolioError):
    """An input file cannot be parsed, or data violates the panel schema."""


class InsufficientDataError(BanditfolioError):
    """An operation needs more history than is available."""


class WindowBoundsError(BanditfolioError):
    """A window slice falls outside the panel."""


class BankruptcyError(BanditfolioError):
    """A net return of -100% or worse makes wealth non-positive."""


class SingularCovarianceError(BanditfolioError):
    """The regularized covariance cannot be factorized or solved reliably."""


class ConfigError(BanditfolioError):
    """A run configuration or manifest is invalid."""
