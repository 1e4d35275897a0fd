"""Exception hierarchy shared by the library and the command line."""


class WpmixError(Exception):
    """Base class for all package errors."""


class ConfigurationError(WpmixError, ValueError):
    """Invalid model parameters, index sets or configuration files."""


class NumericalError(WpmixError, RuntimeError):
    """Quadrature or root finding did not converge."""


class InconclusiveOracleError(WpmixError, RuntimeError):
    """A Monte Carlo oracle collected too few samples to be meaningful."""
