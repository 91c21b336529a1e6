class GPAError(Exception):
    """Base class for errors raised by prefattach."""


class InputError(GPAError, ValueError):
    """Invalid parameters or malformed input data."""


class SolverError(GPAError, ArithmeticError):
    """The Malthusian parameter could not be bracketed or solved."""


class SamplerError(GPAError, RuntimeError):
    """The MCMC sampler could not start or continue."""
