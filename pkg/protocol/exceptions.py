"""
Error types raised by the protocol analytics, simulator and CLI
"""


class ProtocolError(Exception):
    """Base class for every error the protocol package raises"""
    exit_code = 1


class ParameterDomainError(ProtocolError, ValueError):
    """A parameter lies outside the domain an operation accepts"""


class DegenerateModelError(ParameterDomainError):
    """Arrival or packet distribution has zero mean"""


class InfinitePowerError(ParameterDomainError):
    """Fading quantile is zero, so no finite power meets the SNR target"""


class ConfigurationError(ProtocolError):
    """Config file is unreadable or fails validation"""
    exit_code = 2


class InfeasibleParameterError(ProtocolError):
    """Protocol parameters violate a feasibility bound"""
    exit_code = 3

    def __init__(self, message: str, bound: str):
        super().__init__(message)
        self.bound = bound


class NoSolutionError(ProtocolError):
    """Neither root of the zero-bit duty-cycle quadratic validates"""
    exit_code = 3
