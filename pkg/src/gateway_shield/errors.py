"""Exception types shared across the package."""


class GatewayShieldError(Exception):
    pass


class ConfigError(GatewayShieldError, ValueError):
    """Invalid configuration or scenario."""


class InvalidInputError(GatewayShieldError, ValueError):
    """An argument is outside the domain of an operation."""


class OrderingError(GatewayShieldError, ValueError):
    """Packets or arrival times were supplied out of order."""


class InvariantError(GatewayShieldError, RuntimeError):
    """An internal invariant was violated (e.g. unsorted trace handed to a merge)."""


class ParseError(GatewayShieldError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class VerificationError(GatewayShieldError):
    """A numerical self-check (e.g. closed form vs brute force) disagreed."""
