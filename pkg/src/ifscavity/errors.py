"""Exception hierarchy.

``ConfigError`` covers bad or incompatible parameters (CLI exit code 2);
``DomainError`` and its subclasses cover numerics leaving the validated
domain (CLI exit code 3).
"""


class ConfigError(ValueError):
    pass


class DomainError(ArithmeticError):
    pass


class TruncationError(DomainError):
    def __init__(self, message, suggested_n_max=None):
        super().__init__(message)
        self.suggested_n_max = suggested_n_max


class OverdampedError(DomainError):
    pass


class DegenerateParameterError(DomainError):
    pass


class IntegrationError(DomainError):
    pass
