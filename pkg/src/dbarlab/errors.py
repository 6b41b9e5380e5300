"""Exception hierarchy shared by all modules."""


class DbarError(Exception):
    """Base class for library errors."""


class IndexOutOfRange(DbarError, IndexError):
    pass


class InvalidArg(DbarError, ValueError):
    pass


class DimensionMismatch(DbarError, ValueError):
    pass


class ShapeMismatch(DbarError, ValueError):
    pass


class DegreeOverflow(DbarError, ValueError):
    pass


class InvalidDegree(DbarError, ValueError):
    pass


class NotClosed(DbarError):
    """Right-hand side of the dbar equation is not in the kernel of dbar."""


class AnsatzInsufficient(DbarError):
    """The finite ansatz could not reproduce the data exactly."""


class QuadratureFailure(DbarError):
    pass


class ConfigError(DbarError):
    """Configuration problem; ``errors`` holds ``(key, line, reason)`` triples."""

    def __init__(self, errors):
        self.errors = list(errors)
        msg = "; ".join(f"{k} (line {ln}): {why}" for k, ln, why in self.errors)
        super().__init__(msg)


class ParseError(ConfigError):
    pass


class ValidationError(ConfigError):
    pass
