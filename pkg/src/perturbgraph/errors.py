"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class PerturbGraphError(Exception):
    exit_code = 1


class ParameterError(PerturbGraphError, ValueError):
    """An argument is outside the range an operation accepts."""


class DomainError(PerturbGraphError, ValueError):
    """The input graph or vertex set violates an operation's precondition."""


class DecodeError(DomainError):
    """A bit string does not describe a connected set of the graph.

    ``position`` is the index of the offending bit (or the length of the
    string when it ran out early).
    """

    def __init__(self, message, position):
        super().__init__(f"{message} (bit position {position})")
        self.position = position


class CapabilityError(PerturbGraphError):
    """The instance is too large for an exact routine."""

    exit_code = 2


class ConfigError(ParameterError):
    pass


class ReportError(PerturbGraphError):
    pass
