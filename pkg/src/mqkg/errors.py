"""Exception hierarchy shared by every module.

Configuration problems and numerical-domain problems are kept apart so the
command line can map them onto distinct exit codes.
"""


class MQKGError(Exception):
    """Base class for all package errors."""


class ConfigError(MQKGError):
    """Invalid configuration or unparseable input file."""


class BadConfig(ConfigError):
    """A numeric configuration bound is violated."""


class DomainError(MQKGError):
    """A computation was asked to leave its mathematical domain."""


class EmptyLattice(DomainError):
    pass


class NotPSD(DomainError):
    pass


class DomainTooLarge(DomainError):
    pass


class NotNormalized(DomainError):
    pass


class TruncationTooSmall(DomainError):
    pass


class OffShellSupport(DomainError):
    pass


class OffShell(DomainError):
    pass


class DegenerateState(DomainError):
    pass


class BadWeights(DomainError):
    pass


class BadTemperature(DomainError):
    pass


class BadFrame(DomainError):
    pass


class LatticeMismatch(DomainError):
    pass


class ImaginaryResidue(DomainError):
    """A quantity that must be real carried a non-negligible imaginary part."""


class NoConvergence(DomainError):
    pass
