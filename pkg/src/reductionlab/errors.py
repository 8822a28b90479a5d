"""Exception types shared across the lab."""


class LabError(ValueError):
    pass


class AllZeroAmplitudes(LabError):
    """Every branch of a superposition has zero modulus."""


class IndexOutOfRange(LabError, IndexError):
    pass


class EmptyGroup(LabError):
    """A CM-internal group carries zero total probability."""


class DegenerateP0(LabError):
    pass


class ZeroSigma(LabError):
    pass


class TooLarge(LabError):
    """Exact enumeration requested beyond its size bound."""


class NonPositiveInput(LabError):
    pass


class ConfigError(LabError):
    """Run configuration failed validation."""
