"""Exception hierarchy shared by every perisolve module."""


class PerisolveError(Exception):
    """Base class for all perisolve errors."""


class InputError(PerisolveError, ValueError):
    """Malformed or inconsistent user input."""


class NyquistViolation(InputError):
    """The sampling grid is too coarse for the requested frequencies."""


class DimensionMismatch(InputError):
    pass


class ZeroFrequency(InputError):
    pass


class RangeTooSmall(InputError):
    pass


class InvalidExponent(InputError):
    pass


class PartitionTooShort(InputError):
    pass


class ZeroInput(InputError):
    pass


class TruncationTooSmall(InputError):
    pass


class MissingFrequency(InputError, KeyError):
    def __init__(self, k):
        self.k = int(k)
        super().__init__(f"operator sequence has no entry at k={self.k}")

    def __str__(self):
        return self.args[0]


class Resonance(PerisolveError):
    """The characteristic matrix is singular (or too ill-conditioned) at ``k``."""

    def __init__(self, k, cond=float("inf")):
        self.k = int(k)
        self.cond = float(cond)
        super().__init__(f"Resonance at k={self.k} (cond={self.cond:.3e})")


class SingularSystem(PerisolveError):
    """The assembled finite-difference system is singular at grid mode ``mode``."""

    def __init__(self, mode, cond=float("inf")):
        self.mode = int(mode)
        self.cond = float(cond)
        super().__init__(
            f"Singular finite-difference system at mode k={self.mode} "
            f"(cond={self.cond:.3e})"
        )
