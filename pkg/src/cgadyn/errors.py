"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Inputs disagree on the solution length n."""


class CapacityError(ValueError):
    """An operation needing 2^n enumeration was asked for n above the cap."""


class DomainError(ValueError):
    """An argument is outside the operation's domain (off-grid, out of box, ...)."""


class TheoremScopeError(DomainError):
    """Operation requires an injective fitness; refusing rather than guessing."""


class HorizonError(ValueError):
    """A time query lies outside the recorded horizon of a trajectory."""
