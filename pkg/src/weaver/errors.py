"""Exception types shared across the package."""


class WeaverError(Exception):
    """Base class for all errors raised by this package."""


class RangeError(WeaverError, ValueError):
    """An index or parameter lies outside its documented range."""


class CapacityError(WeaverError, ValueError):
    """A request exceeds a materialization or draw cap."""


class RefinementError(WeaverError, ValueError):
    """A dyadic point is finer than the construction depth supports."""


class DegeneracyError(WeaverError, ValueError):
    """Parent populations share the same mean; no fluctuation possible."""


class ContractError(WeaverError, ValueError):
    """A caller violated a documented precondition."""
