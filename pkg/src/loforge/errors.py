"""Exception types shared across the package."""


class LoforgeError(Exception):
    """Base class for errors raised by this package."""


class UnsupportedOperationError(LoforgeError):
    """Operation is undefined for the given group (e.g. pairing over Z)."""


class ResourceLimitError(LoforgeError):
    """An enumeration or search exceeded its configured cap."""
