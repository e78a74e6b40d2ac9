class ResourceRefusal(RuntimeError):
    """Raised when a computation would exceed its configured enumeration budget."""


class SideConditionError(ValueError):
    """Raised when an inequality is evaluated outside the range it is stated for."""
