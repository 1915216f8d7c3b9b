"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Raised when an input violates a documented invariant or precondition."""


class GuardError(ValueError):
    """Raised when an exhaustive enumeration would exceed its size guard."""


class NotInDomainError(ValueError):
    """Raised by a rule asked to evaluate a profile outside its declared domain."""
