"""Exception types.  All derive from ValueError so callers can catch broadly."""


class ShiftlabError(ValueError):
    pass


class StructureError(ShiftlabError):
    """Input is structurally incomplete (e.g. a missing weight entry)."""


class DomainError(ShiftlabError):
    """The operation is undefined for this input (zero weights, zero polynomial, ...)."""


class CommutationError(ShiftlabError):
    """A weight family violates the commutation relations beyond tolerance."""
