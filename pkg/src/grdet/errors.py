"""Exception hierarchy shared by all grdet modules."""


class DomainError(ValueError):
    """An argument violates an operation's stated precondition."""


class DescriptorMismatch(DomainError):
    """Two objects living over different groups were combined."""


class UnsupportedFamily(DomainError):
    """The requested operation is undefined for this group family."""


class ScaleExceeded(DomainError):
    """The instance is beyond the documented brute-force scale."""


class SingularCompression(DomainError):
    """A full-group compression is singular, so the dual solution set is infinite."""


class FormatError(DomainError):
    """Malformed textual input (ring-element files, matrices, descriptors)."""
