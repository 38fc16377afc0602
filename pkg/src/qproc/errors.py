class DomainError(ValueError):
    """An argument lies outside the region where a formula or process is defined."""


class UnsupportedDegreeError(DomainError):
    """No closed form is available for the requested polynomial degree."""
