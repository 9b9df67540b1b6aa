"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid argument value or mismatched shapes."""


class FormatError(ValueError):
    """Malformed or unsupported image file."""
