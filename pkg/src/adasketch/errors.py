"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A parameter lies outside its admissible domain."""


class DimensionError(ValueError):
    """Index or shape is inconsistent with the ambient dimension."""


class CapViolationError(RuntimeError):
    """Measured information cost exceeded the method's declared cap."""
