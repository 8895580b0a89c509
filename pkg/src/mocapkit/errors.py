"""Exception types shared across the package."""


class MocapkitError(ValueError):
    """Base class for all mocapkit errors."""


class DimensionError(MocapkitError):
    """Array shapes do not match what an operation requires."""


class InvalidRotationError(MocapkitError):
    """A matrix fails the orthonormality / determinant check."""


class InvalidJointError(MocapkitError):
    """A joint index is out of range or not allowed (e.g. the root)."""


class DegenerateModelError(MocapkitError):
    """A model construction step produced an empty or unusable result."""


class DegenerateKeypointsError(MocapkitError):
    """Keypoints are in a configuration that makes an operation undefined."""


class SchemaError(MocapkitError):
    """A file does not conform to its declared schema."""


class FitError(MocapkitError):
    """The optimization problem is ill-posed or diverged numerically."""
