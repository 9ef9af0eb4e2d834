"""Exception types shared across the package."""


class DegenerateProblemError(ValueError):
    """The two hypotheses coincide, so no test can separate them."""


class DegenerateSampleError(ValueError):
    """The sample admits no finite likelihood evaluation (zero variance MLE)."""


class UnsupportedFamilyError(ValueError):
    """The model family lacks a registered closed form for the request."""


class CapacityError(ValueError):
    """An exhaustive enumeration would exceed the configured size cap."""
