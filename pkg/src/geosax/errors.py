"""Exception hierarchy. ``exit_code`` drives the CLI's process exit status."""


class GeosaxError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ValidationError(GeosaxError):
    """A value violates a structural invariant (bad shape, bad parameter, ...)."""


class InjectivityRadiusError(GeosaxError):
    """Input lies outside the region where exp/log maps are well defined."""


class DegenerateProjectionError(GeosaxError):
    """Matrix has no usable rank-d factorization (singular value too small)."""


class DegenerateMeanError(GeosaxError):
    """Average matrix has no rank-d spectral gap; the extrinsic mean is undefined."""


class LengthMismatchError(GeosaxError):
    """Rigid symbol distance requires equal-length sequences; use DTW instead."""


class IncompatibleManifoldsError(GeosaxError):
    """Operands live on different manifolds."""

    exit_code = 2


class ArtifactMismatchError(GeosaxError):
    """Artifacts refer to different codebooks or datasets and cannot be combined."""

    exit_code = 2


class StorageError(GeosaxError):
    """File could not be read, written, or parsed."""

    exit_code = 3


class FormatVersionError(StorageError):
    """File declares a container format version this build does not understand."""
