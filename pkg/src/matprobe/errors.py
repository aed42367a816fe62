"""Exception hierarchy shared across the package.

Three broad categories map onto CLI exit codes: usage errors (1),
data errors (2), backend errors (3).
"""


class MatprobeError(Exception):
    """Base class for all package errors."""


class UsageError(MatprobeError):
    """Bad invocation: invalid flags, missing files, inconsistent options."""


class DataError(MatprobeError):
    """Malformed or contradictory input data."""


class BackendError(MatprobeError):
    """Predictor backend failures (network, protocol, model state)."""


# -- component model --

class EmptyInputError(DataError):
    pass


class TooManyConstituentsError(DataError):
    pass


class DuplicateSurfaceError(DataError):
    pass


class EmptyDatasetError(DataError):
    pass


# -- template engine --

class InvalidConfigError(DataError):
    pass


class MorphologyError(DataError):
    pass


# -- gateway --

class MaskMissingError(DataError):
    pass


class BackendUnavailableError(BackendError):
    pass


class MalformedResponseError(BackendError):
    pass


# -- basilisk --

class ConlluParseError(DataError):
    pass


class EmptySupportError(DataError):
    pass


class NoSeedEvidenceError(DataError):
    pass


# -- analytics / evalmetrics --

class DegenerateInputError(DataError):
    pass


class MismatchedComponentsError(DataError):
    pass


class UnknownModelTagError(DataError):
    pass


class NoOverlapError(DataError):
    pass
