"""Exception hierarchy shared by all pipeline stages.

InputError subclasses map to CLI/service exit code 1 (bad input);
anything else escaping the pipeline is an internal error (exit code 2).
"""


class TangleScanError(Exception):
    """Base class for all tanglescan errors."""


class InputError(TangleScanError):
    """The caller supplied something unusable (file, config, argument)."""


class FileNotFoundInputError(InputError):
    """Image or config path does not exist."""


class UnsupportedFormatError(InputError):
    """File exists but is not a format we decode (or has unsupported parameters)."""


class CorruptDataError(InputError):
    """File has the right magic but its payload is truncated or inconsistent."""


class ConfigError(InputError):
    """Config file or inline config contains unknown keys or bad values."""


class DegenerateHistogramError(TangleScanError):
    """All pixels share one intensity; Otsu has no two classes to separate.

    Not an InputError: the pipeline treats this as a per-direction skip.
    """


class UnfittablePatchError(TangleScanError):
    """Patch midpoints have fewer than two distinct abscissae on both axes."""
