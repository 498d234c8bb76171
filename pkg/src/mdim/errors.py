"""Exception types; each maps onto a CLI exit code."""


class MdimError(Exception):
    exit_code = 1


class InputError(MdimError, ValueError):
    """Malformed or out-of-contract input."""

    exit_code = 4


class OutOfRangeError(InputError):
    """A target value lies outside the range of the function being inverted."""


class ResourceLimitError(MdimError):
    """A configured node, memo or state budget was exceeded."""

    exit_code = 3


class InconsistencyError(MdimError):
    """An internal invariant failed (e.g. not all roots were accounted for)."""

    exit_code = 2
