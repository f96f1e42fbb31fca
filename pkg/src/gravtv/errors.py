"""Exception types shared across the package."""


class GravTvError(Exception):
    """Base class for errors raised by gravtv."""


class IllPosedPairError(GravTvError, ValueError):
    """The matrix pair has a (numerically) common null space."""


class ResourceLimitError(GravTvError, MemoryError):
    """A requested allocation exceeds the configured memory budget."""
