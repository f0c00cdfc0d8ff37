"""Exception hierarchy. All errors derive from :class:`LpplError`."""


class LpplError(Exception):
    """Base class for every error raised by lpplfit."""


class InvalidArgumentError(LpplError, ValueError):
    pass


class DomainError(LpplError, ValueError):
    """A timestamp lies at or beyond the critical time ``t_c``.

    ``index`` identifies the first offending observation when known.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class InsufficientDataError(LpplError, ValueError):
    pass


class DegenerateRegressorsError(LpplError, ValueError):
    """The normal equations of the linear slaving step are (near) singular."""


class DegenerateDataError(LpplError, RuntimeError):
    """No start of a multistart search produced a finite objective."""


class InvalidConfigError(LpplError, ValueError):
    pass


class SeriesFormatError(LpplError, ValueError):
    """A series file could not be parsed. ``line`` is 1-based."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line
