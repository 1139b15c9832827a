"""Exception hierarchy shared by every module."""


class GraphSegError(Exception):
    """Base class for all errors raised by graphseg."""


class ParameterError(GraphSegError, ValueError):
    """A numeric parameter is out of its allowed range."""


class ContractViolation(GraphSegError, ValueError):
    """A caller broke an operation's precondition."""


class GridError(ParameterError):
    """The requested tile count cannot be laid out on the image."""


class PPMError(GraphSegError, ValueError):
    """Malformed PPM stream. ``offset`` is the byte where parsing failed."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class PPMMagicError(PPMError):
    pass


class PPMHeaderError(PPMError):
    pass


class PPMMaxvalError(PPMError):
    pass


class PPMTruncatedError(PPMError):
    pass
