"""Exception hierarchy shared by every module."""


class AxioclustError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(AxioclustError, ValueError):
    """Array shapes or partition structure are inconsistent."""


class DomainError(AxioclustError, ValueError):
    """A parameter lies outside the domain where an operation is defined."""


class ConfigurationError(AxioclustError, ValueError):
    """An operation needs a data view or model variant that was not supplied."""


class IngestError(AxioclustError, ValueError):
    """An input file could not be turned into a dataset or partition."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)


class IterationError(AxioclustError, RuntimeError):
    """A step of an iterative algorithm failed; carries the iteration index."""

    def __init__(self, message, iteration):
        self.iteration = iteration
        super().__init__(f"iteration {iteration}: {message}")
