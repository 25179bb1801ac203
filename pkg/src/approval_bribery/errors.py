"""Exception hierarchy shared by the library and the CLI."""


class BriberyError(Exception):
    """Base class for every error raised by this package."""


class InputError(BriberyError, ValueError):
    """Malformed or inconsistent input (bad index, wrong mode, wrong witness)."""


class PlanError(InputError):
    """A plan contains an operation that cannot be applied.

    ``index`` is the position of the offending operation in the plan.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class ResourceError(BriberyError, RuntimeError):
    """An exact search exceeded its configured state cap."""

    def __init__(self, message, cap=None):
        super().__init__(message)
        self.cap = cap


class FormatError(InputError):
    """Base class for file-format problems."""


class FormatSyntaxError(FormatError):
    """The document is not well-formed (bad JSON, wrong field types)."""

    def __init__(self, message, line=None, column=None, field=None):
        super().__init__(message)
        self.line = line
        self.column = column
        self.field = field


class FormatSemanticError(FormatError):
    """The document is well-formed but refers to unknown names or is inconsistent."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
