"""Exceptions raised on violated contracts that callers can trigger."""


class ContractError(AssertionError):
    """A documented precondition of an operation does not hold."""


class ShapeError(ValueError):
    """Operands of a tensor operation have incompatible shapes."""

    def __init__(self, op, *shapes):
        self.op = op
        self.shapes = tuple(tuple(shape) for shape in shapes)
        super().__init__(
            f"{op}: incompatible shapes " + " and ".join(str(s) for s in self.shapes)
        )


class ConfigError(ValueError):
    """Invalid configuration; carries one diagnostic per problem found."""

    def __init__(self, diagnostics):
        if isinstance(diagnostics, str):
            diagnostics = [diagnostics]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


class DataError(ValueError):
    """A record lacks entries needed by a computation."""

    def __init__(self, message, missing=()):
        self.missing = list(missing)
        if self.missing:
            message = f"{message}: missing {self.missing}"
        super().__init__(message)
