"""Exception types raised by logarrange."""


class ValidationError(ValueError):
    """Input data or parameters violate a documented constraint."""


class ContractError(ValueError):
    """An operation was called on an object that does not meet its precondition."""


class GraphFormatError(ValidationError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
