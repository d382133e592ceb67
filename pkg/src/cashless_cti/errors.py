"""Exception types raised across the package."""


class CTIError(ValueError):
    """Base class for all model and validation errors."""


class DomainError(CTIError):
    pass


class ConvergenceError(CTIError):
    pass


class InsufficientDataError(CTIError):
    pass


class SingularDesignError(CTIError):
    pass


class NoRealRootError(CTIError):
    pass


class ParseError(CTIError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaError(CTIError):
    def __init__(self, path, message):
        self.path = path
        super().__init__(f"{path}: {message}")


class MixedBaselineError(CTIError):
    pass
