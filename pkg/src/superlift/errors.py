"""Exception hierarchy shared by all superlift modules."""


class SuperliftError(Exception):
    """Base class; `operation` names the library call that failed."""

    operation = "superlift"

    def __init__(self, message: str, operation: str | None = None):
        super().__init__(message)
        if operation is not None:
            self.operation = operation


class MismatchedAlgebra(SuperliftError):
    operation = "grassmann"


class ZeroBody(SuperliftError):
    operation = "grassmann"


class ParityError(SuperliftError):
    operation = "grassmann"


class CoefficientRangeError(SuperliftError):
    operation = "supermap"


class DomainViolation(SuperliftError):
    operation = "analytic"


class BodyVanishes(SuperliftError):
    operation = "analytic"


class UnsupportedComposition(SuperliftError):
    operation = "analytic"


class UnsupportedOperation(SuperliftError):
    operation = "analytic"


class NoSquareRoot(SuperliftError):
    operation = "supermap"


class NonInvertible(SuperliftError):
    operation = "supermap"


class DegreeBoundExceeded(SuperliftError):
    operation = "cech"


class Obstructed(SuperliftError):
    operation = "sphere"

    def __init__(self, message: str, obstruction=None):
        super().__init__(message)
        self.obstruction = obstruction


class UnsupportedBody(SuperliftError):
    operation = "sphere"


class OutsideDomain(SuperliftError):
    operation = "sphere"


class InconsistentType(SuperliftError):
    operation = "torus"


class SchemaError(SuperliftError):
    """Malformed JSON input; `path` locates the offending field."""

    operation = "cli"

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
