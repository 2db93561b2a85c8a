"""Exception hierarchy shared by every eucone module."""


class EuconeError(Exception):
    """Base class for all library errors."""


class DomainError(EuconeError, ValueError):
    """An argument lies outside the domain of the operation."""


class DimensionError(EuconeError, ValueError):
    """Vectors or problems of incompatible dimension were combined."""


class UnknownDecisionError(EuconeError, KeyError):
    """A decision id is not present in the problem."""

    def __str__(self):
        return f"unknown decision id: {self.args[0]!r}"


class GradientMismatchError(EuconeError, ValueError):
    """A registered analytic Jacobian disagrees with finite differences."""


class ProblemFileError(EuconeError):
    """Base class for problem-file ingestion errors.

    ``path`` locates the offending field as a JSON-pointer-like string.
    """

    def __init__(self, message, path="$"):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


class MalformedJSONError(ProblemFileError):
    pass


class SchemaViolationError(ProblemFileError):
    pass


class UnknownGeneratorError(ProblemFileError):
    pass


class DuplicateIdError(ProblemFileError):
    def __init__(self, decision_id, path="$.decisions"):
        super().__init__(f"duplicate decision id {decision_id!r}", path)
        self.decision_id = decision_id
