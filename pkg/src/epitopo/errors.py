"""Exception hierarchy shared by all modules.

Every domain failure derives from :class:`EpitopoError`; the CLI maps these
to exit status 1 and prints the class name with the message.
"""


class EpitopoError(Exception):
    """Base class for domain errors."""


class ModelError(EpitopoError, ValueError):
    pass


class NonChromatic(ModelError):
    pass


class NonPure(ModelError):
    pass


class LabelLocality(ModelError):
    pass


class MergeConflict(ModelError):
    pass


class NotProper(ModelError):
    pass


class NotLocal(ModelError):
    pass


class FormulaSyntaxError(EpitopoError, SyntaxError):
    def __init__(self, message: str, text: str = "", position: int = 0):
        self.text_source = text
        self.position = position
        super().__init__(f"{message} at position {position}")


class UnknownAgent(EpitopoError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown agent"


class FacetNotInModel(EpitopoError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "facet not in model"


class DimensionMismatch(EpitopoError):
    pass


class CompositionMismatch(EpitopoError):
    pass


class AgentNotInPartition(EpitopoError):
    pass


class ResourceLimit(EpitopoError):
    pass


class ProjectionMismatch(EpitopoError):
    pass


class NotPositive(EpitopoError):
    pass


class TaskSpecError(EpitopoError, ValueError):
    pass
