"""Exception types shared across the package."""


class GactError(Exception):
    """Base class for domain errors (the CLI maps these to exit code 1)."""

    code = "GactError"

    def to_json(self) -> dict:
        return {"error": self.code, "message": str(self)}


class InvalidGroup(GactError):
    code = "InvalidGroup"


class NotSurjective(GactError):
    code = "NotSurjective"


class NotNormal(GactError):
    code = "NotNormal"


class InvalidStructure(GactError):
    code = "InvalidStructure"


class UnknownElement(GactError):
    code = "UnknownElement"


class BudgetExceeded(GactError):
    code = "BudgetExceeded"


class BoundExceeded(GactError):
    code = "BoundExceeded"


class ContradictoryBase(GactError):
    code = "ContradictoryBase"


class ActionMismatchOnBase(GactError):
    code = "ActionMismatchOnBase"


class FormulaSyntaxError(GactError):
    code = "SyntaxError"

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position

    def to_json(self) -> dict:
        d = super().to_json()
        d["position"] = self.position
        return d


class UnknownGroupElement(GactError):
    code = "UnknownGroupElement"


class UnboundVariable(GactError):
    code = "UnboundVariable"


class UnassignedVariable(GactError):
    code = "UnassignedVariable"


class SignatureMismatch(GactError):
    code = "SignatureMismatch"


class UnsupportedSignature(GactError):
    code = "UnsupportedSignature"


class DNFTooLarge(GactError):
    code = "DNFTooLarge"


class NotGenerating(GactError):
    code = "NotGenerating"


class NotSubgroup(GactError):
    code = "NotSubgroup"


class HypothesisViolated(GactError):
    code = "HypothesisViolated"


class NotInvariant(GactError):
    code = "NotInvariant"


class NotProperlyContained(GactError):
    code = "NotProperlyContained"


class SearchTooLarge(GactError):
    code = "SearchTooLarge"


class ZeroElement(GactError):
    code = "ZeroElement"


class InvalidRing(GactError):
    code = "InvalidRing"
