"""Exception types raised across the package."""


class TwkError(Exception):
    """Base class for all errors raised by twk."""


class DimensionMismatch(TwkError, ValueError):
    pass


class IllFormedRelation(TwkError, ValueError):
    pass


class NotFiniteAtBound(TwkError):
    """A surviving path reaches the length horizon, so finiteness is not certified."""


class ForeignElement(TwkError, ValueError):
    pass


class EndpointMismatch(TwkError, ValueError):
    pass


class NotClosed(TwkError, ValueError):
    """A morphism required to be closed has nonzero differential."""


class CoefficientRelationViolated(TwkError, ValueError):
    def __init__(self, relations):
        self.relations = list(relations)
        super().__init__("coefficient relations violated: " + ", ".join(self.relations))


class HomotopyIdentityFailed(TwkError, ValueError):
    pass


class NonTerminatingBoxTensor(TwkError):
    pass


class ConeIdentificationFailed(TwkError):
    pass


class InvalidFlipModule(TwkError, ValueError):
    pass
