"""Exception hierarchy.

Every error that signals a violated mathematical precondition derives from
:class:`PreconditionError`; the command line maps those to exit code 3.
"""


class MclabError(Exception):
    """Base class for all errors raised by this package."""


class PreconditionError(MclabError):
    """An input violates a mathematical hypothesis of the requested operation."""


class NonHermitian(PreconditionError):
    pass


class IndefiniteMatrix(PreconditionError):
    pass


class ShapeMismatch(MclabError, ValueError):
    pass


class SingularResolvent(PreconditionError):
    """A resolvent such as ``I + W A*`` is singular or too badly conditioned."""

    def __init__(self, msg, sigma_min=None, cond=None):
        super().__init__(msg)
        self.sigma_min = sigma_min
        self.cond = cond


class InconsistentDefinition(MclabError):
    """The defining relation of an intertwiner is not solvable on the defect basis.

    Usually means the rank tolerance does not match the data.
    """


class HypothesisViolated(PreconditionError):
    def __init__(self, msg, which):
        super().__init__(msg)
        self.which = which


class PoleHit(PreconditionError):
    pass


class CommutativityLost(MclabError):
    pass


class NotUnitary(PreconditionError):
    pass


class UnitarityFailure(MclabError):
    pass


class ToleranceAmbiguous(MclabError):
    """A rank decision falls inside the declared ambiguity band."""


class Indeterminate(MclabError):
    pass


class NotPure(PreconditionError):
    pass


class TruncationUnsound(MclabError):
    pass


class PreconditionUnclassified(PreconditionError):
    pass


class ParseError(MclabError):
    def __init__(self, msg, line=None, column=None, path=None):
        super().__init__(msg)
        self.line = line
        self.column = column
        self.path = path
