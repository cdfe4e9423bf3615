"""Exception hierarchy shared by all modules."""


class RKHSDiagError(Exception):
    """Base class for every error raised by rkhsdiag."""


class QuadratureError(RKHSDiagError):
    pass


class NonConvergence(QuadratureError):
    """A quadrature whose error budget was not met was used where a value is required."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class NonFiniteEvaluation(QuadratureError, FloatingPointError):
    pass


class OscillationBudget(QuadratureError):
    pass


class AliasingSuspected(QuadratureError):
    pass


class NormalizationFailure(RKHSDiagError):
    pass


class ModelError(RKHSDiagError, ValueError):
    pass


class UnknownModel(ModelError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class InvalidParam(ModelError):
    pass


class DomainViolation(ModelError):
    pass


class FrequencyOutsideOmega(ModelError):
    pass


class IndexOutOfRange(ModelError, IndexError):
    pass


class NonScalarFiber(ModelError):
    pass


class DegenerateSamples(RKHSDiagError, ValueError):
    pass


class AnchorDegenerate(RKHSDiagError, ValueError):
    pass


class SingularAnchorMatrix(RKHSDiagError, ValueError):
    pass


class DenominatorUnderflow(RKHSDiagError, ArithmeticError):
    pass
