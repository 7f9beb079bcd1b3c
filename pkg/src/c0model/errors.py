"""Exception hierarchy shared by all modules."""


class C0Error(Exception):
    """Base class for every error raised by the package."""


class InvalidInput(C0Error, ValueError):
    """Input violates a documented precondition or file format."""


class NotADivisor(C0Error):
    pass


class TooManyDivisors(C0Error):
    pass


class DegreeZero(C0Error):
    pass


class NotARoot(C0Error):
    pass


class SingularResolvent(C0Error):
    pass


class EigenvalueOnCircle(C0Error):
    pass


class NotMultiplicityFree(C0Error):
    pass


class CyclicSearchFailed(C0Error):
    pass


class NotCoprime(C0Error):
    pass


class IllConditioned(C0Error):
    pass


class EmptySet(C0Error):
    pass


class MinimalFunctionMismatch(C0Error):
    pass


class NotMaximal(C0Error):
    pass


class HypothesisFailed(C0Error):
    pass


class PropertyViolation(C0Error):
    """A verified property failed; carries the offending case for reporting."""

    def __init__(self, message, case=None):
        super().__init__(message)
        self.case = case
