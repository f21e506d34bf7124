"""Exception hierarchy shared by all modules."""


class NNRError(Exception):
    """Base class for every error raised by nnrange."""


class KernelVector(NNRError):
    pass


class ZeroLevel(NNRError):
    pass


class ZeroMatrix(NNRError):
    pass


class DimensionMismatch(NNRError):
    pass


class OutOfRange(NNRError):
    pass


class NotNormalized(NNRError):
    pass


class WrongClass(NNRError):
    pass


class DegreeOverflow(NNRError):
    pass


class EqualEigenvalues(NNRError):
    pass


class BothZero(NNRError):
    pass


class DegenerateArc(NNRError):
    pass


class DegenerateTriple(NNRError):
    pass


class EmptySpectrum(NNRError):
    pass


class ZeroSpectrum(NNRError):
    pass


class ParseError(NNRError):
    pass
