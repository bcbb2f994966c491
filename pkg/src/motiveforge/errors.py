"""Exception hierarchy shared by all modules."""


class MotiveForgeError(Exception):
    """Base class for every error raised by this package."""


# hypergeometric data
class NotCyclotomic(MotiveForgeError):
    pass


class Overlap(MotiveForgeError):
    pass


class LengthMismatch(MotiveForgeError):
    pass


class ZeroArgument(MotiveForgeError):
    pass


# finite fields and Gauss sums
class NotPrime(MotiveForgeError):
    pass


class TooLarge(MotiveForgeError):
    pass


class PrecisionTooLow(MotiveForgeError):
    pass


# trace computations
class DivisibilityFails(MotiveForgeError):
    pass


class RoundingGap(MotiveForgeError):
    pass


class DenominatorUnresolved(MotiveForgeError):
    pass


class NonIntegral(MotiveForgeError):
    pass


class WeilFail(MotiveForgeError):
    pass


class Ambiguous(MotiveForgeError):
    pass


class BadPrime(MotiveForgeError):
    """Requested a local factor at a prime outside the good set."""


# Hilbert forms / Asai factors
class MissingEigenvalue(MotiveForgeError):
    pass


class NonIntegralCoefficient(MotiveForgeError):
    pass


class RamifiedTwist(MotiveForgeError):
    pass


class NotDivisible(MotiveForgeError):
    pass


class ParseError(MotiveForgeError):
    pass


class NetworkError(MotiveForgeError):
    pass


class NotFound(MotiveForgeError):
    pass


# matcher
class NoConsistentCharacter(MotiveForgeError):
    pass


class NoCandidate(MotiveForgeError):
    pass


class NotOrdinary(MotiveForgeError):
    pass


class PrecisionLoss(MotiveForgeError):
    pass


class NotSquare(MotiveForgeError):
    pass


# series lab
class Divergent(MotiveForgeError):
    pass


class NotUpperHalfPlane(MotiveForgeError):
    pass


class NonConvergent(MotiveForgeError):
    pass


class NoRepresentation(MotiveForgeError):
    pass


class NotPIntegral(MotiveForgeError):
    pass


# L-functions
class MissingFactor(MotiveForgeError):
    pass


class InsufficientCutoff(MotiveForgeError):
    pass
