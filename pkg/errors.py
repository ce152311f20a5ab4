class DecayToolkitError(Exception):
    """ Base class for every error raised by the toolkit. """


class ModelInvalid(DecayToolkitError, ValueError):
    """ A domain value was constructed with parameters that break its invariants. """


class ConfigInvalid(DecayToolkitError, ValueError):
    """ A scenario file failed validation. The message always names the offending field. """

    def __init__(self, field: str, reason: str):
        self.field = field
        super().__init__(f'{field}: {reason}')


# Numerics

class NonConvergence(DecayToolkitError, ArithmeticError):
    """ Adaptive quadrature ran out of refinement depth. """


class SingularityOutsideRange(DecayToolkitError, ValueError):
    pass


class NoConvergence(DecayToolkitError, ArithmeticError):
    """ Root finder did not reach the requested residual within max_iter steps. """


class DerivativeVanished(DecayToolkitError, ArithmeticError):
    pass


class NotHermitian(DecayToolkitError, ValueError):
    pass


class GramSingular(DecayToolkitError, ArithmeticError):
    """ The overlap matrix of a frame is numerically singular (coinciding frame vectors). """


class InsufficientSamples(DecayToolkitError, ValueError):
    pass


class NonPositiveValue(DecayToolkitError, ValueError):
    pass


# Friedrichs model

class EtaVanishedOnAxis(DecayToolkitError, ArithmeticError):
    pass


class CouplingZero(DecayToolkitError, ValueError):
    """ g = 0 leaves the level unmixed; its spectral density is a delta function. """


class ContinuationUnavailable(DecayToolkitError, ValueError):
    pass


class PoleOnWrongSheet(DecayToolkitError, ArithmeticError):
    pass


class NonPositiveRate(DecayToolkitError, ValueError):
    pass


class BoundStatePresent(DecayToolkitError, ValueError):
    pass


# Oracle

class GridTooCoarse(DecayToolkitError, ValueError):
    pass


class BeyondRecurrence(UserWarning):
    """ Discrete-continuum evolution was requested past its recurrence horizon. """


# Mode sums and the Lee-Friedrichs example

class DegenerateInitialCondition(DecayToolkitError, ArithmeticError):
    pass


class WrongArity(DecayToolkitError, ValueError):
    pass


class ConventionViolation(DecayToolkitError, ValueError):
    pass


class TruncationTooSmall(DecayToolkitError, ValueError):
    pass


class NoSuperposition(DecayToolkitError, ValueError):
    pass
