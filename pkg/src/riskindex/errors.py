"""Exception hierarchy shared by all riskindex modules."""


class RiskIndexError(Exception):
    """Base class for every error raised by riskindex."""


class EmptyInput(RiskIndexError, ValueError):
    pass


class BadWeights(RiskIndexError, ValueError):
    pass


class NonFiniteValue(RiskIndexError, ValueError):
    pass


class BadLevel(RiskIndexError, ValueError):
    pass


class UnknownVariable(RiskIndexError, KeyError):
    pass


class BadCount(RiskIndexError, ValueError):
    pass


class BadExponent(RiskIndexError, ValueError):
    pass


class BadTolerance(RiskIndexError, ValueError):
    pass


class BadAsset(RiskIndexError, ValueError):
    pass


class BadParameters(RiskIndexError, ValueError):
    pass


class BadDensity(RiskIndexError, ValueError):
    pass


class BadEpsilon(RiskIndexError, ValueError):
    pass


class InvalidSpec(RiskIndexError, ValueError):
    """A utility, distortion, density or distribution failed validation."""


class UnsupportedSpec(RiskIndexError, ValueError):
    pass


class DerivativeUnavailable(RiskIndexError, ValueError):
    pass


class DimensionMismatch(RiskIndexError, ValueError):
    pass


class NonPositivePayoff(RiskIndexError, ValueError):
    pass


class NoConvergence(RiskIndexError, RuntimeError):
    pass


class InternalError(RiskIndexError, RuntimeError):
    """An invariant the algorithms rely on was violated."""
