"""Exception hierarchy. Every error carries a stable machine-readable ``code``."""


class RecurZetaError(Exception):
    code = "error"
    exit_code = 1


class ValidationError(RecurZetaError):
    code = "validation_error"


class ParseError(RecurZetaError):
    code = "parse_error"

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class UnknownName(RecurZetaError):
    code = "unknown_name"


class ZeroSequence(RecurZetaError):
    code = "zero_sequence"


class InternalInconsistency(RecurZetaError):
    code = "internal_inconsistency"


class PrecisionExhausted(RecurZetaError):
    code = "precision_exhausted"


class IllConditioned(RecurZetaError):
    code = "ill_conditioned"


class HypothesesNotMet(RecurZetaError):
    code = "hypotheses_not_met"
    exit_code = 2


class RepeatedRoots(HypothesesNotMet):
    code = "repeated_roots"


class ZeroRoot(HypothesesNotMet):
    code = "zero_root"


class DivergentRegion(RecurZetaError):
    code = "divergent_region"


class PoleProximity(RecurZetaError):
    code = "pole_proximity"


class TruncationFailure(RecurZetaError):
    code = "truncation_failure"


class WindowTooLarge(RecurZetaError):
    code = "window_too_large"


class UnsupportedFormat(RecurZetaError):
    code = "unsupported_format"


class NotAnInteger(RecurZetaError):
    code = "not_an_integer"


class ZeroDenominator(RecurZetaError):
    code = "zero_denominator"


class IsPole(RecurZetaError):
    code = "is_pole"


class RemovableFormulaPoint(IsPole):
    """-m is a point of the formula pole set whose residue vanishes identically.

    The continuation is finite there, but the terminating sum over |beta| = m
    misses the limit of the k_1 > m terms, so no rational value is produced.
    """

    code = "removable_formula_point"


class ReconstructionFailed(RecurZetaError):
    code = "reconstruction_failed"


class NotQuadratic(RecurZetaError):
    code = "not_quadratic"


class NonRationalResult(RecurZetaError):
    code = "non_rational_result"
