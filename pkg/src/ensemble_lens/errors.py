"""Exception types shared across the engine.

Every error carries a machine-readable ``code`` used in JSON error
documents, CLI diagnostics, and HTTP status mapping.
"""


class EnsembleLensError(Exception):
    code = "EngineError"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details


# -- bundle loading / validation ------------------------------------------

class MissingManifest(EnsembleLensError):
    code = "MissingManifest"


class SchemaMismatch(EnsembleLensError):
    code = "SchemaMismatch"


class LengthMismatch(EnsembleLensError):
    code = "LengthMismatch"


class NonStochasticProbabilityRow(EnsembleLensError):
    code = "NonStochasticProbabilityRow"


class EmptyTarget(EnsembleLensError):
    code = "EmptyTarget"


class BundleValidationError(EnsembleLensError):
    """Raised by ``load_bundle`` when validation produced errors.

    ``report`` holds the full ValidationReport; the exception class of the
    raised error matches the first error code when one exists (see
    ``bundle.raise_for_report``).
    """

    code = "BundleValidationError"

    def __init__(self, message: str, report=None, **details):
        super().__init__(message, **details)
        self.report = report


# -- task / metric gating ----------------------------------------------------

class MethodTaskMismatch(EnsembleLensError):
    code = "MethodTaskMismatch"


class MetricTaskMismatch(EnsembleLensError):
    code = "MetricTaskMismatch"


class NonRegressionTask(EnsembleLensError):
    code = "NonRegressionTask"


class NonClassificationTask(EnsembleLensError):
    code = "NonClassificationTask"


class NonBinaryTask(EnsembleLensError):
    code = "NonBinaryTask"


class NegativeThreshold(EnsembleLensError):
    code = "NegativeThreshold"


class XiOutOfRange(EnsembleLensError):
    code = "XiOutOfRange"


class UnknownLabel(EnsembleLensError):
    code = "UnknownLabel"


class UnknownModel(EnsembleLensError):
    code = "UnknownModel"


# -- weights lab ------------------------------------------------------------

class ZeroWeightSum(EnsembleLensError):
    code = "ZeroWeightSum"


class BundleMismatch(EnsembleLensError):
    code = "BundleMismatch"


class MissingProbabilities(EnsembleLensError):
    code = "MissingProbabilities"


class InvalidObjective(EnsembleLensError):
    code = "InvalidObjective"


class BudgetTooSmall(EnsembleLensError):
    code = "BudgetTooSmall"


# -- XAI / predictors ---------------------------------------------------------

class UnknownFeature(EnsembleLensError):
    code = "UnknownFeature"


class EmptyColumn(EnsembleLensError):
    code = "EmptyColumn"


class PredictorUnavailable(EnsembleLensError):
    code = "PredictorUnavailable"


class MalformedSpec(EnsembleLensError):
    code = "MalformedSpec"


class CoefficientArityMismatch(EnsembleLensError):
    code = "CoefficientArityMismatch"


class HandshakeTimeout(EnsembleLensError):
    code = "HandshakeTimeout"


class ProtocolViolation(EnsembleLensError):
    code = "ProtocolViolation"


class EndpointError(EnsembleLensError):
    """An external predictor answered with an error document."""

    code = "EndpointError"

    def __init__(self, message: str, endpoint_code: str = "", **details):
        super().__init__(message, **details)
        self.endpoint_code = endpoint_code
