"""Exception hierarchy shared across riskfusion."""


class RiskFusionError(Exception):
    """Base class for every error raised by this package."""

    #: machine-parsable prefix used by the CLI
    code = "E_RUNTIME"


class ValidationError(RiskFusionError, ValueError):
    code = "E_VALIDATION"


class CorpusParseError(ValidationError):
    code = "E_PARSE"

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(RiskFusionError, ValueError):
    """Input is well-formed but outside the operation's domain."""

    code = "E_DOMAIN"


class UndefinedAgreementError(DomainError):
    code = "E_AGREEMENT"


class ShapeError(RiskFusionError, ValueError):
    code = "E_SHAPE"


class LeakageError(RiskFusionError):
    """A fit received samples that do not belong to the training split."""

    code = "E_LEAKAGE"


class NumericError(RiskFusionError, ArithmeticError):
    code = "E_NUMERIC"


class TrainingError(NumericError):
    code = "E_TRAINING"


class EncoderInitError(RiskFusionError):
    code = "E_ENCODER"


class ContractViolation(RiskFusionError):
    code = "E_CONTRACT"


class AugmentationError(RiskFusionError):
    code = "E_AUGMENT"


class TransportError(RiskFusionError):
    code = "E_TRANSPORT"


class CredentialError(RiskFusionError):
    code = "E_CREDENTIALS"


class RateLimitError(TransportError):
    code = "E_RATE_LIMIT"


class LockError(RiskFusionError):
    code = "E_LOCKED"


class ConfigError(RiskFusionError, ValueError):
    code = "E_CONFIG"


class ManifestError(RiskFusionError):
    code = "E_MANIFEST"


class FoldError(RiskFusionError):
    """Wraps a failure inside one cross-validation fold."""

    code = "E_FOLD"

    def __init__(self, fold, cause):
        self.fold = fold
        self.cause = cause
        super().__init__(f"fold {fold} failed: {type(cause).__name__}: {cause}")
