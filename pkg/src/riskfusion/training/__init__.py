"""Classification head, losses, resampling and the training loop."""

from .classifier import HybridRiskClassifier, TrainConfig, encode_labels, severity_argmax
from .losses import ce_loss, class_weights, forward, loss_and_grad, softmax, weighted_ce_loss
from .optim import AdamW
from .resampling import STRATEGIES, oversample, resample, undersample

__all__ = [
    "STRATEGIES",
    "AdamW",
    "HybridRiskClassifier",
    "TrainConfig",
    "ce_loss",
    "class_weights",
    "encode_labels",
    "forward",
    "loss_and_grad",
    "oversample",
    "resample",
    "severity_argmax",
    "softmax",
    "undersample",
    "weighted_ce_loss",
]
