"""Desk-scale readability-controlled summarizer."""

from yodkit.neural_toy.model import (
    AllMasked,
    MLPHead,
    ModelConfig,
    ReadabilitySummarizer,
    mean_pool,
    yod_classifier,
    yod_regressor,
)
from yodkit.neural_toy.objective import (
    CLASS_WEIGHT,
    LossBreakdown,
    TrainConfig,
    composite_loss,
    dynamic_weight,
    lr_schedule,
)
from yodkit.neural_toy.train import (
    Batch,
    Example,
    NonFiniteLoss,
    build_model,
    clip_gradients,
    collate,
    train,
    train_step,
)
from yodkit.neural_toy.vocab import ControlVocab, UnknownLevel, prepend_control_token
from yodkit.neural_toy.gradcheck import GradCheckResult, gradient_check
from yodkit.neural_toy.checkpoint import load_checkpoint, save_checkpoint
