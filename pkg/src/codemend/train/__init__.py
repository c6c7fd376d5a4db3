from .loop import (
    FitCheckpoint,
    NonFiniteLossError,
    TrainConfig,
    TrainState,
    batch_for_step,
    fit,
    init_train_state,
    load_fit_checkpoint,
    load_train_state,
    save_fit_checkpoint,
    save_train_state,
    train_step,
    validation_metrics,
)
from .synthetic import generate_pair, make_commits, make_samples

__all__ = [
    "FitCheckpoint",
    "NonFiniteLossError",
    "TrainConfig",
    "TrainState",
    "batch_for_step",
    "fit",
    "generate_pair",
    "init_train_state",
    "load_fit_checkpoint",
    "load_train_state",
    "make_commits",
    "make_samples",
    "save_fit_checkpoint",
    "save_train_state",
    "train_step",
    "validation_metrics",
]
