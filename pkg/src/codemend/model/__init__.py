from .checkpoint import CheckpointError, load_model, save_model
from .config import ModelConfig
from .decoding import (
    ModelStepper,
    Prediction,
    TableStepper,
    beam_search,
    beam_search_steps,
    detect_via_repair,
    greedy_decode,
    log_softmax,
    predict,
)
from .losses import (
    ALL_OBJECTIVES,
    LossBundle,
    compute_losses,
    loss_and_grads,
    parse_objectives,
)
from .network import (
    detect,
    encode,
    init_parameters,
    localize,
    rank_lines,
    sigmoid,
    zero_grads,
)

__all__ = [
    "ALL_OBJECTIVES",
    "CheckpointError",
    "LossBundle",
    "ModelConfig",
    "ModelStepper",
    "Prediction",
    "TableStepper",
    "beam_search",
    "beam_search_steps",
    "compute_losses",
    "detect",
    "detect_via_repair",
    "encode",
    "greedy_decode",
    "init_parameters",
    "load_model",
    "localize",
    "log_softmax",
    "loss_and_grads",
    "parse_objectives",
    "predict",
    "rank_lines",
    "save_model",
    "sigmoid",
    "zero_grads",
]
