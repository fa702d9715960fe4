from .base import Model, ModelError
from .linear import LinearModel
from .mlp import HIDDEN_UNITS, ForwardPass, MlpModel
from .persistence import FAMILIES, canonical_family, load_model, save_model
from .training import TRAINERS, Adam, TrainConfig, TrainingResult, train_logistic, train_mlp

__all__ = [
    "Adam",
    "FAMILIES",
    "ForwardPass",
    "HIDDEN_UNITS",
    "LinearModel",
    "MlpModel",
    "Model",
    "ModelError",
    "TRAINERS",
    "TrainConfig",
    "TrainingResult",
    "canonical_family",
    "load_model",
    "save_model",
    "train_logistic",
    "train_mlp",
]
