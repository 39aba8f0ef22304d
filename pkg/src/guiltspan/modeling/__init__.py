from .tokenizer import SubwordTokenizer, SPECIAL_TOKENS
from .encoder import EncoderConfig, TinyEncoder, build_encoder
from .pooling import pool, POOLING_MODES
from .losses import loss_joint, loss_rating, loss_token
from .model import GuiltModel, build_model
from .data import Batch, TrainingExample, batch_order, build_dataset, build_example, collate, encode_story
from .training import (
    CheckpointRecord,
    TrainConfig,
    TrainResult,
    TrainingDiverged,
    evaluate_rating_mse,
    train,
)
from .mlm import MlmConfig, MlmResult, apply_mlm_masking, mlm_pretrain
from .checkpoint import load_checkpoint, save_checkpoint
from .predict import predict

__all__ = [
    "SubwordTokenizer",
    "SPECIAL_TOKENS",
    "EncoderConfig",
    "TinyEncoder",
    "build_encoder",
    "pool",
    "POOLING_MODES",
    "loss_rating",
    "loss_token",
    "loss_joint",
    "GuiltModel",
    "build_model",
    "TrainingExample",
    "Batch",
    "collate",
    "batch_order",
    "encode_story",
    "build_example",
    "build_dataset",
    "TrainConfig",
    "TrainResult",
    "CheckpointRecord",
    "TrainingDiverged",
    "train",
    "evaluate_rating_mse",
    "MlmConfig",
    "MlmResult",
    "mlm_pretrain",
    "apply_mlm_masking",
    "save_checkpoint",
    "load_checkpoint",
    "predict",
]
