"""Attention-pooled recurrent emotion classification at desk scale."""

from .features import FrameSequence, extract_features
from .model import (
    EMOTION_COUNT,
    EmotionLabel,
    EmotionScore,
    ModelParams,
    attention_pool,
    classify,
    default_emotion_names,
    init_params,
    params_from_dict,
    params_to_dict,
    rnn_forward,
    score_to_dict,
    zero_params,
)
from .training import (
    accuracy,
    batch_loss,
    finite_difference_gradients,
    gradient_check,
    loss_and_gradients,
    train,
)
from .datasets import (
    class_signature,
    load_dataset,
    make_toy_dataset,
    save_dataset,
    sequence_from_dict,
    sequence_to_dict,
)

__all__ = [
    "EMOTION_COUNT",
    "EmotionLabel",
    "EmotionScore",
    "FrameSequence",
    "ModelParams",
    "accuracy",
    "attention_pool",
    "batch_loss",
    "class_signature",
    "classify",
    "default_emotion_names",
    "extract_features",
    "finite_difference_gradients",
    "gradient_check",
    "init_params",
    "load_dataset",
    "loss_and_gradients",
    "make_toy_dataset",
    "params_from_dict",
    "params_to_dict",
    "rnn_forward",
    "save_dataset",
    "score_to_dict",
    "sequence_from_dict",
    "sequence_to_dict",
    "train",
    "zero_params",
]
