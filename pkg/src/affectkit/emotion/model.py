"""Attention-pooled gated recurrent classifier over 21 emotion classes.

The recurrent cell has an update gate and a tanh candidate:

    z_t = sigmoid(w_update_in x_t + w_update_rec h_{t-1} + b_update)
    c_t = tanh(w_cand_in x_t + w_cand_rec h_{t-1} + b_cand)
    h_t = (1 - z_t) * h_{t-1} + z_t * c_t        with h_0 = 0

Pooling scores each hidden state additively, normalizes the scores with a
softmax, and mixes the states with those weights:

    e_t = v_attn . tanh(w_attn h_t + b_attn)
    a   = softmax(e)
    ctx = sum_t a_t h_t

Class logits are an affine map of the pooled context.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from ..errors import InvalidArgumentError, InvalidStateError
from .features import FrameSequence

EMOTION_COUNT = 21


def default_emotion_names(count: int = EMOTION_COUNT) -> list[str]:
    """Placeholder label names; swap in a real taxonomy via the CLI or API."""
    return [f"emotion_{i:02d}" for i in range(count)]


@dataclass(frozen=True)
class EmotionLabel:
    index: int

    def __post_init__(self):
        if not 0 <= self.index < EMOTION_COUNT:
            raise InvalidArgumentError(f"label index must lie in [0, {EMOTION_COUNT}), got {self.index}")


@dataclass(frozen=True, eq=False)
class EmotionScore:
    """A probability distribution over the emotion classes plus its argmax."""

    probabilities: np.ndarray
    argmax: EmotionLabel

    def __post_init__(self):
        p = np.asarray(self.probabilities, dtype=np.float64)
        if p.ndim != 1:
            raise InvalidArgumentError(f"probabilities must be a vector, got shape {p.shape}")
        if np.any(p < 0) or np.any(p > 1):
            raise InvalidArgumentError("probabilities must lie in [0, 1]")
        if abs(float(np.sum(p)) - 1.0) > 1e-9:
            raise InvalidArgumentError(f"probabilities must sum to 1 within 1e-9, got {np.sum(p)!r}")
        if self.argmax.index != int(np.argmax(p)):
            raise InvalidArgumentError("argmax label inconsistent with probabilities")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "probabilities", p)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EmotionScore):
            return NotImplemented
        return self.argmax == other.argmax and np.array_equal(self.probabilities, other.probabilities)

    @classmethod
    def from_probabilities(cls, probabilities) -> "EmotionScore":
        p = np.asarray(probabilities, dtype=np.float64)
        return cls(probabilities=p, argmax=EmotionLabel(int(np.argmax(p))))


@dataclass(frozen=True, eq=False)
class ModelParams:
    """All weights of the classifier. Arrays are frozen after construction.

    Also serves as the gradient container: loss_and_gradients returns an
    instance with the same fields holding the corresponding gradients.
    """

    input_dim: int
    hidden_dim: int
    class_count: int
    w_update_in: np.ndarray   # (H, D)
    w_update_rec: np.ndarray  # (H, H)
    b_update: np.ndarray      # (H,)
    w_cand_in: np.ndarray     # (H, D)
    w_cand_rec: np.ndarray    # (H, H)
    b_cand: np.ndarray        # (H,)
    w_attn: np.ndarray        # (H, H)
    b_attn: np.ndarray        # (H,)
    v_attn: np.ndarray        # (H,)
    w_out: np.ndarray         # (K, H)
    b_out: np.ndarray         # (K,)

    def __post_init__(self):
        d, h, k = self.input_dim, self.hidden_dim, self.class_count
        if d < 1 or h < 1 or k < 1:
            raise InvalidArgumentError(f"dimensions must be >= 1, got D={d} H={h} K={k}")
        expected = {
            "w_update_in": (h, d),
            "w_update_rec": (h, h),
            "b_update": (h,),
            "w_cand_in": (h, d),
            "w_cand_rec": (h, h),
            "b_cand": (h,),
            "w_attn": (h, h),
            "b_attn": (h,),
            "v_attn": (h,),
            "w_out": (k, h),
            "b_out": (k,),
        }
        for name, shape in expected.items():
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if arr.shape != shape:
                raise InvalidArgumentError(f"{name} must have shape {shape}, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise InvalidStateError(f"{name} contains a non-finite entry")
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModelParams):
            return NotImplemented
        return all(
            np.array_equal(getattr(self, f.name), getattr(other, f.name))
            if isinstance(getattr(self, f.name), np.ndarray)
            else getattr(self, f.name) == getattr(other, f.name)
            for f in fields(self)
        )

    def weight_items(self) -> list[tuple[str, np.ndarray]]:
        """(name, array) pairs for every weight field, in declaration order."""
        return [(f.name, getattr(self, f.name)) for f in fields(self) if f.name not in ("input_dim", "hidden_dim", "class_count")]

    def map_weights(self, fn) -> "ModelParams":
        """New params with fn applied to every (name, array) weight pair."""
        updated = {name: fn(name, arr) for name, arr in self.weight_items()}
        return ModelParams(
            input_dim=self.input_dim,
            hidden_dim=self.hidden_dim,
            class_count=self.class_count,
            **updated,
        )


def init_params(input_dim: int, hidden_dim: int, class_count: int = EMOTION_COUNT, seed: int = 0) -> ModelParams:
    """Seeded uniform(-0.08, 0.08) initialization for every weight."""
    rng = np.random.default_rng(seed)
    def u(*shape):
        return rng.uniform(-0.08, 0.08, size=shape)
    h, d, k = hidden_dim, input_dim, class_count
    return ModelParams(
        input_dim=d, hidden_dim=h, class_count=k,
        w_update_in=u(h, d), w_update_rec=u(h, h), b_update=u(h),
        w_cand_in=u(h, d), w_cand_rec=u(h, h), b_cand=u(h),
        w_attn=u(h, h), b_attn=u(h), v_attn=u(h),
        w_out=u(k, h), b_out=u(k),
    )


def zero_params(input_dim: int, hidden_dim: int, class_count: int = EMOTION_COUNT) -> ModelParams:
    h, d, k = hidden_dim, input_dim, class_count
    z = np.zeros
    return ModelParams(
        input_dim=d, hidden_dim=h, class_count=k,
        w_update_in=z((h, d)), w_update_rec=z((h, h)), b_update=z(h),
        w_cand_in=z((h, d)), w_cand_rec=z((h, h)), b_cand=z(h),
        w_attn=z((h, h)), b_attn=z(h), v_attn=z(h),
        w_out=z((k, h)), b_out=z(k),
    )


def sigmoid(x: np.ndarray) -> np.ndarray:
    # Split by sign to stay overflow-free for large |x|.
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    e = np.exp(x[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def softmax(x: np.ndarray) -> np.ndarray:
    shifted = x - np.max(x)
    e = np.exp(shifted)
    return e / np.sum(e)


def _check_input(params: ModelParams, seq: FrameSequence) -> np.ndarray:
    if seq.dim != params.input_dim:
        raise InvalidArgumentError(
            f"sequence dimension {seq.dim} does not match model input_dim {params.input_dim}"
        )
    return seq.frames


def rnn_forward(params: ModelParams, seq: FrameSequence) -> np.ndarray:
    """All T hidden states of the gated cell, as a (T, H) array."""
    x = _check_input(params, seq)
    h = np.zeros(params.hidden_dim)
    states = np.empty((len(seq), params.hidden_dim))
    for t in range(len(seq)):
        z = sigmoid(params.w_update_in @ x[t] + params.w_update_rec @ h + params.b_update)
        cand = np.tanh(params.w_cand_in @ x[t] + params.w_cand_rec @ h + params.b_cand)
        h = (1.0 - z) * h + z * cand
        states[t] = h
    return states


def attention_pool(params: ModelParams, hidden: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pool hidden states into one context vector; also return the weights."""
    hidden = np.asarray(hidden, dtype=np.float64)
    if hidden.ndim != 2 or hidden.shape[0] < 1:
        raise InvalidArgumentError(f"hidden must be a non-empty (T, H) array, got shape {hidden.shape}")
    if hidden.shape[1] != params.hidden_dim:
        raise InvalidArgumentError(
            f"hidden dimension {hidden.shape[1]} does not match model hidden_dim {params.hidden_dim}"
        )
    scores = np.tanh(hidden @ params.w_attn.T + params.b_attn) @ params.v_attn
    weights = softmax(scores)
    context = weights @ hidden
    return context, weights


def classify(params: ModelParams, seq: FrameSequence) -> EmotionScore:
    """Probability distribution over the emotion classes for one sequence."""
    hidden = rnn_forward(params, seq)
    context, _ = attention_pool(params, hidden)
    logits = params.w_out @ context + params.b_out
    return EmotionScore.from_probabilities(softmax(logits))


# --- serialization ---------------------------------------------------------


def params_to_dict(params: ModelParams) -> dict:
    return {
        "dims": {
            "input_dim": params.input_dim,
            "hidden_dim": params.hidden_dim,
            "class_count": params.class_count,
        },
        "weights": {name: arr.tolist() for name, arr in params.weight_items()},
    }


def params_from_dict(data: dict) -> ModelParams:
    try:
        dims = data["dims"]
        weights = {name: np.asarray(arr, dtype=np.float64) for name, arr in data["weights"].items()}
        return ModelParams(
            input_dim=int(dims["input_dim"]),
            hidden_dim=int(dims["hidden_dim"]),
            class_count=int(dims["class_count"]),
            **weights,
        )
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"malformed params JSON: {exc}") from exc


def score_to_dict(score: EmotionScore, names: list[str] | None = None) -> dict:
    names = names or default_emotion_names(len(score.probabilities))
    return {
        "probabilities": [float(p) for p in score.probabilities],
        "argmax_index": score.argmax.index,
        "argmax_name": names[score.argmax.index],
    }
