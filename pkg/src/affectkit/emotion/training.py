"""Cross-entropy loss, exact backpropagation, and plain gradient descent.

finite_difference_gradients only ever calls the forward loss, so it is an
independent numerical route against which the analytic gradients are checked
(by tests and by the `emotion gradcheck` CLI command).
"""

from __future__ import annotations

import numpy as np

from ..errors import DivergedError, InvalidArgumentError
from .features import FrameSequence
from .model import EmotionLabel, ModelParams, sigmoid, softmax

Batch = list[tuple[FrameSequence, EmotionLabel]]


def _forward_cached(params: ModelParams, x: np.ndarray) -> dict:
    """Forward pass keeping every intermediate needed by the backward pass."""
    t_len = x.shape[0]
    h_dim = params.hidden_dim
    z = np.empty((t_len, h_dim))
    cand = np.empty((t_len, h_dim))
    hidden = np.empty((t_len, h_dim))
    h = np.zeros(h_dim)
    for t in range(t_len):
        z[t] = sigmoid(params.w_update_in @ x[t] + params.w_update_rec @ h + params.b_update)
        cand[t] = np.tanh(params.w_cand_in @ x[t] + params.w_cand_rec @ h + params.b_cand)
        h = (1.0 - z[t]) * h + z[t] * cand[t]
        hidden[t] = h
    attn_tanh = np.tanh(hidden @ params.w_attn.T + params.b_attn)
    scores = attn_tanh @ params.v_attn
    weights = softmax(scores)
    context = weights @ hidden
    logits = params.w_out @ context + params.b_out
    probs = softmax(logits)
    return {
        "x": x, "z": z, "cand": cand, "hidden": hidden,
        "attn_tanh": attn_tanh, "weights": weights, "context": context,
        "probs": probs,
    }


def _validate_batch(params: ModelParams, batch: Batch) -> None:
    if not batch:
        raise InvalidArgumentError("batch must be non-empty")
    for seq, label in batch:
        if seq.dim != params.input_dim:
            raise InvalidArgumentError(
                f"sequence dimension {seq.dim} does not match model input_dim {params.input_dim}"
            )
        if not 0 <= label.index < params.class_count:
            raise InvalidArgumentError(
                f"label index {label.index} out of range for {params.class_count} classes"
            )


def batch_loss(params: ModelParams, batch: Batch) -> float:
    """Mean cross-entropy over the batch, forward pass only."""
    _validate_batch(params, batch)
    total = 0.0
    for seq, label in batch:
        cache = _forward_cached(params, seq.frames)
        total += -np.log(cache["probs"][label.index])
    return float(total / len(batch))


def loss_and_gradients(params: ModelParams, batch: Batch) -> tuple[float, ModelParams]:
    """Mean cross-entropy and its exact gradient in a ModelParams-shaped object."""
    _validate_batch(params, batch)
    grads = {name: np.zeros_like(arr) for name, arr in params.weight_items()}
    total = 0.0
    scale = 1.0 / len(batch)
    for seq, label in batch:
        x = seq.frames
        cache = _forward_cached(params, x)
        hidden, weights = cache["hidden"], cache["weights"]
        total += -np.log(cache["probs"][label.index])

        d_logits = cache["probs"].copy()
        d_logits[label.index] -= 1.0
        d_logits *= scale
        grads["w_out"] += np.outer(d_logits, cache["context"])
        grads["b_out"] += d_logits
        d_context = params.w_out.T @ d_logits

        # attention: context = weights @ hidden, weights = softmax(scores)
        d_weights = hidden @ d_context
        d_hidden = weights[:, None] * d_context[None, :]
        d_scores = weights * (d_weights - np.dot(weights, d_weights))
        grads["v_attn"] += cache["attn_tanh"].T @ d_scores
        d_attn_pre = np.outer(d_scores, params.v_attn) * (1.0 - cache["attn_tanh"] ** 2)
        grads["w_attn"] += d_attn_pre.T @ hidden
        grads["b_attn"] += d_attn_pre.sum(axis=0)
        d_hidden += d_attn_pre @ params.w_attn

        # recurrence, newest step first
        d_carry = np.zeros(params.hidden_dim)
        for t in range(x.shape[0] - 1, -1, -1):
            d_h = d_hidden[t] + d_carry
            h_prev = hidden[t - 1] if t > 0 else np.zeros(params.hidden_dim)
            z, cand = cache["z"][t], cache["cand"][t]
            d_z_pre = d_h * (cand - h_prev) * z * (1.0 - z)
            d_cand_pre = d_h * z * (1.0 - cand**2)
            grads["w_update_in"] += np.outer(d_z_pre, x[t])
            grads["w_update_rec"] += np.outer(d_z_pre, h_prev)
            grads["b_update"] += d_z_pre
            grads["w_cand_in"] += np.outer(d_cand_pre, x[t])
            grads["w_cand_rec"] += np.outer(d_cand_pre, h_prev)
            grads["b_cand"] += d_cand_pre
            d_carry = d_h * (1.0 - z) + params.w_update_rec.T @ d_z_pre + params.w_cand_rec.T @ d_cand_pre

    grad_params = ModelParams(
        input_dim=params.input_dim,
        hidden_dim=params.hidden_dim,
        class_count=params.class_count,
        **grads,
    )
    return float(total * scale), grad_params


def finite_difference_gradients(params: ModelParams, batch: Batch, epsilon: float = 1e-5) -> ModelParams:
    """Central-difference gradient of batch_loss, entry by entry."""
    if not epsilon > 0:
        raise InvalidArgumentError(f"epsilon must be positive, got {epsilon}")
    _validate_batch(params, batch)
    numeric: dict[str, np.ndarray] = {}
    for name, arr in params.weight_items():
        grad = np.zeros_like(arr)
        flat = grad.reshape(-1)
        for i in range(arr.size):
            def perturbed(delta, _name=name, _i=i):
                def bump(n, a):
                    if n != _name:
                        return a
                    out = a.copy()
                    out.reshape(-1)[_i] += delta
                    return out
                return params.map_weights(bump)
            loss_plus = batch_loss(perturbed(epsilon), batch)
            loss_minus = batch_loss(perturbed(-epsilon), batch)
            flat[i] = (loss_plus - loss_minus) / (2.0 * epsilon)
        numeric[name] = grad
    return ModelParams(
        input_dim=params.input_dim,
        hidden_dim=params.hidden_dim,
        class_count=params.class_count,
        **numeric,
    )


def gradient_check(params: ModelParams, batch: Batch, epsilon: float = 1e-5) -> float:
    """Worst relative disagreement between backprop and central differences.

    The denominator is floored at 1e-4 so near-zero gradients are compared
    absolutely instead of amplifying round-off noise.
    """
    _, analytic = loss_and_gradients(params, batch)
    numeric = finite_difference_gradients(params, batch, epsilon)
    worst = 0.0
    for (name, a), (_, n) in zip(analytic.weight_items(), numeric.weight_items()):
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), 1e-4)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


def train(
    params: ModelParams,
    dataset: Batch,
    learning_rate: float,
    steps: int,
    seed: int,
    batch_size: int = 16,
    on_step=None,
) -> ModelParams:
    """Plain mini-batch gradient descent with a seeded shuffle.

    Deterministic for a fixed seed. Raises DivergedError (naming the step)
    if the loss ever goes non-finite. steps=0 returns params untouched.
    """
    if not learning_rate > 0:
        raise InvalidArgumentError(f"learning_rate must be positive, got {learning_rate}")
    if steps < 0:
        raise InvalidArgumentError(f"steps must be >= 0, got {steps}")
    if batch_size < 1:
        raise InvalidArgumentError(f"batch_size must be >= 1, got {batch_size}")
    if steps == 0:
        return params
    if not dataset:
        raise InvalidArgumentError("dataset must be non-empty")

    rng = np.random.default_rng(seed)
    effective = min(batch_size, len(dataset))
    perm = rng.permutation(len(dataset))
    pos = 0
    current = params
    for step in range(1, steps + 1):
        if pos + effective > len(perm):
            perm = rng.permutation(len(dataset))
            pos = 0
        batch = [dataset[i] for i in perm[pos : pos + effective]]
        pos += effective
        loss, grads = loss_and_gradients(current, batch)
        if not np.isfinite(loss):
            raise DivergedError(step, loss)
        current = current.map_weights(lambda name, arr: arr - learning_rate * getattr(grads, name))
        if on_step is not None:
            on_step(step, loss)
    return current


def accuracy(params: ModelParams, dataset: Batch) -> float:
    """Fraction of sequences whose argmax class equals the label."""
    from .model import classify

    if not dataset:
        raise InvalidArgumentError("dataset must be non-empty")
    hits = sum(1 for seq, label in dataset if classify(params, seq).argmax == label)
    return hits / len(dataset)
