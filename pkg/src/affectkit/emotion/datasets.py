"""Labeled sequence datasets: a separable synthetic set plus directory IO.

On disk a dataset is a directory of one JSON file per FrameSequence and a
labels.csv with `utterance_id,label_index` rows.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from ..errors import InvalidArgumentError
from .features import FrameSequence
from .model import EMOTION_COUNT, EmotionLabel
from .training import Batch


def class_signature(index: int, dim: int = 8, level: float = 2.0) -> np.ndarray:
    """Deterministic on/off band pattern for a class: the bits of index+1.

    Any two classes differ in at least one band, so signatures are at least
    `level` apart in L2.
    """
    if index < 0 or index + 1 >= 2**dim:
        raise InvalidArgumentError(f"index {index} not representable over {dim} bands")
    bits = [(index + 1) >> b & 1 for b in range(dim)]
    return level * np.asarray(bits, dtype=np.float64)


def make_toy_dataset(
    n_sequences: int = 200,
    n_classes: int = EMOTION_COUNT,
    dim: int = 8,
    min_frames: int = 5,
    max_frames: int = 8,
    noise: float = 0.25,
    seed: int = 0,
) -> Batch:
    """Separable toy set: every frame is the class signature plus small noise.

    Classes are assigned round-robin so all of them appear. Deterministic
    for a fixed seed.
    """
    if n_sequences < 1:
        raise InvalidArgumentError(f"n_sequences must be >= 1, got {n_sequences}")
    if not 1 <= n_classes <= EMOTION_COUNT:
        raise InvalidArgumentError(f"n_classes must lie in [1, {EMOTION_COUNT}], got {n_classes}")
    if min_frames < 1 or max_frames < min_frames:
        raise InvalidArgumentError("need 1 <= min_frames <= max_frames")
    rng = np.random.default_rng(seed)
    items: Batch = []
    for i in range(n_sequences):
        label = i % n_classes
        t_len = int(rng.integers(min_frames, max_frames + 1))
        frames = class_signature(label, dim) + noise * rng.standard_normal((t_len, dim))
        seq = FrameSequence(frames=frames, frame_hop_ms=10.0, utterance_id=f"toy_{i:04d}")
        items.append((seq, EmotionLabel(label)))
    return items


def sequence_to_dict(seq: FrameSequence) -> dict:
    return {
        "utterance_id": seq.utterance_id,
        "frame_hop_ms": seq.frame_hop_ms,
        "frames": [[float(v) for v in row] for row in seq.frames],
    }


def sequence_from_dict(data: dict) -> FrameSequence:
    try:
        return FrameSequence(
            frames=np.asarray(data["frames"], dtype=np.float64),
            frame_hop_ms=data["frame_hop_ms"],
            utterance_id=data["utterance_id"],
        )
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"malformed sequence JSON: {exc}") from exc


def save_dataset(directory: str | Path, items: Batch) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    with open(directory / "labels.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["utterance_id", "label_index"])
        for seq, label in items:
            writer.writerow([seq.utterance_id, label.index])
    for seq, _ in items:
        path = directory / f"{seq.utterance_id}.json"
        with open(path, "w") as fh:
            json.dump(sequence_to_dict(seq), fh, sort_keys=True, indent=2)
            fh.write("\n")


def load_dataset(directory: str | Path) -> Batch:
    directory = Path(directory)
    labels_path = directory / "labels.csv"
    if not labels_path.exists():
        raise InvalidArgumentError(f"missing labels file: {labels_path}")
    items: Batch = []
    with open(labels_path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["utterance_id", "label_index"]:
            raise InvalidArgumentError(f"expected header utterance_id,label_index in {labels_path}")
        for row in reader:
            if not row:
                continue
            utterance_id, label_index = row[0], int(row[1])
            seq_path = directory / f"{utterance_id}.json"
            if not seq_path.exists():
                raise InvalidArgumentError(f"missing sequence file: {seq_path}")
            with open(seq_path) as sf:
                seq = sequence_from_dict(json.load(sf))
            items.append((seq, EmotionLabel(label_index)))
    return items
