"""Frame-level log band-energy features from raw audio."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import InvalidArgumentError


@dataclass(frozen=True, eq=False)
class FrameSequence:
    """A (T, D) array of feature frames plus the hop that produced them."""

    frames: np.ndarray
    frame_hop_ms: float
    utterance_id: str = ""

    def __post_init__(self):
        arr = np.asarray(self.frames, dtype=np.float64)
        if arr.ndim != 2:
            raise InvalidArgumentError(f"frames must be a (T, D) array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise InvalidArgumentError(f"frames must be non-empty with D >= 1, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidArgumentError("frames must be finite")
        if not self.frame_hop_ms > 0:
            raise InvalidArgumentError(f"frame_hop_ms must be positive, got {self.frame_hop_ms}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "frames", arr)
        object.__setattr__(self, "frame_hop_ms", float(self.frame_hop_ms))

    def __eq__(self, other) -> bool:
        if not isinstance(other, FrameSequence):
            return NotImplemented
        return (
            self.frame_hop_ms == other.frame_hop_ms
            and self.utterance_id == other.utterance_id
            and np.array_equal(self.frames, other.frames)
        )

    def __len__(self) -> int:
        return self.frames.shape[0]

    @property
    def dim(self) -> int:
        return self.frames.shape[1]


def extract_features(
    waveform,
    sample_rate_hz: float,
    window_ms: float = 25.0,
    hop_ms: float = 10.0,
    bands: int = 8,
    utterance_id: str = "",
) -> FrameSequence:
    """Window the waveform and reduce each window to log band energies.

    Per window: rfft magnitudes are summed over `bands` contiguous,
    equal-width bin ranges and passed through log(1 + energy). The frame
    count is floor((len - window) / hop) + 1.
    """
    if not sample_rate_hz > 0:
        raise InvalidArgumentError(f"sample_rate_hz must be positive, got {sample_rate_hz}")
    if not window_ms > 0 or not hop_ms > 0:
        raise InvalidArgumentError("window_ms and hop_ms must be positive")
    if bands < 1:
        raise InvalidArgumentError(f"bands must be >= 1, got {bands}")
    signal = np.asarray(waveform, dtype=np.float64)
    if signal.ndim != 1:
        raise InvalidArgumentError(f"waveform must be one-dimensional, got shape {signal.shape}")
    window = int(round(window_ms * sample_rate_hz / 1000.0))
    hop = int(round(hop_ms * sample_rate_hz / 1000.0))
    if window < 1 or hop < 1:
        raise InvalidArgumentError("window and hop must cover at least one sample")
    if len(signal) < window:
        raise InvalidArgumentError(f"waveform ({len(signal)} samples) shorter than one window ({window})")

    n_frames = (len(signal) - window) // hop + 1
    n_bins = window // 2 + 1
    # Contiguous near-equal bin ranges; array_split keeps every band non-empty
    # as long as bands <= n_bins.
    if bands > n_bins:
        raise InvalidArgumentError(f"bands ({bands}) exceeds available frequency bins ({n_bins})")
    band_slices = np.array_split(np.arange(n_bins), bands)

    frames = np.empty((n_frames, bands))
    for i in range(n_frames):
        chunk = signal[i * hop : i * hop + window]
        mags = np.abs(np.fft.rfft(chunk))
        for b, idx in enumerate(band_slices):
            frames[i, b] = np.log1p(np.sum(mags[idx]))
    return FrameSequence(frames=frames, frame_hop_ms=hop_ms, utterance_id=utterance_id)
