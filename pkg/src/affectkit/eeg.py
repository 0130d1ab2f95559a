"""Single-channel EEG synthesis and blink detection.

The detection pipeline is first-order differencing, magnitude thresholding
(values below the threshold are zeroed), and grouping of the surviving
samples into blink events. A synthetic-trace generator and an evaluation
harness make the whole pipeline testable without hardware.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidArgumentError

# Width of the synthetic blink pulse. Real blink artifacts last roughly
# 200-400 ms; the raised cosine gives a clean biphasic first difference.
BLINK_PULSE_WIDTH_MS = 300.0

# Fraction of a second over which synthetic noise is smoothed (band-limited).
NOISE_SMOOTH_S = 0.09

# Repo-fixed blink-detection benchmark. The sample rate is deliberately low:
# a 600-unit pulse spread over 300 ms must swing more than 150 units between
# adjacent samples, which requires sample intervals of ~30 ms or more.
BENCHMARK = {
    "duration_ms": 20000.0,
    "sample_rate_hz": 32.0,
    "blinks": 20,
    "noise_amplitude": 40.0,
    "blink_amplitude": 600.0,
    "seed": 7,
}


@dataclass(frozen=True)
class ElectrodeConfig:
    """Names of the collecting, reference, and bias electrodes."""

    collecting: str = "IN1P"
    reference: str = "REF"
    bias: str = "BIAS1"

    def __post_init__(self):
        names = (self.collecting, self.reference, self.bias)
        if any(not n for n in names):
            raise InvalidArgumentError("electrode names must be non-empty")
        if len(set(names)) != 3:
            raise InvalidArgumentError(f"electrode names must be pairwise distinct, got {names}")


@dataclass(frozen=True, eq=False)
class EegTrace:
    """Uniformly sampled single-channel signal in raw ADC units.

    Sample i is taken at ``start_time_ms + i * 1000 / sample_rate_hz``.
    The sample array is frozen; operations return new traces.
    """

    samples: np.ndarray
    sample_rate_hz: float
    electrodes: ElectrodeConfig = field(default_factory=ElectrodeConfig)
    start_time_ms: int = 0

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise InvalidArgumentError(f"samples must be one-dimensional, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise InvalidArgumentError("samples must be finite")
        if not self.sample_rate_hz > 0:
            raise InvalidArgumentError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        if not isinstance(self.start_time_ms, (int, np.integer)) or self.start_time_ms < 0:
            raise InvalidArgumentError(f"start_time_ms must be a non-negative integer, got {self.start_time_ms!r}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "sample_rate_hz", float(self.sample_rate_hz))
        object.__setattr__(self, "start_time_ms", int(self.start_time_ms))

    def __len__(self) -> int:
        return len(self.samples)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EegTrace):
            return NotImplemented
        return (
            self.sample_rate_hz == other.sample_rate_hz
            and self.start_time_ms == other.start_time_ms
            and self.electrodes == other.electrodes
            and np.array_equal(self.samples, other.samples)
        )

    @property
    def dt_ms(self) -> float:
        return 1000.0 / self.sample_rate_hz

    def times_ms(self) -> np.ndarray:
        return self.start_time_ms + np.arange(len(self.samples)) * self.dt_ms


@dataclass(frozen=True)
class BlinkParams:
    """Tuning knobs for detect_blinks. Threshold is in raw ADC units."""

    threshold: float = 150.0
    merge_gap_ms: float = 200.0
    refractory_ms: float = 300.0

    def __post_init__(self):
        if self.threshold < 0:
            raise InvalidArgumentError(f"threshold must be >= 0, got {self.threshold}")
        if not self.merge_gap_ms > 0:
            raise InvalidArgumentError(f"merge_gap_ms must be positive, got {self.merge_gap_ms}")
        if self.refractory_ms < self.merge_gap_ms:
            raise InvalidArgumentError(
                f"refractory_ms ({self.refractory_ms}) must be >= merge_gap_ms ({self.merge_gap_ms})"
            )


@dataclass(frozen=True)
class BlinkEvent:
    """One detected blink: when it peaked and how large the difference was."""

    peak_time_ms: float
    peak_magnitude: float

    def __post_init__(self):
        if self.peak_time_ms < 0:
            raise InvalidArgumentError(f"peak_time_ms must be >= 0, got {self.peak_time_ms}")
        if self.peak_magnitude < 0:
            raise InvalidArgumentError(f"peak_magnitude must be >= 0, got {self.peak_magnitude}")


@dataclass(frozen=True)
class DetectionReport:
    """Detection counts and the derived recall/precision."""

    true_blinks: int
    detected: int
    matched: int
    recall: float
    precision: float
    tolerance_ms: float

    def __post_init__(self):
        if self.matched > min(self.true_blinks, self.detected):
            raise InvalidArgumentError("matched cannot exceed min(true_blinks, detected)")
        for name in ("recall", "precision"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidArgumentError(f"{name} must lie in [0, 1], got {v}")

    def to_dict(self) -> dict:
        return {
            "true_blinks": self.true_blinks,
            "detected": self.detected,
            "matched": self.matched,
            "recall": self.recall,
            "precision": self.precision,
            "tolerance_ms": self.tolerance_ms,
        }


def _raised_cosine_pulse(times_ms: np.ndarray, center_ms: float, amplitude: float, width_ms: float) -> np.ndarray:
    """Hann-shaped pulse: peak `amplitude` at center, zero outside +-width/2."""
    half = width_ms / 2.0
    rel = (times_ms - center_ms) / half
    pulse = np.where(np.abs(rel) <= 1.0, 0.5 * amplitude * (1.0 + np.cos(np.pi * rel)), 0.0)
    return pulse


def generate_synthetic_eeg(
    duration_ms: float,
    sample_rate_hz: float,
    blink_times_ms,
    noise_amplitude: float,
    blink_amplitude: float,
    seed: int,
    electrodes: ElectrodeConfig | None = None,
) -> EegTrace:
    """Build a trace of band-limited noise plus one raised-cosine pulse per blink.

    Blink times are pulse centers and must be strictly increasing within
    [0, duration_ms). Noise is seeded white noise smoothed over ~90 ms and
    rescaled so its largest magnitude equals noise_amplitude exactly
    (zero noise_amplitude yields an exactly zero noise floor). Deterministic
    for a fixed seed.
    """
    if not duration_ms > 0:
        raise InvalidArgumentError(f"duration_ms must be positive, got {duration_ms}")
    if not sample_rate_hz > 0:
        raise InvalidArgumentError(f"sample_rate_hz must be positive, got {sample_rate_hz}")
    if noise_amplitude < 0:
        raise InvalidArgumentError(f"noise_amplitude must be >= 0, got {noise_amplitude}")
    if not blink_amplitude > 0:
        raise InvalidArgumentError(f"blink_amplitude must be positive, got {blink_amplitude}")
    if not blink_amplitude > noise_amplitude:
        raise InvalidArgumentError(
            f"blink_amplitude ({blink_amplitude}) must exceed noise_amplitude ({noise_amplitude})"
        )
    blink_times = np.asarray(list(blink_times_ms), dtype=np.float64)
    if blink_times.size and not np.all(np.diff(blink_times) > 0):
        raise InvalidArgumentError("blink_times_ms must be strictly increasing")
    if blink_times.size and (blink_times[0] < 0 or blink_times[-1] >= duration_ms):
        raise InvalidArgumentError("blink times must lie within [0, duration_ms)")

    n = int(np.floor(duration_ms * sample_rate_hz / 1000.0))
    if n < 1:
        raise InvalidArgumentError("duration too short for one sample at this rate")
    times = np.arange(n) * (1000.0 / sample_rate_hz)

    signal = np.zeros(n)
    if noise_amplitude > 0:
        rng = np.random.default_rng(seed)
        white = rng.standard_normal(n)
        window = max(1, int(round(sample_rate_hz * NOISE_SMOOTH_S)))
        smooth = np.convolve(white, np.ones(window) / window, mode="same")
        peak = np.max(np.abs(smooth))
        if peak > 0:
            signal += smooth * (noise_amplitude / peak)
    for center in blink_times:
        signal += _raised_cosine_pulse(times, center, blink_amplitude, BLINK_PULSE_WIDTH_MS)

    return EegTrace(
        samples=signal,
        sample_rate_hz=sample_rate_hz,
        electrodes=electrodes or ElectrodeConfig(),
        start_time_ms=0,
    )


def benchmark_blink_times(
    count: int,
    duration_ms: float,
    seed: int,
    margin_ms: float = 500.0,
    jitter_ms: float = 200.0,
) -> list[float]:
    """Spread `count` blink centers over the trace: even spacing plus seeded jitter.

    Spacing is chosen so jittered neighbours stay well clear of the default
    merge gap and refractory period.
    """
    if count < 1:
        raise InvalidArgumentError(f"count must be >= 1, got {count}")
    if duration_ms <= 2 * margin_ms:
        raise InvalidArgumentError("duration_ms too short for the requested margin")
    rng = np.random.default_rng(seed)
    base = np.linspace(margin_ms, duration_ms - margin_ms, count)
    jitter = rng.uniform(-jitter_ms, jitter_ms, size=count)
    times = np.sort(base + jitter)
    return [float(t) for t in times]


def first_difference(trace: EegTrace) -> EegTrace:
    """Adjacent-sample difference d[i] = x[i+1] - x[i]; one sample shorter.

    Sample i of the output is attributed to the time of input sample i.
    """
    if len(trace) < 2:
        raise InvalidArgumentError(f"trace must have >= 2 samples, got {len(trace)}")
    return replace(trace, samples=np.diff(trace.samples))


def amplitude_smooth(diff_trace: EegTrace, threshold: float) -> EegTrace:
    """Keep |d[i]| where it reaches the threshold, zero elsewhere.

    Magnitude equal to the threshold is kept. Both difference polarities
    survive, so a blink's rising and falling edges both contribute.
    """
    if threshold < 0:
        raise InvalidArgumentError(f"threshold must be >= 0, got {threshold}")
    mag = np.abs(diff_trace.samples)
    return replace(diff_trace, samples=np.where(mag >= threshold, mag, 0.0))


def detect_blinks(trace: EegTrace, params: BlinkParams | None = None) -> list[BlinkEvent]:
    """Run the difference / threshold / grouping pipeline over a trace.

    Surviving samples whose spacing is below params.merge_gap_ms form one
    group; each group becomes a single event at its largest magnitude
    (earliest sample on ties). An event closer than params.refractory_ms to
    the previously accepted one is discarded. Events are returned in time
    order.
    """
    params = params or BlinkParams()
    smoothed = amplitude_smooth(first_difference(trace), params.threshold)
    dt_ms = smoothed.dt_ms
    nz = np.flatnonzero(smoothed.samples)
    if nz.size == 0:
        return []

    groups: list[np.ndarray] = []
    split_at = np.flatnonzero(np.diff(nz) * dt_ms >= params.merge_gap_ms) + 1
    for group in np.split(nz, split_at):
        groups.append(group)

    events: list[BlinkEvent] = []
    last_accepted = None
    for group in groups:
        values = smoothed.samples[group]
        peak_idx = int(group[int(np.argmax(values))])
        peak_time = smoothed.start_time_ms + peak_idx * dt_ms
        if last_accepted is not None and peak_time - last_accepted < params.refractory_ms:
            continue
        events.append(BlinkEvent(peak_time_ms=float(peak_time), peak_magnitude=float(np.max(values))))
        last_accepted = peak_time
    return events


def evaluate_detection(events: list[BlinkEvent], truth_ms, tolerance_ms: float) -> DetectionReport:
    """Greedily match detections to ground-truth instants within a tolerance.

    Both lists are walked in time order; a detection pairs with the earliest
    unmatched truth instant within tolerance_ms, once. Empty truth gives
    recall 1, empty detections give precision 1.
    """
    if not tolerance_ms > 0:
        raise InvalidArgumentError(f"tolerance_ms must be positive, got {tolerance_ms}")
    truth = [float(t) for t in truth_ms]
    if any(b < a for a, b in zip(truth, truth[1:])):
        raise InvalidArgumentError("truth_ms must be sorted ascending")
    detections = sorted(e.peak_time_ms for e in events)

    matched = 0
    i = j = 0
    while i < len(detections) and j < len(truth):
        delta = detections[i] - truth[j]
        if abs(delta) <= tolerance_ms:
            matched += 1
            i += 1
            j += 1
        elif delta < 0:
            i += 1  # detection too early to match any remaining truth
        else:
            j += 1  # truth instant missed by every remaining detection
    n_true = len(truth)
    n_det = len(detections)
    return DetectionReport(
        true_blinks=n_true,
        detected=n_det,
        matched=matched,
        recall=matched / n_true if n_true else 1.0,
        precision=matched / n_det if n_det else 1.0,
        tolerance_ms=float(tolerance_ms),
    )


# --- serialization ---------------------------------------------------------


def trace_to_csv(trace: EegTrace) -> str:
    """CSV with a `time_ms,amplitude` header, one sample per row."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["time_ms", "amplitude"])
    for t, a in zip(trace.times_ms(), trace.samples):
        writer.writerow([repr(float(t)), repr(float(a))])
    return buf.getvalue()


def trace_from_csv(text: str, electrodes: ElectrodeConfig | None = None) -> EegTrace:
    """Rebuild a trace from CSV; the rate is inferred from the first two rows."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != ["time_ms", "amplitude"]:
        raise InvalidArgumentError(f"expected header time_ms,amplitude, got {header}")
    times: list[float] = []
    amplitudes: list[float] = []
    for row in reader:
        if not row:
            continue
        times.append(float(row[0]))
        amplitudes.append(float(row[1]))
    if len(times) < 2:
        raise InvalidArgumentError("trace CSV must contain at least 2 samples")
    dt = times[1] - times[0]
    if dt <= 0:
        raise InvalidArgumentError("trace CSV times must be strictly increasing")
    return EegTrace(
        samples=np.asarray(amplitudes),
        sample_rate_hz=1000.0 / dt,
        electrodes=electrodes or ElectrodeConfig(),
        start_time_ms=int(round(times[0])),
    )


def trace_to_dict(trace: EegTrace) -> dict:
    return {
        "sample_rate_hz": trace.sample_rate_hz,
        "start_time_ms": trace.start_time_ms,
        "electrodes": {
            "collecting": trace.electrodes.collecting,
            "reference": trace.electrodes.reference,
            "bias": trace.electrodes.bias,
        },
        "samples": [float(x) for x in trace.samples],
    }


def trace_from_dict(data: dict) -> EegTrace:
    try:
        electrodes = ElectrodeConfig(**data["electrodes"])
        return EegTrace(
            samples=np.asarray(data["samples"], dtype=np.float64),
            sample_rate_hz=data["sample_rate_hz"],
            electrodes=electrodes,
            start_time_ms=data["start_time_ms"],
        )
    except (KeyError, TypeError) as exc:
        raise InvalidArgumentError(f"malformed trace JSON: {exc}") from exc


def trace_to_json(trace: EegTrace) -> str:
    return json.dumps(trace_to_dict(trace), sort_keys=True, indent=2) + "\n"


def trace_from_json(text: str) -> EegTrace:
    return trace_from_dict(json.loads(text))
