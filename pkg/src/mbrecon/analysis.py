"""Experiment metrics: prediction length, periodogram, residuals, noise.

Prediction length T(eps) counts how many leading iterated-prediction steps
stay within eps of the true continuation, either from the single end-of-set
start point or averaged over start points striding through the training
set.  Scalar predictions compare by absolute difference, planar ones by
Euclidean distance.

Noise injection is seed-deterministic and fully specified, so an
independent implementation can reproduce the stream:

* draw 64-bit words z_m = mix64(seed + m * 0x9E3779B97F4A7C15 mod 2**64)
  for m = 1, 2, ..., where mix64 is the SplitMix64 finalizer
  (z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
  z *= 0x94D049BB133111EB; z ^= z >> 31);
* map pairs of words to uniforms u1 = ((z1 >> 11) + 1) * 2**-53 in (0, 1]
  and u2 = (z2 >> 11) * 2**-53 in [0, 1);
* one normal deviate per pair: sqrt(-2 ln u1) * cos(2 pi u2).

The word and uniform streams are bit-exact by construction; the final
deviates match another implementation to the last-ulp behaviour of its
log/cos routines.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .errors import PredictionDiverged, SeriesTooShort
from .generators import TimeSeries, TimeSeries2D

DEFAULT_STRIDE = 100
DEFAULT_MAX_HORIZON = 1000


class PredictionMode(enum.Enum):
    END_OF_SET = "end-of-set"
    MEAN_OVER_SET = "mean-over-set"


class NoiseScaling(enum.Enum):
    RELATIVE_TO_STD = "relative"
    ABSOLUTE = "absolute"


@dataclass(frozen=True)
class PredictionReport:
    epsilons: np.ndarray
    lengths: np.ndarray
    mode: PredictionMode
    meta: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        e = np.asarray(self.epsilons, dtype=np.float64)
        t = np.asarray(self.lengths, dtype=np.int64)
        e.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "epsilons", e)
        object.__setattr__(self, "lengths", t)


@dataclass(frozen=True)
class Spectrum:
    """Periodogram ordinates at the positive Fourier frequencies."""

    omegas: np.ndarray
    ordinates: np.ndarray
    periods: np.ndarray


def _as_points(series) -> np.ndarray:
    if isinstance(series, (TimeSeries, TimeSeries2D)):
        return series.values
    return np.asarray(series, dtype=np.float64)


def _deviations(predicted, truth) -> np.ndarray:
    p = _as_points(predicted)
    t = _as_points(truth)
    m = min(len(p), len(t))
    d = p[:m] - t[:m]
    if d.ndim == 2:
        return np.sqrt(np.sum(d * d, axis=1))
    return np.abs(d)


def prediction_length(predicted, truth, epsilon: float) -> int:
    """Largest T with every deviation among the first T at or below epsilon."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    dev = _deviations(predicted, truth)
    beyond = np.nonzero(dev > epsilon)[0]
    return int(beyond[0]) if beyond.size else len(dev)


def prediction_curve(model, training, truth_continuation,
                     epsilons: Sequence[float],
                     mode: PredictionMode = PredictionMode.END_OF_SET,
                     stride: int = DEFAULT_STRIDE,
                     max_horizon: int = DEFAULT_MAX_HORIZON,
                     meta: Optional[Dict[str, object]] = None) -> PredictionReport:
    """T(eps) over an increasing tolerance grid.

    End-of-set mode predicts once from the last training point and scores
    against ``truth_continuation``.  Mean-over-set predicts from start
    points striding through the training set, scores each against the known
    subsequent training data, and averages (rounding to nearest integer);
    diverged starts contribute the prefix they managed.
    """
    eps = np.asarray(list(epsilons), dtype=np.float64)
    if len(eps) == 0 or np.any(eps <= 0) or np.any(np.diff(eps) <= 0):
        raise ValueError("epsilons must be positive and strictly increasing")
    info: Dict[str, object] = dict(meta or {})
    tr = _as_points(training)

    if mode is PredictionMode.END_OF_SET:
        truth = _as_points(truth_continuation)
        start = tr[-1] if tr.ndim == 1 else tuple(tr[-1])
        pred, diverged = _predict_clipped(model, start, len(truth))
        if diverged:
            info["diverged_at"] = len(pred)
        lengths = np.array([prediction_length(pred, truth, e) for e in eps])
        return PredictionReport(eps, lengths, mode, info)

    if stride < 1:
        raise ValueError("stride must be at least 1")
    sums = np.zeros(len(eps))
    count = 0
    failures = 0
    for t0 in range(0, len(tr) - 2, stride):
        horizon = min(max_horizon, len(tr) - 1 - t0)
        start = tr[t0] if tr.ndim == 1 else tuple(tr[t0])
        pred, diverged = _predict_clipped(model, start, horizon)
        failures += int(diverged)
        truth = tr[t0 + 1:t0 + 1 + horizon]
        sums += [prediction_length(pred, truth, e) for e in eps]
        count += 1
    info["starts"] = count
    if failures:
        info["diverged_starts"] = failures
    lengths = np.rint(sums / max(count, 1)).astype(np.int64)
    return PredictionReport(eps, lengths, PredictionMode.MEAN_OVER_SET, info)


def _predict_clipped(model, start, steps):
    try:
        return _as_points(model.predict(start, steps)), False
    except PredictionDiverged as err:
        return np.asarray(err.prefix), True


def periodogram(series: TimeSeries) -> Spectrum:
    """Squared sinusoidal correlation sums at omega_j = 2 pi j / n, j >= 1.

    The series is mean-centered first (the zero-frequency ordinate, which
    centering kills, is dropped anyway) and no 1/n normalization is applied.
    """
    n = len(series)
    if n < 2:
        raise SeriesTooShort("periodogram needs at least 2 samples")
    y = series.values - np.mean(series.values)
    spec = np.fft.rfft(y)
    half = n // 2
    js = np.arange(1, half + 1)
    ordinates = np.abs(spec[1:half + 1]) ** 2
    omegas = 2.0 * np.pi * js / n
    return Spectrum(omegas, ordinates, n / js)


def dominant_period(spectrum: Spectrum) -> Tuple[float, float]:
    """Period and power of the strongest ordinate; ties go to the longer period."""
    if len(spectrum.ordinates) == 0:
        raise ValueError("empty spectrum")
    # argmax returns the first maximum, which is the smallest omega.
    j = int(np.argmax(spectrum.ordinates))
    return float(spectrum.periods[j]), float(spectrum.ordinates[j])


def residuals(predicted: TimeSeries, truth: TimeSeries) -> TimeSeries:
    p, t = predicted.values, truth.values
    if len(p) != len(t):
        raise ValueError("residuals need equal lengths")
    return TimeSeries(t - p, label="residuals")


def lag_pairs(series: TimeSeries, lag: int) -> np.ndarray:
    if lag < 1:
        raise ValueError("lag must be at least 1")
    x = series.values
    if len(x) <= lag:
        raise SeriesTooShort(f"lag {lag} needs more than {lag} samples")
    return np.column_stack([x[:-lag], x[lag:]])


def delay_embed(series: TimeSeries, m: int, tau: int) -> np.ndarray:
    """Delay vectors (x_t, x_{t+tau}, ..., x_{t+(m-1) tau}), shape (count, m)."""
    if m < 1 or tau < 1:
        raise ValueError("embedding dimension and delay must be at least 1")
    x = series.values
    count = len(x) - (m - 1) * tau
    if count < 1:
        raise SeriesTooShort(f"embedding needs at least {(m - 1) * tau + 1} samples")
    return np.column_stack([x[i * tau:i * tau + count] for i in range(m)])


# ---------------------------------------------------------------------------
# Deterministic Gaussian noise
# ---------------------------------------------------------------------------

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _splitmix64(seed: int, count: int) -> np.ndarray:
    idx = np.arange(1, count + 1, dtype=np.uint64)
    z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + idx * _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def gaussian_samples(seed: int, count: int) -> np.ndarray:
    """Standard normal stream per the algorithm in the module docstring."""
    if count < 0:
        raise ValueError("count must be non-negative")
    z = _splitmix64(seed, 2 * count)
    u1 = ((z[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * 2.0 ** -53
    u2 = (z[1::2] >> np.uint64(11)).astype(np.float64) * 2.0 ** -53
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def add_gaussian_noise(series: TimeSeries, level: float, seed: int,
                       scaling: NoiseScaling = NoiseScaling.RELATIVE_TO_STD) -> TimeSeries:
    """Add i.i.d. zero-mean Gaussian noise, deterministically per seed.

    ``RELATIVE_TO_STD`` uses standard deviation ``level * std(series)``;
    ``ABSOLUTE`` uses ``level`` directly as the standard deviation.
    """
    if level < 0:
        raise ValueError("level must be non-negative")
    if scaling is NoiseScaling.RELATIVE_TO_STD:
        amplitude = level * float(np.std(series.values))
    else:
        amplitude = level
    if amplitude == 0.0:
        return TimeSeries(series.values.copy(), label=series.label)
    noise = amplitude * gaussian_samples(seed, len(series))
    return TimeSeries(series.values + noise,
                      label=f"{series.label or 'series'} + noise")
