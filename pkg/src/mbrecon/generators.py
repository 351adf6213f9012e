"""Deterministic generation of chaotic test orbits.

Four discrete maps are provided:

* quadratic (logistic): ``x' = mu * x * (1 - x)``
* exponential quadratic: ``x' = mu * x * (1 - x) * exp(-k * x)``
* Henon, planar form: ``x1' = 1 + x2 - a * x1**2``, ``x2' = b * x1``
* Henon, scalar delay form: ``x' = 1 + b * x_prev - a * x_curr**2``

plus a Lyapunov-exponent estimator for the one-dimensional maps, used as a
chaoticity sanity check on generated data.

The planar and delay Henon bookkeepings describe the same recurrence; the
step functions are written so that both produce bit-identical orbits.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Mapping, Optional, Tuple, Union

import numpy as np

from .errors import DerivativeVanished, DivergedOrbit

DEFAULT_BURN_IN = 1000
DIVERGENCE_BOUND = 1.0e6


class MapKind(enum.Enum):
    QUADRATIC = "quadratic"
    EXP_QUADRATIC = "exp-quadratic"
    HENON2D = "henon2d"
    HENON_DELAY = "henon-delay"


@dataclass(frozen=True)
class TimeSeries:
    """An ordered sequence of finite scalar samples."""

    values: np.ndarray
    label: Optional[str] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size < 1:
            raise ValueError("TimeSeries needs a non-empty 1-d array")
        if not np.all(np.isfinite(v)):
            raise ValueError("TimeSeries values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class TimeSeries2D:
    """An ordered sequence of finite planar samples, shape (N, 2)."""

    values: np.ndarray
    label: Optional[str] = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 1:
            raise ValueError("TimeSeries2D needs a non-empty (N, 2) array")
        if not np.all(np.isfinite(v)):
            raise ValueError("TimeSeries2D values must be finite")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class MapSpec:
    """A map kind with parameters, an initial state and a burn-in count."""

    kind: MapKind
    params: Mapping[str, float]
    initial: Tuple[float, ...]
    burn_in: int = DEFAULT_BURN_IN

    def __post_init__(self):
        if self.burn_in < 0:
            raise ValueError("burn_in must be non-negative")
        object.__setattr__(self, "params", dict(self.params))
        object.__setattr__(self, "initial", tuple(float(v) for v in self.initial))
        for v in self.initial:
            if not math.isfinite(v):
                raise ValueError("initial state must be finite")
        k = self.kind
        p = self.params
        if k is MapKind.QUADRATIC:
            if len(self.initial) != 1:
                raise ValueError("quadratic map takes one initial value")
            if not 0.0 < p["mu"] <= 4.0:
                raise ValueError("quadratic map requires mu in (0, 4]")
        elif k is MapKind.EXP_QUADRATIC:
            if len(self.initial) != 1:
                raise ValueError("exponential quadratic map takes one initial value")
            if p["mu"] <= 0.0 or p["k"] <= 0.0:
                raise ValueError("exponential quadratic map requires mu > 0 and k > 0")
        elif k in (MapKind.HENON2D, MapKind.HENON_DELAY):
            if len(self.initial) != 2:
                raise ValueError("Henon maps take two initial values")
            if not (math.isfinite(p["a"]) and math.isfinite(p["b"])):
                raise ValueError("Henon parameters must be finite")
        else:  # pragma: no cover - enum is closed
            raise ValueError(f"unknown map kind {k}")

    # The canonical parameter sets used throughout the experiments.
    @classmethod
    def quadratic(cls, mu: float = 3.8, x0: float = 0.123456789,
                  burn_in: int = DEFAULT_BURN_IN) -> "MapSpec":
        return cls(MapKind.QUADRATIC, {"mu": mu}, (x0,), burn_in)

    @classmethod
    def exp_quadratic(cls, mu: float = 10.0, k: float = 2.51705,
                      x0: float = 0.123456789,
                      burn_in: int = DEFAULT_BURN_IN) -> "MapSpec":
        return cls(MapKind.EXP_QUADRATIC, {"mu": mu, "k": k}, (x0,), burn_in)

    @classmethod
    def henon(cls, a: float = 1.4, b: float = 0.3, x0: float = 0.12,
              y0: float = 0.22, burn_in: int = DEFAULT_BURN_IN) -> "MapSpec":
        return cls(MapKind.HENON2D, {"a": a, "b": b}, (x0, y0), burn_in)

    @classmethod
    def henon_delay(cls, a: float = 1.4, b: float = 0.3, x_prev: float = 0.12,
                    x_curr: float = 0.22, burn_in: int = DEFAULT_BURN_IN) -> "MapSpec":
        """Delay form; the two seeds are (x_prev, x_curr) in that order."""
        return cls(MapKind.HENON_DELAY, {"a": a, "b": b}, (x_prev, x_curr), burn_in)

    def describe(self) -> str:
        ps = " ".join(f"{k}={v:g}" for k, v in sorted(self.params.items()))
        return f"{self.kind.value} {ps}"


def quadratic_step(x: float, mu: float) -> float:
    return mu * x * (1.0 - x)


def exp_quadratic_step(x: float, mu: float, k: float) -> float:
    return mu * x * (1.0 - x) * math.exp(-k * x)


def henon_step(state: Tuple[float, float], a: float, b: float) -> Tuple[float, float]:
    x1, x2 = state
    # Expression shape matches henon_delay_step so the two bookkeepings of
    # the recurrence round identically.
    return 1.0 + x2 - a * x1 * x1, b * x1


def henon_delay_step(x_prev: float, x_curr: float,
                     a: float = 1.4, b: float = 0.3) -> float:
    return 1.0 + b * x_prev - a * x_curr * x_curr


def _check(value: float, step: int, bound: float) -> float:
    if abs(value) > bound:
        raise DivergedOrbit(step, value, bound)
    return value


def generate_orbit(spec: MapSpec, length: int,
                   divergence_bound: float = DIVERGENCE_BOUND
                   ) -> Union[TimeSeries, TimeSeries2D]:
    """Iterate the map, drop ``spec.burn_in`` iterates, return the next ``length``.

    With ``burn_in == 0`` the first returned sample is the initial state
    itself (for the delay form, the ``x_curr`` seed).  Raises
    :class:`DivergedOrbit` if any iterate's magnitude exceeds the bound.
    """
    if length < 1:
        raise ValueError("length must be at least 1")
    k = spec.kind
    p = spec.params
    total = spec.burn_in + length

    if k is MapKind.QUADRATIC or k is MapKind.EXP_QUADRATIC:
        mu = p["mu"]
        if k is MapKind.QUADRATIC:
            step = lambda x: mu * x * (1.0 - x)
        else:
            kk = p["k"]
            step = lambda x: mu * x * (1.0 - x) * math.exp(-kk * x)
        out = np.empty(length)
        x = spec.initial[0]
        for i in range(total):
            _check(x, i, divergence_bound)
            if i >= spec.burn_in:
                out[i - spec.burn_in] = x
            try:
                x = step(x)
            except OverflowError:
                # math.exp blows past the double range before the magnitude
                # check can see the iterate.
                raise DivergedOrbit(i + 1, math.inf, divergence_bound) from None
        return TimeSeries(out, label=spec.describe())

    if k is MapKind.HENON2D:
        a, b = p["a"], p["b"]
        out2 = np.empty((length, 2))
        x1, x2 = spec.initial
        for i in range(total):
            _check(x1, i, divergence_bound)
            _check(x2, i, divergence_bound)
            if i >= spec.burn_in:
                out2[i - spec.burn_in] = (x1, x2)
            x1, x2 = 1.0 + x2 - a * x1 * x1, b * x1
        return TimeSeries2D(out2, label=spec.describe())

    # Delay form: emit the current value, then advance (prev, curr).
    a, b = p["a"], p["b"]
    out = np.empty(length)
    xp, xc = spec.initial
    for i in range(total):
        _check(xc, i, divergence_bound)
        if i >= spec.burn_in:
            out[i - spec.burn_in] = xc
        xp, xc = xc, 1.0 + b * xp - a * xc * xc
    return TimeSeries(out, label=spec.describe())


def lyapunov_estimate(spec: MapSpec, n_iterates: int) -> float:
    """Average of log|f'| along the post-burn-in orbit (natural log).

    Only the one-dimensional kinds have the required analytic derivative:

    * quadratic: ``f'(x) = mu * (1 - 2x)``
    * exponential quadratic: ``f'(x) = mu * exp(-k x) * ((1 - 2x) - k x (1 - x))``

    Raises :class:`DerivativeVanished` if |f'| drops below 1e-300 anywhere
    on the visited orbit (the log would blow up; superstable orbits do this).
    """
    if n_iterates < 1:
        raise ValueError("n_iterates must be at least 1")
    if spec.kind not in (MapKind.QUADRATIC, MapKind.EXP_QUADRATIC):
        raise ValueError("Lyapunov estimation needs a scalar map with an analytic derivative")
    orbit = generate_orbit(spec, n_iterates).values
    mu = spec.params["mu"]
    if spec.kind is MapKind.QUADRATIC:
        deriv = mu * (1.0 - 2.0 * orbit)
    else:
        k = spec.params["k"]
        deriv = mu * np.exp(-k * orbit) * ((1.0 - 2.0 * orbit) - k * orbit * (1.0 - orbit))
    mags = np.abs(deriv)
    bad = np.nonzero(mags < 1e-300)[0]
    if bad.size:
        i = int(bad[0])
        raise DerivativeVanished(i, float(orbit[i]))
    return float(np.mean(np.log(mags)))
