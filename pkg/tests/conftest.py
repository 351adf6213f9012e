"""Shared dataset fixtures; generated once per session."""

import numpy as np
import pytest

from mbrecon import MapSpec, TimeSeries, TimeSeries2D, generate_orbit

TRAIN_1D = 30000
TRAIN_2D = 50000
HORIZON = 200


@pytest.fixture(scope="session")
def quad38():
    """mu=3.8 quadratic orbit: (training series, true continuation)."""
    full = generate_orbit(MapSpec.quadratic(mu=3.8), TRAIN_1D + HORIZON)
    return (TimeSeries(full.values[:TRAIN_1D], label="quad38"),
            TimeSeries(full.values[TRAIN_1D:], label="quad38 cont"))


@pytest.fixture(scope="session")
def quad4():
    full = generate_orbit(MapSpec.quadratic(mu=4.0), TRAIN_1D + HORIZON)
    return (TimeSeries(full.values[:TRAIN_1D], label="quad4"),
            TimeSeries(full.values[TRAIN_1D:], label="quad4 cont"))


@pytest.fixture(scope="session")
def expquad():
    full = generate_orbit(MapSpec.exp_quadratic(), TRAIN_1D + HORIZON)
    return (TimeSeries(full.values[:TRAIN_1D], label="expquad"),
            TimeSeries(full.values[TRAIN_1D:], label="expquad cont"))


@pytest.fixture(scope="session")
def henon():
    full = generate_orbit(MapSpec.henon(), TRAIN_2D + HORIZON)
    return (TimeSeries2D(full.values[:TRAIN_2D], label="henon"),
            TimeSeries2D(full.values[TRAIN_2D:], label="henon cont"))


@pytest.fixture(scope="session")
def henon_delay():
    full = generate_orbit(MapSpec.henon_delay(), TRAIN_1D + HORIZON)
    return (TimeSeries(full.values[:TRAIN_1D], label="henon-delay"),
            TimeSeries(full.values[TRAIN_1D:], label="henon-delay cont"))


@pytest.fixture(scope="session")
def quad_embedded(quad38):
    """(x_n, x_{n-1}) pairs from the quadratic orbit; exactly degenerate at degree 2."""
    x = np.concatenate([quad38[0].values, quad38[1].values])
    return TimeSeries2D(np.column_stack([x[1:], x[:-1]]), label="quad-embedded")
