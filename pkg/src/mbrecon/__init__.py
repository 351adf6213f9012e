"""Measure-based reconstruction of chaotic maps from time series.

The package builds polynomial models of a generating map purely from
ergodic sums over an observed orbit: monomial moments define a polynomial
family orthonormal to the empirical invariant measure, and functional
moments over consecutive pairs project the unknown map onto that family.
No iterative parameter fitting is involved anywhere.

Alongside the one- and two-dimensional reconstruction cores there are data
generators for the standard chaotic test maps, baseline predictors (analog
method, autoregression, global monomial least squares), evaluation metrics
(prediction length, periodogram, lag plots, deterministic noise injection)
and a CLI with canned experiments.
"""

from .analysis import (NoiseScaling, PredictionMode, PredictionReport,
                       Spectrum, add_gaussian_noise, delay_embed,
                       dominant_period, gaussian_samples, lag_pairs,
                       periodogram, prediction_curve, prediction_length,
                       residuals)
from .baselines import (ARModel, MonomialModel, analog_predict, ar_fit,
                        ar_predict, monomial_ls_fit)
from .errors import (DataError, DerivativeVanished, DivergedOrbit,
                     IllConditioned, MbrError, MixedColumnCount,
                     NegativeNorm, NotEnoughNeighbors, NumericalError,
                     OverflowRisk, ParseError, PredictionDiverged,
                     SeriesTooShort, SingularNormalEquations)
from .generators import (MapKind, MapSpec, TimeSeries, TimeSeries2D,
                         exp_quadratic_step, generate_orbit, henon_delay_step,
                         henon_step, lyapunov_estimate, quadratic_step)
from .mbr1d import ReconstructedMap1D, fit, load_model, save_model
from .mbr2d import (BivarIndex, Diagnosis2D, OrthoPolySystem2D,
                    ReconstructedMap2D, diagnose2d, fit2d, graded_indices,
                    n20_closed_form, poly_system_2d, poly_system_2d_legacy)
from .moments import (FunctionalMoments, FunctionalMoments2D, MomentHierarchy,
                      MomentHierarchy2D, functional_moments,
                      functional_moments_2d, moment_hierarchy,
                      moment_hierarchy_2d)
from .orthopoly import (OrthoPolySystem, eval_poly, gram_oracle,
                        natural_poly_system)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
