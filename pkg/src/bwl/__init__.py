"""Laguerre-filtered random-feature models with Bayesian output weights.

A stable linear filter bank built from rescaled Laguerre functions turns a
sampled input signal into fading-memory latent states; a sampled feature map
(cosine features or a random hidden layer) lifts those states; conjugate
Bayesian linear regression estimates the output weights with closed-form
predictive uncertainty. The ``bench`` module and the ``bwl`` command-line
tool reproduce a density-approximation benchmark and two dynamical-system
experiments end to end.
"""

from .bayes import (GaussianPosterior, IllConditionedError, NoiseModel,
                    PredictiveGaussian, fit_least_squares, fit_posterior,
                    predict_batch)
from .dynamics import (FourierInputSpec, TrajectoryData, TrimodalSpec,
                       add_noise, fourier_input, sample_domain, sample_phases,
                       simulate_forced_second_order, simulate_van_der_pol,
                       trimodal_gaussian)
from .features import (ACTIVATIONS, FeatureMap, atomic_map, evaluate_features,
                       sample_elm, sample_rff)
from .laguerre import (DiscreteFilter, LaguerreBank, LaguerreConfig,
                       LaguerreStateMatrices, discretize, filter_signal,
                       laguerre_polynomial, rescaled_laguerre, state_matrices)
from .model import (BWLConfig, FeatureSpec, FittedBWL, Metrics,
                    PredictionResult, RolloutResult, build_latents, evaluate,
                    fit, make_shifted_target, median_lengthscale, predict,
                    rollout)
from .rng import derive_seed, rng_from_seed

__version__ = "0.1.0"
