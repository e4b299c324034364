"""Composite estimator: Laguerre filter bank -> random features -> Bayesian
linear regression, with train/test orchestration for sampled trajectories.

The model reads a multichannel input trajectory through one Laguerre filter
per channel, evaluates a sampled feature map on the concatenated filter
states, and regresses target channels on those features with a conjugate
Gaussian posterior. The filter always runs causally over the FULL input
trajectory; the training span only selects which rows enter the regression,
so test-region latents start from the state reached at the split.

Time-series mode trains on a shift-by-k pair built by ``make_shifted_target``
and extrapolates with ``rollout``, which feeds the posterior-mean prediction
back as the next input sample. Rollout uncertainty is the one-step latent
variance along the realized path; no propagation through the feedback loop
is attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial.distance import pdist

from . import bayes
from .bayes import GaussianPosterior, NoiseModel
from .dynamics import TrajectoryData
from .features import (FeatureMap, evaluate_features, passthrough_map,
                       sample_elm, sample_rff)
from .laguerre import LaguerreBank, LaguerreConfig, filter_signal

__all__ = [
    "FeatureSpec",
    "BWLConfig",
    "FittedBWL",
    "PredictionResult",
    "Metrics",
    "RolloutResult",
    "build_latents",
    "fit",
    "predict",
    "make_shifted_target",
    "rollout",
    "evaluate",
    "median_lengthscale",
]

# median-heuristic lengthscales use at most this many latent rows (strided
# deterministically) to bound the pairwise-distance cost
MEDIAN_MAX_ROWS = 4096


@dataclass(frozen=True)
class FeatureSpec:
    """How to sample the feature map over latent states.

    ``lengthscale`` applies to the "rff" kind only and may be the string
    "median", resolved against the training-span latents at fit time.
    ``activation`` applies to the "elm" kind. The "passthrough" kind (features
    equal latents) exists for composition tests and stays off the CLI.
    """

    kind: str
    n_features: int
    lengthscale: float | str | None = None
    activation: str = "tanh"
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("rff", "elm", "passthrough"):
            raise ValueError(f"unknown feature kind {self.kind!r}")
        if self.kind != "passthrough" and self.n_features < 1:
            raise ValueError(f"n_features must be >= 1, got {self.n_features}")
        if self.kind == "rff":
            ls = self.lengthscale
            if ls != "median" and not (isinstance(ls, (int, float)) and ls > 0):
                raise ValueError(
                    "rff lengthscale must be a positive number or 'median', "
                    f"got {ls!r}")


@dataclass(frozen=True)
class BWLConfig:
    """Everything needed to fit a model: one LaguerreConfig per input
    channel, a feature map, the regression noise model, the sample period."""

    bank: tuple[LaguerreConfig, ...]
    feature: FeatureSpec
    noise: NoiseModel
    sample_dt: float

    def __post_init__(self):
        bank = tuple(self.bank)
        if not bank:
            raise ValueError("bank must contain at least one channel")
        if not self.sample_dt > 0:
            raise ValueError(f"sample_dt must be positive, got {self.sample_dt}")
        object.__setattr__(self, "bank", bank)

    @property
    def total_order(self) -> int:
        return sum(c.order for c in self.bank)

    def make_bank(self) -> LaguerreBank:
        return LaguerreBank.from_configs(self.bank, self.sample_dt)


@dataclass(frozen=True)
class FittedBWL:
    """Trained model. ``config`` is fully resolved (numeric lengthscale);
    ``training_span`` records the half-open row range used for regression."""

    config: BWLConfig
    feature_map: FeatureMap
    posterior: GaussianPosterior
    training_span: tuple[int, int]

    def __post_init__(self):
        if self.feature_map.input_dim != self.config.total_order:
            raise ValueError(
                f"feature map input dim {self.feature_map.input_dim} does not "
                f"match bank total order {self.config.total_order}")
        if self.posterior.feature_count != self.feature_map.feature_count:
            raise ValueError(
                f"posterior size {self.posterior.feature_count} does not match "
                f"feature count {self.feature_map.feature_count}")

    @property
    def n_outputs(self) -> int:
        return self.posterior.n_outputs


@dataclass(frozen=True)
class PredictionResult:
    """Per-sample predictive moments of the fitted model."""

    mean: np.ndarray  # (M, n_out)
    latent_variance: np.ndarray  # (M,)
    latent_plus_noise_variance: np.ndarray  # (M,)


@dataclass(frozen=True)
class Metrics:
    """RMSE and mean latent variance over an explicit row span."""

    rmse: float
    mean_latent_variance: float
    sample_count: int


@dataclass(frozen=True)
class RolloutResult:
    """Closed-loop generation: mean trajectory plus the one-step latent
    variance at each realized feature vector."""

    trajectory: TrajectoryData
    latent_variance: np.ndarray  # (steps,)
    noise_variance: float

    @property
    def latent_plus_noise_variance(self) -> np.ndarray:
        return self.latent_variance + self.noise_variance


def median_lengthscale(x: np.ndarray) -> float:
    """Median pairwise Euclidean distance between rows of ``x``.

    Rows are strided down to at most MEDIAN_MAX_ROWS before forming pairs so
    the cost stays quadratic in a bounded count; the stride keeps the result
    deterministic.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("need a 2-D array with at least two rows")
    if x.shape[0] > MEDIAN_MAX_ROWS:
        stride = math.ceil(x.shape[0] / MEDIAN_MAX_ROWS)
        x = x[::stride]
    med = float(np.median(pdist(x)))
    if not med > 0:
        raise ValueError("median pairwise distance is zero; rows are not distinct")
    return med


def _resolve_feature_map(spec: FeatureSpec, input_dim: int,
                         train_latents: np.ndarray) -> tuple[FeatureMap, FeatureSpec]:
    if spec.kind == "passthrough":
        return passthrough_map(input_dim), replace(spec, n_features=input_dim)
    if spec.kind == "elm":
        return sample_elm(spec.n_features, input_dim, spec.activation,
                          spec.seed), spec
    ls = spec.lengthscale
    if ls == "median":
        ls = median_lengthscale(train_latents)
    fmap = sample_rff(spec.n_features, input_dim, float(ls), spec.seed)
    return fmap, replace(spec, lengthscale=float(ls))


def build_latents(config: BWLConfig, u: TrajectoryData) -> np.ndarray:
    """Filter every input channel and concatenate states columnwise; row k is
    the stacked filter state after k zero-order-hold steps (row 0 is zero)."""
    return filter_signal(config.make_bank(), u)


def _check_same_grid(u: TrajectoryData, z: TrajectoryData) -> None:
    # rows pair positionally; t0 may differ by design (shifted targets)
    if u.n_samples != z.n_samples:
        raise ValueError(
            f"input and target lengths differ: {u.n_samples} vs {z.n_samples}")
    if not math.isclose(u.dt, z.dt, rel_tol=1e-12):
        raise ValueError(
            f"input and target sample periods differ: {u.dt} vs {z.dt}")


def _check_span(span: tuple[int, int], n_samples: int) -> tuple[int, int]:
    start, stop = int(span[0]), int(span[1])
    if not (0 <= start < stop <= n_samples):
        raise ValueError(
            f"span [{start}, {stop}) is empty or outside 0..{n_samples}")
    return start, stop


def fit(config: BWLConfig, u: TrajectoryData, z: TrajectoryData,
        train_span: tuple[int, int]) -> FittedBWL:
    """Fit the posterior on the rows of ``train_span`` (half-open).

    Latents are built on the full input trajectory so the filter state
    evolves causally through all samples; only masked rows enter the
    regression. A "median" lengthscale is resolved on the training-span
    latents and recorded in the returned config.
    """
    _check_same_grid(u, z)
    start, stop = _check_span(train_span, u.n_samples)
    latents = build_latents(config, u)
    fmap, feature_spec = _resolve_feature_map(config.feature, config.total_order,
                                              latents[start:stop])
    phi = evaluate_features(fmap, latents[start:stop])
    posterior = bayes.fit_posterior(phi, z.values[start:stop], config.noise)
    resolved = replace(config, feature=feature_spec)
    return FittedBWL(config=resolved, feature_map=fmap, posterior=posterior,
                     training_span=(start, stop))


def predict(model: FittedBWL, u: TrajectoryData) -> PredictionResult:
    """Open-loop prediction over a full input trajectory."""
    latents = build_latents(model.config, u)
    phi = evaluate_features(model.feature_map, latents)
    mean, latent = bayes.predict_batch(model.posterior, phi)
    sigma2 = model.posterior.noise.sigma**2
    return PredictionResult(mean=mean, latent_variance=latent,
                            latent_plus_noise_variance=latent + sigma2)


def make_shifted_target(series: TrajectoryData,
                        k: int) -> tuple[TrajectoryData, TrajectoryData]:
    """Split a series into a k-step-ahead regression pair.

    Input holds rows [0, M-k); the target holds rows [k, M) with its start
    time advanced by k steps, so target row j is the k-step-ahead value of
    input row j.
    """
    if k < 1:
        raise ValueError(f"shift k must be >= 1, got {k}")
    m = series.n_samples
    if m <= k:
        raise ValueError(f"series of length {m} is too short for shift {k}")
    head = TrajectoryData(t0=series.t0, dt=series.dt, values=series.values[:m - k])
    tail = TrajectoryData(t0=series.t0 + k * series.dt, dt=series.dt,
                          values=series.values[k:])
    return head, tail


def rollout(model: FittedBWL, series_prefix: TrajectoryData, steps: int,
            feedback: np.ndarray | None = None) -> RolloutResult:
    """Generate ``steps`` samples beyond the prefix in closed loop.

    The filter is advanced through the prefix, then each posterior-mean
    prediction is fed back as the next input sample. Trained in shift-by-one
    mode with a prefix of P samples, emission i is the model's estimate of
    series sample P + i.

    ``feedback`` optionally replaces the fed-back predictions with given rows
    (row i substitutes for emission i when advancing the filter); supplying
    the true continuation reproduces open-loop prediction exactly. Only the
    first steps - 1 rows are consumed, so shapes (steps - 1, n) and (steps, n)
    are both accepted.
    """
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    n_ch = series_prefix.n_channels
    if model.n_outputs != n_ch:
        raise ValueError(
            f"model predicts {model.n_outputs} channels but the prefix has "
            f"{n_ch}; closed-loop feedback needs them equal")
    if feedback is not None:
        feedback = np.asarray(feedback, dtype=float)
        if feedback.ndim == 1:
            feedback = feedback[:, None]
        if feedback.shape[0] < steps - 1 or feedback.shape[1] != n_ch:
            raise ValueError(
                f"feedback must supply at least {steps - 1} rows of {n_ch} "
                f"channels, got shape {feedback.shape}")

    bank = model.config.make_bank()
    filters = [f for _, f in bank.channels]
    # stacked state after consuming all but the last prefix row
    state = build_latents(model.config, series_prefix)[-1]
    splits = np.cumsum([c.order for c in model.config.bank])[:-1]
    states = np.split(state, splits)
    pending = series_prefix.values[-1]

    means = np.empty((steps, n_ch))
    latent = np.empty(steps)
    sigma2 = model.posterior.noise.sigma**2
    for i in range(steps):
        phi_row = evaluate_features(model.feature_map,
                                    np.concatenate(states)[None, :])
        one = bayes.predict(model.posterior, phi_row[0])
        means[i] = one.mean
        latent[i] = one.variance
        for c, filt in enumerate(filters):
            states[c] = filt.phi_matrix @ states[c] + filt.gamma_vector * pending[c]
        pending = feedback[i] if feedback is not None and i < steps - 1 else means[i]

    t_start = series_prefix.t0 + series_prefix.n_samples * series_prefix.dt
    traj = TrajectoryData(t0=t_start, dt=series_prefix.dt, values=means)
    return RolloutResult(trajectory=traj, latent_variance=latent,
                         noise_variance=sigma2)


def evaluate(pred: PredictionResult, truth, span: tuple[int, int],
             channels=None) -> Metrics:
    """Metrics over the rows of ``span``.

    RMSE averages the per-sample squared error over output channels before
    averaging over samples, so a constant offset c on every channel gives
    rmse = |c|. ``channels`` optionally restricts the error to a subset of
    output columns (latent variance is per-sample and unaffected).
    """
    truth_values = truth.values if isinstance(truth, TrajectoryData) else \
        np.asarray(truth, dtype=float)
    if truth_values.ndim == 1:
        truth_values = truth_values[:, None]
    if truth_values.shape != pred.mean.shape:
        raise ValueError(
            f"truth shape {truth_values.shape} does not match predictions "
            f"{pred.mean.shape}")
    start, stop = _check_span(span, pred.mean.shape[0])
    err = pred.mean[start:stop] - truth_values[start:stop]
    if channels is not None:
        err = err[:, list(channels)]
    rmse = float(np.sqrt(np.mean(err**2, axis=1).mean()))
    mlv = float(pred.latent_variance[start:stop].mean())
    return Metrics(rmse=rmse, mean_latent_variance=mlv,
                   sample_count=stop - start)
