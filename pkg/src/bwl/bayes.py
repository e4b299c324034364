"""Conjugate Bayesian linear regression on fixed features, plus the
regularized least-squares point estimate.

The model is ``y = Phi w + e`` with ``e ~ N(0, sigma^2)`` i.i.d. and an
isotropic zero-mean prior ``w ~ N(0, alpha^{-1} I)``. The posterior is
Gaussian with

    Sigma_* = (alpha I + Phi^T Phi / sigma^2)^{-1}
    m_*     = Sigma_* Phi^T Y / sigma^2

and the predictive latent variance at a feature vector phi is
``phi^T Sigma_* phi`` (observation noise is reported separately by callers).
Multiple output columns share the single posterior covariance; only the mean
gains columns. Ridge regression with ``ridge = alpha * sigma^2`` recovers the
posterior mean exactly.

All solves go through the Cholesky factor of the precision matrix; the dense
inverse needed for predictive variances is formed with the LAPACK ``potri``
routine on that factor. A diagonal ratio of the factor above 1e12 logs a
conditioning warning.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, get_lapack_funcs

__all__ = [
    "NoiseModel",
    "GaussianPosterior",
    "PredictiveGaussian",
    "IllConditionedError",
    "fit_least_squares",
    "fit_posterior",
    "predict",
    "predict_batch",
]

log = logging.getLogger(__name__)

# condition estimates above this log a warning (squared Cholesky diag ratio)
COND_WARN = 1e12


class IllConditionedError(np.linalg.LinAlgError):
    """Raised when the regression normal matrix is not numerically positive
    definite. Carries a condition estimate when one could be formed."""

    def __init__(self, message: str, condition_estimate: float = float("inf")):
        super().__init__(message)
        self.condition_estimate = float(condition_estimate)


@dataclass(frozen=True)
class NoiseModel:
    """Observation noise level and prior precision for the weights."""

    sigma: float
    alpha: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")

    @property
    def ridge_equivalent(self) -> float:
        """Ridge strength whose minimizer equals the posterior mean."""
        return self.alpha * self.sigma**2


@dataclass(frozen=True)
class GaussianPosterior:
    """Posterior over output weights: columns of ``mean`` are per-output
    means, ``covariance`` is shared across outputs."""

    mean: np.ndarray  # (K, n_out)
    covariance: np.ndarray  # (K, K)
    noise: NoiseModel

    @property
    def feature_count(self) -> int:
        return self.covariance.shape[0]

    @property
    def n_outputs(self) -> int:
        return self.mean.shape[1]


@dataclass(frozen=True)
class PredictiveGaussian:
    """Latent predictive moments at one query point: one mean entry per
    output column, one shared variance (observation noise excluded)."""

    mean: np.ndarray  # (n_out,)
    variance: float


def _as_feature_matrix(phi) -> np.ndarray:
    phi = np.asarray(phi, dtype=float)
    if phi.ndim != 2:
        raise ValueError(f"feature matrix must be 2-D (M, K), got shape {phi.shape}")
    return phi


def _as_targets(y, n_rows: int) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        y = y[:, None]
    if y.ndim != 2 or y.shape[0] != n_rows:
        raise ValueError(
            f"targets must be (M,) or (M, n_out) with M={n_rows}, got shape {y.shape}"
        )
    return y


def _cholesky_lower(a: np.ndarray, context: str) -> np.ndarray:
    potrf, = get_lapack_funcs(("potrf",), (a,))
    c, info = potrf(a, lower=1, overwrite_a=False)
    if info != 0:
        est = _spectral_condition(a)
        raise IllConditionedError(
            f"{context}: normal matrix is not positive definite "
            f"(condition estimate {est:.3e})", est)
    diag = np.abs(np.diag(c))
    est = float((diag.max() / diag.min()) ** 2)
    if est > COND_WARN:
        log.warning("%s: normal matrix nearly singular (condition estimate "
                    "%.3e); results may be dominated by round-off", context, est)
    return c


def _spectral_condition(a: np.ndarray) -> float:
    # failure path only: an exact spectral estimate is affordable here
    try:
        eig = np.linalg.eigvalsh(a)
    except np.linalg.LinAlgError:
        return float("inf")
    smallest = eig.min()
    if smallest <= 0:
        return float("inf")
    return float(eig.max() / smallest)


def _chol_inverse(c: np.ndarray) -> np.ndarray:
    """Full symmetric inverse from a lower Cholesky factor."""
    potri, = get_lapack_funcs(("potri",), (c,))
    inv, info = potri(c, lower=1, overwrite_c=False)
    if info != 0:
        raise IllConditionedError(f"inverse from Cholesky factor failed (info={info})")
    lower = np.tril(inv)
    return lower + np.tril(inv, -1).T


def fit_least_squares(phi, y, ridge: float = 0.0) -> np.ndarray:
    """Minimize ``||Phi w - Y||^2 + ridge ||w||^2``; returns weights (K, n_out).

    1-D targets are treated as a single output column. ``ridge = 0`` is the
    plain least-squares solution and raises ``IllConditionedError`` when the
    normal matrix is singular.
    """
    phi = _as_feature_matrix(phi)
    y = _as_targets(y, phi.shape[0])
    if ridge < 0:
        raise ValueError(f"ridge must be >= 0, got {ridge}")
    normal = phi.T @ phi
    normal[np.diag_indices(normal.shape[0])] += ridge
    c = _cholesky_lower(normal, "least squares")
    return cho_solve((c, True), phi.T @ y)


def fit_posterior(phi, y, noise: NoiseModel) -> GaussianPosterior:
    """Conjugate update of the isotropic Gaussian prior on output weights.

    With no rows (M = 0) the posterior equals the prior: zero mean,
    covariance ``alpha^{-1} I``.
    """
    phi = _as_feature_matrix(phi)
    y = _as_targets(y, phi.shape[0])
    precision = phi.T @ phi / noise.sigma**2
    precision[np.diag_indices(precision.shape[0])] += noise.alpha
    c = _cholesky_lower(precision, "posterior")
    covariance = _chol_inverse(c)
    mean = cho_solve((c, True), phi.T @ y) / noise.sigma**2
    return GaussianPosterior(mean=mean, covariance=covariance, noise=noise)


def predict(posterior: GaussianPosterior, phi_star) -> PredictiveGaussian:
    """Latent predictive distribution at a single feature vector."""
    phi_star = np.asarray(phi_star, dtype=float).ravel()
    if phi_star.shape[0] != posterior.feature_count:
        raise ValueError(
            f"feature length {phi_star.shape[0]} does not match posterior "
            f"{posterior.feature_count}")
    mean = phi_star @ posterior.mean
    variance = max(float(phi_star @ posterior.covariance @ phi_star), 0.0)
    return PredictiveGaussian(mean=mean, variance=variance)


def predict_batch(posterior: GaussianPosterior,
                  phi_star) -> tuple[np.ndarray, np.ndarray]:
    """Rowwise predictive moments: (M, n_out) means and an M-vector of latent
    variances, computed without forming any cross-covariance."""
    phi_star = _as_feature_matrix(phi_star)
    if phi_star.shape[1] != posterior.feature_count:
        raise ValueError(
            f"feature count {phi_star.shape[1]} does not match posterior "
            f"{posterior.feature_count}")
    mean = phi_star @ posterior.mean
    variance = np.einsum("ij,ij->i", phi_star @ posterior.covariance, phi_star)
    np.maximum(variance, 0.0, out=variance)
    return mean, variance
