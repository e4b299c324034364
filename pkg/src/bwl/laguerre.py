"""Rescaled Laguerre basis functions, their state-space realization, and
exact zero-order-hold filtering of sampled signals into feature trajectories.

The basis is ``l_n(t) = sqrt(2*lam) * exp(-lam*t) * L_n(2*lam*t)`` with
``L_n`` the classical Laguerre polynomials; it is orthonormal on [0, inf).
Differentiating the basis vector ``(l_0, ..., l_{p-1})`` gives a linear
autonomous system whose state matrix has ``-lam`` on the diagonal and
``-2*lam`` strictly below it, and whose impulse response components are
exactly the basis functions. The lower-triangular orientation follows the
(l_0, ..., l_{p-1}) state ordering; it is what the impulse-response
equivalence tests validate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm, solve_triangular

from .dynamics import TrajectoryData

__all__ = [
    "laguerre_polynomial",
    "rescaled_laguerre",
    "LaguerreConfig",
    "LaguerreStateMatrices",
    "DiscreteFilter",
    "LaguerreBank",
    "state_matrices",
    "discretize",
    "filter_signal",
]


def laguerre_polynomial(n: int, x) -> np.ndarray | float:
    """Evaluate the Laguerre polynomial L_n via the three-term recurrence

    ``(n+1) L_{n+1}(x) = (2n+1-x) L_n(x) - n L_{n-1}(x)``

    seeded with ``L_0 = 1`` and ``L_1(x) = 1 - x``. Accepts scalar or array x.
    """
    if n < 0:
        raise ValueError(f"polynomial degree must be nonnegative, got {n}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 - x
    for m in range(1, n):
        prev, cur = cur, ((2 * m + 1 - x) * cur - m * prev) / (m + 1)
    return cur if cur.ndim else float(cur)


def rescaled_laguerre(n: int, lam: float, t) -> np.ndarray | float:
    """Evaluate ``l_n(t) = sqrt(2*lam) * exp(-lam*t) * L_n(2*lam*t)``."""
    if not lam > 0:
        raise ValueError(f"forgetting factor must be positive, got {lam}")
    t = np.asarray(t, dtype=float)
    val = math.sqrt(2.0 * lam) * np.exp(-lam * t) * laguerre_polynomial(n, 2.0 * lam * t)
    return val if val.ndim else float(val)


@dataclass(frozen=True)
class LaguerreConfig:
    """Order (number of basis functions) and forgetting factor of one channel."""

    order: int
    lam: float

    def __post_init__(self):
        if not (isinstance(self.order, (int, np.integer)) and self.order >= 1):
            raise ValueError(f"order must be a positive integer, got {self.order}")
        if not self.lam > 0:
            raise ValueError(f"forgetting factor must be positive, got {self.lam}")


@dataclass(frozen=True)
class LaguerreStateMatrices:
    """Continuous-time realization (A, B) with impulse response e^{At} B
    whose m-th component equals the m-th rescaled Laguerre function."""

    a_matrix: np.ndarray
    b_vector: np.ndarray


def state_matrices(config: LaguerreConfig) -> LaguerreStateMatrices:
    """Build the lower-triangular realization of the Laguerre basis dynamics."""
    p, lam = config.order, config.lam
    a = np.zeros((p, p))
    a[np.tril_indices(p, k=-1)] = -2.0 * lam
    np.fill_diagonal(a, -lam)
    b = np.full(p, math.sqrt(2.0 * lam))
    return LaguerreStateMatrices(a_matrix=a, b_vector=b)


@dataclass(frozen=True)
class DiscreteFilter:
    """Exact zero-order-hold discretization: x[k+1] = phi x[k] + gamma u[k]."""

    phi_matrix: np.ndarray
    gamma_vector: np.ndarray
    dt: float


def discretize(mats: LaguerreStateMatrices, dt: float) -> DiscreteFilter:
    """Discretize ``x' = A x + B u`` exactly under a zero-order hold.

    ``phi = expm(A*dt)`` and ``gamma = A^{-1} (phi - I) B``; A is invertible
    because all its eigenvalues equal the (negative) forgetting factor.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    a, b = mats.a_matrix, mats.b_vector
    phi = expm(a * dt)
    gamma = solve_triangular(a, (phi - np.eye(a.shape[0])) @ b, lower=True)
    return DiscreteFilter(phi_matrix=phi, gamma_vector=gamma, dt=dt)


@dataclass(frozen=True)
class LaguerreBank:
    """One discretized Laguerre filter per input channel."""

    channels: tuple[tuple[LaguerreConfig, DiscreteFilter], ...]

    def __post_init__(self):
        if not self.channels:
            raise ValueError("bank needs at least one channel")
        dts = {filt.dt for _, filt in self.channels}
        if len(dts) != 1:
            raise ValueError(f"all channels must share one sample period, got {dts}")

    @classmethod
    def from_configs(cls, configs, dt: float) -> "LaguerreBank":
        chans = tuple(
            (cfg, discretize(state_matrices(cfg), dt)) for cfg in configs
        )
        return cls(channels=chans)

    @property
    def n_channels(self) -> int:
        return len(self.channels)

    @property
    def total_order(self) -> int:
        return sum(cfg.order for cfg, _ in self.channels)

    @property
    def dt(self) -> float:
        return self.channels[0][1].dt


def filter_signal(bank: LaguerreBank, u: TrajectoryData) -> np.ndarray:
    """Run every channel of ``u`` through its filter from the zero state.

    Returns an (n_samples, total_order) matrix whose row k concatenates the
    per-channel states after k hold steps; row 0 is all zeros, so row k
    depends on input samples 0..k-1 only.
    """
    if u.n_channels != bank.n_channels:
        raise ValueError(
            f"signal has {u.n_channels} channels, bank expects {bank.n_channels}"
        )
    if not math.isclose(u.dt, bank.dt, rel_tol=1e-12, abs_tol=0.0):
        raise ValueError(f"sample period mismatch: signal {u.dt}, bank {bank.dt}")
    n = u.n_samples
    blocks = []
    for ch, (cfg, filt) in enumerate(bank.channels):
        states = np.zeros((n, cfg.order))
        x = np.zeros(cfg.order)
        uu = u.channel(ch)
        phi, gamma = filt.phi_matrix, filt.gamma_vector
        for k in range(1, n):
            x = phi @ x + gamma * uu[k - 1]
            states[k] = x
        blocks.append(states)
    return np.concatenate(blocks, axis=1)
