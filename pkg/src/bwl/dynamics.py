"""Synthetic signal generation: trajectory container, Fourier-series inputs,
the forced second-order benchmark system, the Van der Pol oscillator,
observation noise, and the tri-modal Gaussian target used by the feature
benchmark.

Both simulators use classical fourth-order Runge-Kutta. External forcing is
held constant over each step (zero-order hold on the sampled input), so each
step integrates a smooth autonomous system.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .rng import rng_from_seed

__all__ = [
    "TrajectoryData",
    "FourierInputSpec",
    "TrimodalSpec",
    "sample_phases",
    "fourier_input",
    "simulate_forced_second_order",
    "simulate_van_der_pol",
    "add_noise",
    "trimodal_gaussian",
    "sample_domain",
]


@dataclass(frozen=True)
class TrajectoryData:
    """Uniformly sampled multichannel signal.

    ``values`` has shape (n_samples, n_channels); sample ``k`` corresponds to
    time ``t0 + k * dt``.
    """

    t0: float
    dt: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise ValueError(f"values must be 1-D or 2-D, got shape {values.shape}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not np.all(np.isfinite(values)):
            raise ValueError("trajectory values must be finite")
        object.__setattr__(self, "values", values)

    @property
    def n_samples(self) -> int:
        return self.values.shape[0]

    @property
    def n_channels(self) -> int:
        return self.values.shape[1]

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_samples)

    def channel(self, i: int) -> np.ndarray:
        return self.values[:, i]

    def to_csv(self, path) -> None:
        """Write as ``time,ch0[,ch1,...]`` with full double precision."""
        with open(path, "w", newline="\n") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["time"] + [f"ch{i}" for i in range(self.n_channels)])
            for t, row in zip(self.times, self.values):
                writer.writerow([f"{t:.17g}"] + [f"{v:.17g}" for v in row])

    @classmethod
    def from_csv(cls, path) -> "TrajectoryData":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if not header or header[0] != "time":
                raise ValueError(f"{path}: expected a 'time' leading column")
            rows = [[float(x) for x in row] for row in reader]
        data = np.asarray(rows)
        if data.shape[0] < 2:
            raise ValueError(f"{path}: need at least two samples to infer dt")
        t = data[:, 0]
        dt = t[1] - t[0]
        return cls(t0=t[0], dt=dt, values=data[:, 1:])


# ---------------------------------------------------------------------------
# Input signals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FourierInputSpec:
    """Finite Fourier-series input: sum of `harmonics` scaled sines with
    fundamental frequency `omega0` and per-harmonic phases."""

    phases: np.ndarray
    harmonics: int = 5
    omega0: float = 1.0
    amplitude_scale: float = 1.0 / math.sqrt(5.0)

    def __post_init__(self):
        phases = np.asarray(self.phases, dtype=float).ravel()
        if self.harmonics < 1:
            raise ValueError("harmonics must be >= 1")
        if phases.shape != (self.harmonics,):
            raise ValueError(
                f"need {self.harmonics} phases, got shape {phases.shape}"
            )
        if not self.omega0 > 0:
            raise ValueError("omega0 must be positive")
        object.__setattr__(self, "phases", phases)


def sample_phases(harmonics: int, seed: int) -> np.ndarray:
    """Draw harmonic phases uniformly from [0, 2*pi)."""
    return rng_from_seed(seed).uniform(0.0, 2.0 * np.pi, size=harmonics)


def fourier_input(spec: FourierInputSpec, n_samples: int, dt: float,
                  t0: float = 0.0) -> TrajectoryData:
    """Sample ``u(t) = sum_k a * sin(k * omega0 * t + phi_k)`` on a uniform grid."""
    t = t0 + dt * np.arange(n_samples)
    k = np.arange(1, spec.harmonics + 1)
    args = np.outer(t, k * spec.omega0) + spec.phases
    u = spec.amplitude_scale * np.sin(args).sum(axis=1)
    return TrajectoryData(t0=t0, dt=dt, values=u)


# ---------------------------------------------------------------------------
# Simulators
# ---------------------------------------------------------------------------

def _rk4_step(f, state: np.ndarray, dt: float) -> np.ndarray:
    k1 = f(state)
    k2 = f(state + 0.5 * dt * k1)
    k3 = f(state + 0.5 * dt * k2)
    k4 = f(state + dt * k3)
    return state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def simulate_forced_second_order(u: TrajectoryData, damping: float = 0.8,
                                 stiffness: float = 4.0,
                                 gain: float = 1.2) -> TrajectoryData:
    """Integrate ``y'' + damping*y' + stiffness*y = gain*u`` from rest.

    The forcing is held at ``u[k]`` over step ``k`` (zero-order hold), so the
    position at sample ``k`` depends on input samples ``0..k-1``. Returns the
    position channel on the input grid.
    """
    if u.n_channels != 1:
        raise ValueError(f"forcing must be single-channel, got {u.n_channels}")
    uu = u.channel(0)
    n = u.n_samples
    out = np.zeros(n)
    state = np.zeros(2)  # (position, velocity)
    for k in range(n - 1):
        uk = uu[k]

        def f(s, uk=uk):
            return np.array([s[1], gain * uk - damping * s[1] - stiffness * s[0]])

        state = _rk4_step(f, state, u.dt)
        out[k + 1] = state[0]
    return TrajectoryData(t0=u.t0, dt=u.dt, values=out)


def simulate_van_der_pol(mu: float, x0, n_samples: int, dt: float,
                         t0: float = 0.0) -> TrajectoryData:
    """RK4 trajectory of the Van der Pol oscillator, two channels (x, v)."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    state = np.asarray(x0, dtype=float)
    if state.shape != (2,):
        raise ValueError(f"x0 must be a 2-vector, got shape {state.shape}")

    def f(s):
        x, v = s
        return np.array([v, mu * (1.0 - x * x) * v - x])

    out = np.zeros((n_samples, 2))
    out[0] = state
    for k in range(1, n_samples):
        state = _rk4_step(f, state, dt)
        out[k] = state
    return TrajectoryData(t0=t0, dt=dt, values=out)


def add_noise(traj: TrajectoryData, std: float, seed: int) -> TrajectoryData:
    """Add i.i.d. Gaussian noise elementwise; deterministic per seed."""
    if std < 0:
        raise ValueError("noise std must be nonnegative")
    noise = rng_from_seed(seed).normal(0.0, std, size=traj.values.shape)
    return TrajectoryData(t0=traj.t0, dt=traj.dt, values=traj.values + noise)


# ---------------------------------------------------------------------------
# Tri-modal Gaussian target
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrimodalSpec:
    """Sum of three isotropic Gaussian densities on [-half_width, half_width]^dim,
    centered at -offset*1, +offset*1 and the origin."""

    dim: int
    covariance_scale: float = 20.0
    offset: float = 15.0
    half_width: float = 30.0

    def __post_init__(self):
        if not 1 <= self.dim <= 5:
            raise ValueError(f"dim must be in 1..5, got {self.dim}")
        if not self.covariance_scale > 0:
            raise ValueError("covariance_scale must be positive")

    @property
    def centers(self) -> np.ndarray:
        ones = np.ones(self.dim)
        return np.stack([-self.offset * ones, self.offset * ones, 0.0 * ones])


def trimodal_gaussian(spec: TrimodalSpec, x) -> np.ndarray | float:
    """Evaluate the tri-modal density at one point (d,) or a batch (M, d)."""
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    if single:
        pts = pts[None, :]
    if pts.shape[1] != spec.dim:
        raise ValueError(f"expected dimension {spec.dim}, got {pts.shape[1]}")
    s = spec.covariance_scale
    norm = (2.0 * np.pi * s) ** (-spec.dim / 2.0)
    total = np.zeros(pts.shape[0])
    for c in spec.centers:
        sq = np.sum((pts - c) ** 2, axis=1)
        total += norm * np.exp(-0.5 * sq / s)
    return float(total[0]) if single else total


def sample_domain(spec: TrimodalSpec, n_points: int, seed: int) -> np.ndarray:
    """Draw points uniformly from the mixture's box domain."""
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    rng = rng_from_seed(seed)
    return rng.uniform(-spec.half_width, spec.half_width, size=(n_points, spec.dim))
