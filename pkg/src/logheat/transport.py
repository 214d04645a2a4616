"""Heat-flow transport maps, their Lipschitz certification, and the
reverse-time diffusion sampler.

The flow map from the standard Gaussian to a 1D target is built by
integrating the velocity field v(t, x) = -(score of the OU marginal + x)
backward from a large horizon down to 0.  The horizon truncation is absorbed
by an exact affine pre-correction matching the OU marginal's mean and
standard deviation, and the short-time leg uses the substitution
tau = e^{2t} - 1 where the velocity varies fastest.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from . import measures as ms
from .errors import NumericalError, ValidationError
from .heatflow import marginal_stats_1d, ou_log_derivatives, wasserstein2_1d

__all__ = [
    "FlowMap",
    "ThetaEnvelope",
    "LipschitzEstimate",
    "PushforwardReport",
    "velocity_field",
    "build_flow_map",
    "empirical_lipschitz",
    "pushforward_validate",
    "theta_envelope",
    "reverse_sde_sample",
]


@dataclass(frozen=True)
class FlowMap:
    """Discretized transport map from gamma to a 1D target."""

    t_max: float
    t_min: float
    inputs: np.ndarray
    images: np.ndarray
    steps_per_unit: int
    trajectories: tuple[np.ndarray, np.ndarray] | None = None  # (times, states)

    def __call__(self, x):
        """Piecewise-linear interpolation with end-slope extrapolation."""
        x = np.asarray(x, dtype=float)
        y = np.interp(x, self.inputs, self.images)
        lo_slope = (self.images[1] - self.images[0]) / (self.inputs[1] - self.inputs[0])
        hi_slope = (self.images[-1] - self.images[-2]) / (
            self.inputs[-1] - self.inputs[-2]
        )
        y = np.where(x < self.inputs[0],
                     self.images[0] + lo_slope * (x - self.inputs[0]), y)
        y = np.where(x > self.inputs[-1],
                     self.images[-1] + hi_slope * (x - self.inputs[-1]), y)
        return y


@dataclass(frozen=True)
class ThetaEnvelope:
    """Per-time spatial extremes of the OU relative-density log-Hessian."""

    times: np.ndarray
    theta_min: np.ndarray
    theta_max: np.ndarray
    integral_theta_max: float


@dataclass(frozen=True)
class LipschitzEstimate:
    value: float
    location: float

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class PushforwardReport:
    ks_stat: float
    mean_error: float
    var_error: float


def velocity_field(measure, t: float, x) -> np.ndarray:
    """v(t, x) = -(score of the OU marginal at x + x)."""
    _, gradient, _ = ou_log_derivatives(measure, t, x)
    return -gradient


def _velocity_1d(measure, t: float, xs: np.ndarray) -> np.ndarray:
    _, sc, _ = marginal_stats_1d(measure, t, xs)
    return -(sc + xs)


def _rk4_vec(f, y: np.ndarray, s0: float, s1: float, n: int,
             record: bool = False):
    """RK4 for a vector state, s0 -> s1 in n steps; optional full history."""
    h = (s1 - s0) / n
    times = np.linspace(s0, s1, n + 1)
    hist = np.empty((n + 1, y.size)) if record else None
    if record:
        hist[0] = y
    for k in range(n):
        s = times[k]
        k1 = f(s, y)
        k2 = f(s + 0.5 * h, y + 0.5 * h * k1)
        k3 = f(s + 0.5 * h, y + 0.5 * h * k2)
        k4 = f(s + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            bad = int(np.argmax(~np.isfinite(y)))
            raise NumericalError(f"flow state blew up near t={times[k+1]} (point {bad})")
        if record:
            hist[k + 1] = y
    return (y, times, hist) if record else y


def build_flow_map(
    measure,
    n_points: int = 257,
    t_max: float | None = None,
    steps_per_unit: int = 400,
    t_min: float = 1e-4,
    t_split: float = 0.5,
    inputs: np.ndarray | None = None,
    keep_trajectories: bool = False,
) -> FlowMap:
    """Transport map from gamma to a 1D measure by backward flow integration.

    Starts at t_max from an affine image of the inputs that matches the OU
    marginal's mean and standard deviation exactly, integrates dy/dt = v(t, y)
    down to t_min (substituting tau = e^{2t} - 1 below t_split), and removes
    the final [0, t_min] leg by Richardson extrapolation from t_min and
    t_min / 2.
    """
    if getattr(measure, "dim", None) != 1:
        raise ValidationError("flow maps are built for 1D measures only")
    if inputs is None:
        u = (np.arange(n_points) + 1.0) / (n_points + 1.0)
        inputs = ndtri(u)
    else:
        inputs = np.asarray(inputs, dtype=float)
        if np.any(np.diff(inputs) <= 0):
            raise ValidationError("inputs must be strictly increasing")
    if t_max is None:
        w2 = wasserstein2_1d(measure, ms.standard_gaussian(1))
        t_max = max(3.0, math.log(max(w2, 1e-12) / 1e-4))
    if not 0 < t_min < t_split < t_max:
        raise ValidationError("need 0 < t_min < t_split < t_max")

    mean, var = ms.mean_variance_1d(measure)
    e2 = math.exp(-2.0 * t_max)
    m_T = mean * math.exp(-t_max)
    s_T = math.sqrt(var * e2 + 1.0 - e2)
    y = m_T + s_T * inputs

    vel = lambda t, x: _velocity_1d(measure, t, x)
    # leg A: t_max -> t_split, plain time variable
    nA = max(16, int(math.ceil(steps_per_unit * (t_max - t_split))))
    rec = _rk4_vec(vel, y, t_max, t_split, nA, record=keep_trajectories)
    if keep_trajectories:
        y, timesA, histA = rec
    else:
        y = rec

    # legs B/C: substituted variable tau = e^{2t} - 1, dy/dtau = v / (2(1+tau))
    def vel_tau(tau, x):
        t = 0.5 * math.log1p(tau)
        return vel(t, x) / (2.0 * (1.0 + tau))

    tau_split = math.expm1(2.0 * t_split)
    tau_min = math.expm1(2.0 * t_min)
    tau_half = math.expm1(t_min)  # tau at t_min / 2
    nB = max(16, int(math.ceil(steps_per_unit * (tau_split - tau_min))))
    y_tmin = _rk4_vec(vel_tau, y, tau_split, tau_min, nB)
    y_half = _rk4_vec(vel_tau, y_tmin, tau_min, tau_half, 16)
    images = 2.0 * y_half - y_tmin

    if np.any(np.diff(images) < -1e-10):
        k = int(np.argmin(np.diff(images)))
        raise NumericalError(
            f"flow map lost monotonicity between inputs {inputs[k]} and {inputs[k+1]}"
        )
    images = np.maximum.accumulate(images)
    traj = None
    if keep_trajectories:
        traj = (timesA, histA)
    return FlowMap(
        t_max=float(t_max),
        t_min=float(t_min),
        inputs=inputs,
        images=images,
        steps_per_unit=steps_per_unit,
        trajectories=traj,
    )


def empirical_lipschitz(flow: FlowMap) -> LipschitzEstimate:
    """Max slope |dT/dx| over adjacent input pairs, with its location."""
    if flow.inputs.size < 2:
        raise ValidationError("need at least 2 points")
    slopes = np.diff(flow.images) / np.diff(flow.inputs)
    k = int(np.argmax(np.abs(slopes)))
    loc = 0.5 * (flow.inputs[k] + flow.inputs[k + 1])
    return LipschitzEstimate(value=float(np.abs(slopes[k])), location=float(loc))


def pushforward_validate(
    flow: FlowMap, target, n_samples: int = 20000, seed: int = 0
) -> PushforwardReport:
    """Push Gaussian samples through the flow and compare with the target."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n_samples)
    y = np.sort(flow(x))
    cdf = ms.cdf_1d(target, y)
    n = n_samples
    ks = float(
        max(
            np.max(np.arange(1, n + 1) / n - cdf),
            np.max(cdf - np.arange(0, n) / n),
        )
    )
    mean, var = ms.mean_variance_1d(target)
    emp_mean = float(np.mean(y))
    emp_var = float(np.var(y))
    return PushforwardReport(
        ks_stat=ks,
        mean_error=abs(emp_mean - mean),
        var_error=abs(emp_var - var),
    )


def theta_envelope(
    measure,
    time_grid: np.ndarray | None = None,
    space_grid: np.ndarray | None = None,
    t_end: float = 6.0,
    n_times: int = 800,
) -> ThetaEnvelope:
    """Spatial extremes of the log-Hessian of Q_t(d mu/d gamma) over time.

    integral_theta_max integrates the per-time max: with a user time_grid, a
    plain trapezoid over the grid; otherwise a trapezoid in u = sqrt(t)
    (the max can grow like 1/sqrt(t) near 0), plus a short-time correction
    and an exp(-2t) tail estimate beyond the last time.
    """
    if space_grid is None:
        mean, var = ms.mean_variance_1d(measure)
        half = 8.0 * math.sqrt(max(var, 1.0)) + abs(mean) + 1.0
        space_grid = np.linspace(-half, half, 401)
    else:
        space_grid = np.asarray(space_grid, dtype=float)
    user_grid = time_grid is not None
    if user_grid:
        times = np.asarray(time_grid, dtype=float)
    else:
        u = np.linspace(math.sqrt(1e-6), math.sqrt(t_end), n_times)
        times = u * u

    th_min = np.empty(times.size)
    th_max = np.empty(times.size)
    for i, t in enumerate(times):
        _, _, hess = marginal_stats_1d(measure, float(t), space_grid)
        theta = hess + 1.0
        th_min[i] = float(np.min(theta))
        th_max[i] = float(np.max(theta))

    if user_grid:
        integral = float(np.trapezoid(th_max, times))
    else:
        integral = float(np.trapezoid(th_max * 2.0 * u, u))
        # head: theta_max ~ C / sqrt(t) at worst, so the [0, t0] piece is
        # at most 2 * theta_max(t0) * t0
        integral += 2.0 * max(th_max[0], 0.0) * times[0]
        # tail: theta decays like e^{-2t}, so the remainder is theta(T)/2
        integral += max(th_max[-1], 0.0) / 2.0
    return ThetaEnvelope(
        times=times, theta_min=th_min, theta_max=th_max,
        integral_theta_max=integral,
    )


def reverse_sde_sample(
    measure, n: int, steps: int, t1: float, seed: int = 0
) -> np.ndarray:
    """Euler-Maruyama simulation of the reverse diffusion over [0, t1].

    dY = (Y + 2 * score of the OU marginal at time t1 - t) dt + sqrt(2) dB,
    initialized exactly at the OU marginal of `measure` at time t1.  Returns
    samples of shape (n, dim), approximately distributed as `measure`.
    """
    if not (t1 > 0 and n >= 1 and steps >= 1):
        raise ValidationError("need t1 > 0, n >= 1, steps >= 1")
    rng = np.random.default_rng(seed)
    d = measure.dim
    x0 = ms.sample(measure, n, seed=seed + 1)
    xi = rng.standard_normal((n, d))
    y = math.exp(-t1) * x0 + math.sqrt(-math.expm1(-2.0 * t1)) * xi
    dt = t1 / steps
    sq = math.sqrt(2.0 * dt)
    for k in range(steps):
        s = t1 - k * dt  # remaining OU time; >= dt > 0
        if d == 1:
            _, sc, _ = marginal_stats_1d(measure, s, y[:, 0])
            drift = y[:, 0] + 2.0 * sc
            y = (y[:, 0] + dt * drift + sq * rng.standard_normal(n))[:, None]
        else:
            drift = np.empty_like(y)
            for i in range(n):
                _, grad, _ = ou_log_derivatives(measure, s, y[i])
                drift[i] = y[i] + 2.0 * (grad - y[i])
            y = y + dt * drift + sq * rng.standard_normal((n, d))
        if not np.all(np.isfinite(y)):
            raise NumericalError(f"reverse diffusion blew up at step {k + 1}")
    return y
