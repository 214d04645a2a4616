"""Heat and Ornstein-Uhlenbeck semigroup quantities.

Tilted measures and their moments, log-Hessians of Gaussian convolutions via
the covariance representation, OU log-derivatives via the heat
reparametrization, and the 1D quadratic Wasserstein distance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import measures as ms
from .errors import CapabilityError, NumericalError, ValidationError
from .measures import (
    AtomicMeasure,
    CounterexampleMeasure,
    GaussianMixture,
    PerturbedLogConcave1D,
    _atom_data_1d,
    _logsumexp,
    _panel_moments,
)

__all__ = [
    "TiltedMoments",
    "tilted_moments",
    "tilted_log_mass",
    "log_hessian_heat",
    "ou_log_derivatives",
    "wasserstein2_1d",
    "lemma1_check",
]

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class TiltedMoments:
    """Moments of mu_{z,t} (mu reweighted by the Gaussian kernel N(z, t I)).

    ``mass_log`` is log((mu * gamma_t)(z)), the tilted mass against the
    normalized kernel.
    """

    mean: np.ndarray
    covariance: np.ndarray
    mass_log: float

    def __post_init__(self) -> None:
        cov = np.asarray(self.covariance, dtype=float)
        if np.max(np.abs(cov - cov.T)) > 1e-12 * (1.0 + np.max(np.abs(cov))):
            raise NumericalError("tilted covariance is not symmetric")
        if np.min(np.linalg.eigvalsh(cov)) < -1e-10:
            raise NumericalError("tilted covariance has a negative eigenvalue")


def _check_point(measure, z) -> np.ndarray:
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if z.size != measure.dim:
        raise ValidationError(f"point has size {z.size}, expected dim {measure.dim}")
    return z


def tilted_moments(measure, z, t: float) -> TiltedMoments:
    """Mean/covariance of mu_{z,t}; exact for mixtures and atoms, panel-exact
    for perturbed 1D densities."""
    if not t > 0:
        raise ValidationError("t must be positive")
    z = _check_point(measure, z)
    d = measure.dim

    if isinstance(measure, GaussianMixture):
        s = measure.variances
        st = s + t
        s_tilde = s * t / st
        m_tilde = (t * measure.means + s[:, None] * z[None, :]) / st[:, None]
        diff = z[None, :] - measure.means
        logc = (
            np.log(measure.weights)
            - 0.5 * d * (_LOG_2PI + np.log(st))
            - 0.5 * np.sum(diff * diff, axis=1) / st
        )
        mass_log = _logsumexp(logc)
        pi = np.exp(logc - mass_log)
        mean = pi @ m_tilde
        cov = np.eye(d) * float(np.dot(pi, s_tilde))
        cov += np.einsum("k,ki,kj->ij", pi, m_tilde, m_tilde)
        cov -= np.outer(mean, mean)
        return TiltedMoments(mean=mean, covariance=_sym(cov), mass_log=float(mass_log))

    if isinstance(measure, (AtomicMeasure, CounterexampleMeasure)):
        if isinstance(measure, AtomicMeasure):
            locs = measure.locations
            lw = measure.log_weights
        else:
            locs = measure.locations[:, None]
            lw = measure.log_weights
        with np.errstate(over="ignore"):
            l = lw + (locs @ z) / t - 0.5 * np.sum(locs * locs, axis=1) / t
            zz = float(z @ z)
        if not (np.all(np.isfinite(l)) and np.isfinite(zz)):
            raise NumericalError(
                "tilted atom weights are non-finite; recenter z before tilting"
            )
        lse = _logsumexp(l)
        pi = np.exp(l - lse)
        mean = pi @ locs
        centered = locs - mean[None, :]
        cov = np.einsum("k,ki,kj->ij", pi, centered, centered)
        mass_log = lse - 0.5 * d * (_LOG_2PI + math.log(t)) - zz / (2.0 * t)
        return TiltedMoments(mean=mean, covariance=_sym(cov), mass_log=float(mass_log))

    if isinstance(measure, PerturbedLogConcave1D):
        mass_log, mean, var = _perturbed_tilted_1d(measure, np.array([z[0]]), t)
        return TiltedMoments(
            mean=np.array([mean[0]]),
            covariance=np.array([[max(var[0], 0.0)]]),
            mass_log=float(mass_log[0]),
        )

    raise CapabilityError(f"no tilted moments for {type(measure).__name__}")


def _sym(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def _perturbed_tilted_1d(pm: PerturbedLogConcave1D, zs: np.ndarray, t: float):
    """Vectorized tilted (log-mass, mean, var) of a perturbed density against
    N(z, t); log-mass is log((mu * gamma_t)(z))."""
    zs = np.asarray(zs, dtype=float)
    C = pm.alpha + 1.0 / t
    B = zs[:, None] / t - pm.panel_b[None, :]
    A = -pm.panel_a[None, :] - (zs * zs)[:, None] / (2.0 * t)
    log_mass, mean, var = _panel_moments(C, B, A, pm.panel_edges)
    log_mass = log_mass - 0.5 * (_LOG_2PI + math.log(t)) - pm.log_normalizer
    return log_mass, mean, var


def tilted_log_mass(measure, z, t: float) -> float:
    """log((mu * gamma_t)(z)); density oracle for convolutions."""
    return tilted_moments(measure, z, t).mass_log


def log_hessian_heat(measure, z, t: float) -> np.ndarray:
    """-Hess log(mu * gamma_t)(z) via (1/t)(I - Cov(mu_{z,t})/t)."""
    z = _check_point(measure, z)
    tm = tilted_moments(measure, z, t)
    d = measure.dim
    out = (np.eye(d) - tm.covariance / t) / t
    if isinstance(measure, GaussianMixture):
        direct = -ms.log_hessian(ms.convolve_gaussian(measure, t), z)
        if np.max(np.abs(out - direct)) > 1e-8 * (1.0 + np.max(np.abs(direct))):
            raise NumericalError(
                "covariance representation disagrees with the analytic Hessian"
            )
    return _sym(out)


# ---------------------------------------------------------------------------
# Ornstein-Uhlenbeck semigroup
# ---------------------------------------------------------------------------

def _ou_parts(measure, t: float):
    """OU marginal at time t as (dilated base) * gamma_v with v = 1-e^{-2t}."""
    if not t > 0:
        raise ValidationError("t must be positive")
    c = math.exp(-t)
    v = -math.expm1(-2.0 * t)
    return ms.dilate(measure, c), v


def ou_log_derivatives(measure, t: float, x):
    """(value, gradient, hessian) of log Q_t(d mu / d gamma) at x.

    Computed through the OU marginal mu_t = (dilated mu) * gamma_{1-e^{-2t}}:
    value = log mu_t(x) - log gamma(x), and the derivatives add the Gaussian
    reference terms (+x to the score, +I to the Hessian).
    """
    x = _check_point(measure, x)
    base, v = _ou_parts(measure, t)
    d = measure.dim
    if isinstance(base, (GaussianMixture, AtomicMeasure)):
        marg = ms.convolve_gaussian(base, v)
        logpdf = ms.log_density(marg, x)
        sc = ms.score(marg, x)
        hess = ms.log_hessian(marg, x)
    else:
        tm = tilted_moments(base, x, v)
        logpdf = tm.mass_log
        sc = (tm.mean - x) / v
        hess = (tm.covariance / v - np.eye(d)) / v
    log_gamma = -0.5 * d * _LOG_2PI - 0.5 * float(x @ x)
    value = logpdf - log_gamma
    gradient = sc + x
    hessian = _sym(hess + np.eye(d))
    return float(value), gradient, hessian


def marginal_stats_1d(measure, t: float, xs: np.ndarray):
    """Vectorized (log-density, score, log-Hessian) of the OU marginal at xs.

    1D only; used by the transport module for flow integration.
    """
    xs = np.asarray(xs, dtype=float)
    base, v = _ou_parts(measure, t)
    if isinstance(base, GaussianMixture):
        marg = ms.convolve_gaussian(base, v)
        m = marg.means[:, 0]
        s = marg.variances
        lw = (
            np.log(marg.weights)[None, :]
            - 0.5 * (_LOG_2PI + np.log(s))[None, :]
            - 0.5 * (xs[:, None] - m[None, :]) ** 2 / s[None, :]
        )
        lse = _logsumexp(lw, axis=1)
        pi = np.exp(lw - lse[:, None])
        g = -(xs[:, None] - m[None, :]) / s[None, :]
        sc = np.sum(pi * g, axis=1)
        hess = np.sum(pi * (-1.0 / s[None, :] + g * g), axis=1) - sc * sc
        return lse, sc, hess
    if isinstance(base, AtomicMeasure):
        locs, lw0 = _atom_data_1d(base)
        lw = (
            lw0[None, :]
            - 0.5 * (_LOG_2PI + math.log(v))
            - 0.5 * (xs[:, None] - locs[None, :]) ** 2 / v
        )
        lse = _logsumexp(lw, axis=1)
        pi = np.exp(lw - lse[:, None])
        mean = np.sum(pi * locs[None, :], axis=1)
        var = np.sum(pi * (locs[None, :] - mean[:, None]) ** 2, axis=1)
        sc = (mean - xs) / v
        hess = (var / v - 1.0) / v
        return lse, sc, hess
    if isinstance(base, PerturbedLogConcave1D):
        log_mass, mean, var = _perturbed_tilted_1d(base, xs, v)
        sc = (mean - xs) / v
        hess = (var / v - 1.0) / v
        return log_mass, sc, hess
    raise CapabilityError(f"no OU marginal stats for {type(base).__name__}")


# ---------------------------------------------------------------------------
# 1D Wasserstein distance and the covariance comparison lemma
# ---------------------------------------------------------------------------

def _is_atomic_like(measure) -> bool:
    return isinstance(measure, (AtomicMeasure, CounterexampleMeasure))


def _sorted_atoms(measure):
    xs, lw = _atom_data_1d(measure)
    order = np.argsort(xs)
    w = np.exp(lw - _logsumexp(lw))
    return xs[order], w[order]


def wasserstein2_1d(mu, nu) -> float:
    """W_2 via the quantile coupling: sqrt(int_0^1 |F^-1 - G^-1|^2 du)."""
    for m in (mu, nu):
        if getattr(m, "dim", None) != 1:
            raise CapabilityError("wasserstein2_1d supports 1D measures only")
    if _is_atomic_like(mu) and _is_atomic_like(nu):
        x1, w1 = _sorted_atoms(mu)
        x2, w2 = _sorted_atoms(nu)
        cuts = np.unique(np.concatenate([np.cumsum(w1), np.cumsum(w2), [0.0, 1.0]]))
        cuts = np.clip(cuts, 0.0, 1.0)
        mids = 0.5 * (cuts[:-1] + cuts[1:])
        seg = np.diff(cuts)
        q1 = x1[np.minimum(np.searchsorted(np.cumsum(w1), mids), x1.size - 1)]
        q2 = x2[np.minimum(np.searchsorted(np.cumsum(w2), mids), x2.size - 1)]
        return float(np.sqrt(np.sum(seg * (q1 - q2) ** 2)))
    if (
        isinstance(mu, GaussianMixture)
        and isinstance(nu, GaussianMixture)
        and mu.weights.size == 1
        and nu.weights.size == 1
    ):
        dm = float(mu.means[0, 0] - nu.means[0, 0])
        ds = math.sqrt(float(mu.variances[0])) - math.sqrt(float(nu.variances[0]))
        return math.hypot(dm, ds)
    nodes, weights = np.polynomial.legendre.leggauss(512)
    u = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    q1 = ms.quantile_1d(mu, u)
    q2 = ms.quantile_1d(nu, u)
    return float(np.sqrt(np.sum(w * (q1 - q2) ** 2)))


def lemma1_check(mu, nu) -> tuple[float, float, float]:
    """Var(mu) <= (W2(mu, nu) + sqrt(Var(nu)))^2; returns (lhs, rhs, slack)."""
    _, var_mu = ms.mean_variance_1d(mu)
    _, var_nu = ms.mean_variance_1d(nu)
    w2 = wasserstein2_1d(mu, nu)
    rhs = (w2 + math.sqrt(max(var_nu, 0.0))) ** 2
    return var_mu, rhs, rhs - var_mu
