"""Likelihoods implied by the change of measure from P to the risk-neutral Q.

For GBM the likelihood of the path observed up to ``t`` is
``dP/dQ|F_t = 1/Z_t`` with Girsanov density ``Z_t = exp(a W_t - a^2 t/2)``,
``a = (r - mu)/sigma``.  Substituting ``sigma W_t = log(S_t/S_0) - t nu``
with ``nu = mu - sigma^2/2`` gives

    log dP/dQ = t/(2 sigma^2) * [(r - m)^2 - (mu - m)^2],   m = log(S_t/S_0)/t + sigma^2/2,

so as a function of ``mu`` it is a normal kernel with mode ``m`` and
variance ``sigma^2/t``.

For the jump-diffusion the Esscher parameter ``theta*`` solves
``k(theta + 1) - k(theta) = r - nu`` with cumulant
``k(theta) = theta^2 sigma^2/2 + lambda * sum_i p_i (exp(theta x_i) - 1)``.

Every likelihood is available as ``log_*``; the plain versions exponentiate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import InvalidInputError, NumericError
from .paths import JumpDist, ReturnStat

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GbmParams:
    mu: float
    sigma2: float
    r: float

    def __post_init__(self):
        if not (self.sigma2 > 0 and math.isfinite(self.sigma2)):
            raise InvalidInputError("sigma2 must be finite and > 0")
        if not (math.isfinite(self.mu) and math.isfinite(self.r)):
            raise InvalidInputError("mu and r must be finite")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    @property
    def nu(self) -> float:
        """Log-price drift ``mu - sigma^2/2``."""
        return self.mu - 0.5 * self.sigma2

    @property
    def market_price_of_risk(self) -> float:
        """Girsanov tilt ``(r - mu)/sigma``."""
        return (self.r - self.mu) / self.sigma


@dataclass(frozen=True)
class JumpModelParams:
    gbm: GbmParams
    jump_intensity: float
    jump_dist: JumpDist

    def __post_init__(self):
        if not (self.jump_intensity >= 0 and math.isfinite(self.jump_intensity)):
            raise InvalidInputError("jump_intensity must be finite and >= 0")
        if not isinstance(self.jump_dist, JumpDist):
            raise InvalidInputError("jump_dist must be a JumpDist")


def log_rn_density_gbm(w_t: float, t: float, p: GbmParams) -> float:
    """``log Z_t = W_t (r-mu)/sigma - (t/2) ((r-mu)/sigma)^2`` (dQ/dP)."""
    if not t > 0:
        raise InvalidInputError("t must be > 0")
    a = p.market_price_of_risk
    return w_t * a - 0.5 * t * a * a


def rn_density_gbm(w_t: float, t: float, p: GbmParams) -> float:
    return math.exp(log_rn_density_gbm(w_t, t, p))


def log_likelihood_gbm(stat: ReturnStat, p: GbmParams) -> float:
    """``log dP/dQ|F_t``; depends on the path only through ``stat``."""
    t = stat.horizon
    mode = stat.ln_ratio / t + 0.5 * p.sigma2
    dr = p.r - mode
    dm = p.mu - mode
    return t / (2.0 * p.sigma2) * (dr * dr - dm * dm)


def likelihood_gbm(stat: ReturnStat, p: GbmParams) -> float:
    return math.exp(log_likelihood_gbm(stat, p))


def log_likelihood_gbm_grid(stat: ReturnStat, mu, sigma2, r: float):
    """Vectorised :func:`log_likelihood_gbm` over broadcastable ``mu``, ``sigma2`` arrays."""
    mu = np.asarray(mu, dtype=np.float64)
    sigma2 = np.asarray(sigma2, dtype=np.float64)
    t = stat.horizon
    mode = stat.ln_ratio / t + 0.5 * sigma2
    dr = r - mode
    dm = mu - mode
    return t / (2.0 * sigma2) * (dr * dr - dm * dm)


def log_return_density_gbm(stat: ReturnStat, mu, sigma2):
    """Lebesgue log density of ``log(S_t/S_0)/t ~ N(mu - sigma^2/2, sigma^2/t)``.

    This is the joint likelihood in ``(mu, sigma^2)`` whose full conditionals
    are the normal and GIG laws used by the Gibbs sampler.  Relative to
    :func:`log_likelihood_gbm` it differs only by the ``mu``-free term
    ``log_return_density_gbm(stat, r, sigma2)``.  Broadcasts over arrays.
    """
    mu = np.asarray(mu, dtype=np.float64)
    sigma2 = np.asarray(sigma2, dtype=np.float64)
    t = stat.horizon
    resid = stat.ln_ratio / t - (mu - 0.5 * sigma2)
    out = 0.5 * (math.log(t) - _LOG_2PI - np.log(sigma2)) - t * resid * resid / (2.0 * sigma2)
    return float(out) if out.ndim == 0 else out


def wald_increments(log_returns: Sequence[float], p: GbmParams, interval: float = 1.0) -> np.ndarray:
    """Centred increments ``R_k = log(S_k/S_{k-1}) - nu * interval`` of observed log returns."""
    if not interval > 0:
        raise InvalidInputError("interval must be > 0")
    return np.asarray(log_returns, dtype=np.float64) - p.nu * interval


def _wald_tilt(p: GbmParams) -> float:
    return (p.r - p.nu) / p.sigma2


def log_likelihood_discrete(returns: Sequence[float], p: GbmParams, interval: float = 1.0) -> float:
    """``log Z_n^{-1} = -a sum R_k + n a^2 sigma^2 interval / 2`` with ``a = (r - nu)/sigma^2``.

    ``returns`` are the Wald increments ``R_k`` (see :func:`wald_increments`
    to build them from observed log returns).  An empty sequence gives 0.
    """
    if not interval > 0:
        raise InvalidInputError("interval must be > 0")
    rk = np.asarray(returns, dtype=np.float64)
    if rk.size == 0:
        return 0.0
    a = _wald_tilt(p)
    return float(-a * rk.sum() + rk.size * a * a * p.sigma2 * interval / 2.0)


def likelihood_discrete(returns: Sequence[float], p: GbmParams, interval: float = 1.0) -> float:
    return math.exp(log_likelihood_discrete(returns, p, interval))


def cumulant_k(theta: float, p: JumpModelParams) -> float:
    """Cumulant of ``sigma W_1 + Y_1``: ``theta^2 sigma^2/2 + lambda sum p_i (e^{theta x_i} - 1)``."""
    jd = p.jump_dist
    jump = p.jump_intensity * float(np.dot(jd.probs, np.expm1(theta * jd.support)))
    return 0.5 * theta * theta * p.gbm.sigma2 + jump


def _martingale_gap(theta: float, p: JumpModelParams) -> float:
    # k(theta+1) - k(theta) - (r - nu), written without the cancelling theta^2 terms
    jd = p.jump_dist
    jump = p.jump_intensity * float(np.dot(jd.probs, np.exp(theta * jd.support) * np.expm1(jd.support)))
    return p.gbm.sigma2 * (theta + 0.5) + jump - (p.gbm.r - p.gbm.nu)


def esscher_theta(p: JumpModelParams, tol: float = 1e-12) -> float:
    """Esscher parameter making the discounted price a martingale.

    The gap ``k(theta+1) - k(theta) - (r - nu)`` is strictly increasing, so
    the root is unique: expand a bracket, solve with Brent's method, then
    polish with Newton steps until ``|gap| <= tol``.
    """
    f = lambda th: _martingale_gap(th, p)  # noqa: E731
    lo, hi = -1.0, 1.0
    while f(lo) > 0:
        lo *= 2.0
        if lo < -1e6:
            raise NumericError("could not bracket the Esscher root below -1e6")
    while f(hi) < 0:
        hi *= 2.0
        if hi > 1e6:
            raise NumericError("could not bracket the Esscher root above 1e6")
    theta = brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=500)
    jd = p.jump_dist
    for _ in range(5):
        gap = f(theta)
        if abs(gap) <= tol:
            break
        slope = p.gbm.sigma2 + p.jump_intensity * float(
            np.dot(jd.probs, jd.support * np.exp(theta * jd.support) * np.expm1(jd.support))
        )
        theta -= gap / slope
    if not abs(f(theta)) <= tol:
        raise NumericError(f"Esscher root residual {abs(f(theta)):.3e} exceeds {tol:.1e}")
    return theta


def log_likelihood_jump(stat: ReturnStat, p: JumpModelParams) -> float:
    """``-theta* (log(S_t/S_0) - t nu) + t k(theta*)``."""
    theta = esscher_theta(p)
    t = stat.horizon
    return -theta * (stat.ln_ratio - t * p.gbm.nu) + t * cumulant_k(theta, p)


def likelihood_jump(stat: ReturnStat, p: JumpModelParams) -> float:
    return math.exp(log_likelihood_jump(stat, p))
