"""Closed-form calls, posterior-integrated prices and model-averaged prices.

Under Q the GBM drift is ``r`` whatever the physical ``mu``, so the
posterior-integrated call price only depends on the ``sigma^2`` draws:
``C(t, S_t) = mean_i BS(S_t, K, tau, r, sigma2_i)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import ndtr

from .errors import InvalidInputError
from .inference import PosteriorDraws, effective_sample_size
from .paths import PricePath


@dataclass(frozen=True)
class OptionSpec:
    """European call with strike ``K`` expiring at absolute time ``maturity``."""

    strike: float
    maturity: float
    valuation_time: float = 0.0
    payoff_kind: str = "european_call"

    def __post_init__(self):
        if not (self.strike > 0 and math.isfinite(self.strike)):
            raise InvalidInputError("strike must be finite and > 0")
        if not (0 <= self.valuation_time < self.maturity):
            raise InvalidInputError("need 0 <= valuation_time < maturity")
        if self.payoff_kind != "european_call":
            raise InvalidInputError(f"unsupported payoff {self.payoff_kind!r}")

    @property
    def tau(self) -> float:
        return self.maturity - self.valuation_time


@dataclass(frozen=True)
class PriceEstimate:
    mean: float
    std_error: float
    n_draws: int

    def __post_init__(self):
        if not self.mean >= 0 or not self.std_error >= 0 or self.n_draws < 1:
            raise InvalidInputError("need mean >= 0, std_error >= 0, n_draws >= 1")


def bs_call(s, opt: OptionSpec, r: float, sigma2):
    """Risk-neutral call value; ``sigma2`` may be an array of variances."""
    tau = opt.tau
    if not tau > 0:
        raise InvalidInputError("option is at expiry; use the intrinsic value")
    s2 = np.asarray(sigma2, dtype=np.float64)
    if np.any(~(s2 > 0)):
        raise InvalidInputError("sigma2 must be > 0")
    vol = np.sqrt(s2 * tau)
    disc_k = opt.strike * math.exp(-r * tau)
    d1 = (math.log(s / opt.strike) + r * tau) / vol + 0.5 * vol
    d2 = d1 - vol
    price = s * ndtr(d1) - disc_k * ndtr(d2)
    price = np.maximum(price, 0.0)
    return float(price) if price.ndim == 0 else price


def price_posterior(path: PricePath, opt: OptionSpec, r: float, draws: PosteriorDraws) -> PriceEstimate:
    """Average the closed-form call over posterior ``sigma^2`` draws.

    The standard error uses the draws' effective sample size, so it stays
    honest for autocorrelated Gibbs output.
    """
    if len(draws) == 0:
        raise InvalidInputError("no posterior draws")
    if abs(opt.valuation_time - path.horizon) > 1e-9 * max(1.0, path.horizon):
        raise InvalidInputError(
            f"valuation_time {opt.valuation_time} must equal the path's last time {path.horizon}"
        )
    prices = bs_call(path.prices[-1], opt, r, draws.sigma2)
    prices = np.atleast_1d(prices)
    n = prices.size
    if n == 1 or np.all(prices == prices[0]):
        return PriceEstimate(float(prices.mean()), 0.0, n)
    se = math.sqrt(prices.var(ddof=1) / effective_sample_size(prices))
    return PriceEstimate(float(prices.mean()), se, n)


def price_model_averaged(prices: Sequence[PriceEstimate], model_posteriors: Sequence[float]) -> PriceEstimate:
    """Posterior-probability weighted price; component errors treated as independent."""
    w = np.asarray(model_posteriors, dtype=np.float64)
    if len(prices) != w.size or w.size == 0:
        raise InvalidInputError("need one weight per price estimate")
    if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-9:
        raise InvalidInputError("weights must be >= 0 and sum to 1")
    means = np.array([p.mean for p in prices])
    ses = np.array([p.std_error for p in prices])
    mean = float(np.clip(w @ means, means.min(), means.max()))
    se = float(math.sqrt(np.sum((w * ses) ** 2)))
    return PriceEstimate(mean, se, int(sum(p.n_draws for p in prices)))
