"""Marginal likelihoods, posterior model probabilities and model averaging.

The evidence of model ``M`` is the prior expectation of its likelihood
``dP/dQ|F_t``, estimated by plain Monte Carlo over prior draws.  Averages are
formed in log space (``log mean exp``) so long horizons do not overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

import numpy as np
from scipy.special import logsumexp

from .errors import ImproperPriorError, InvalidInputError, NumericError, UnsupportedModelError
from .likelihoods import GbmParams, JumpModelParams, log_likelihood_gbm_grid, log_likelihood_jump
from .paths import JumpDist, ReturnStat
from .priors import PriorSpec
from .rng import as_stream

MIN_MC = 100


@dataclass(frozen=True)
class GbmModel:
    priors: PriorSpec
    r: float


@dataclass(frozen=True)
class JumpDiffusionModel:
    """Jump-diffusion with fixed jump law; priors act on ``(mu, sigma^2)`` only."""

    priors: PriorSpec
    r: float
    jump_intensity: float
    jump_dist: JumpDist


@dataclass(frozen=True)
class ModelSpec:
    kind: Union[GbmModel, JumpDiffusionModel]
    prior_prob: float = 1.0
    name: str = ""

    def __post_init__(self):
        if not (0 < self.prior_prob <= 1):
            raise InvalidInputError("prior_prob must lie in (0, 1]")
        if not isinstance(self.kind, (GbmModel, JumpDiffusionModel)):
            raise UnsupportedModelError(f"unknown model kind {self.kind!r}")


class MarginalLikelihood(NamedTuple):
    estimate: float
    std_error: float
    log_estimate: float


@dataclass(frozen=True)
class ModelComparison:
    marginals: tuple
    posteriors: tuple
    mc_std_errors: tuple
    log_marginals: tuple


def _draw_prior(priors: PriorSpec, gen, n):
    if not priors.is_proper:
        raise ImproperPriorError("marginal likelihood needs proper priors; flat priors diverge")
    mu = priors.mu.sample(gen, n)
    s2 = priors.sigma2.sample(gen, n)
    return mu, s2


def _log_likelihoods(model, stat, mu, s2) -> np.ndarray:
    kind = model.kind
    if isinstance(kind, GbmModel):
        return log_likelihood_gbm_grid(stat, mu, s2, kind.r)
    out = np.empty(mu.size)
    for i in range(mu.size):
        p = JumpModelParams(GbmParams(float(mu[i]), float(s2[i]), kind.r), kind.jump_intensity, kind.jump_dist)
        out[i] = log_likelihood_jump(stat, p)
    return out


def marginal_likelihood(model: ModelSpec, stat: ReturnStat, n_mc: int, stream) -> MarginalLikelihood:
    """Prior Monte Carlo estimate of the evidence and its standard error.

    The linear-scale ``estimate`` and ``std_error`` overflow to ``inf`` once the
    log evidence passes ~709; comparisons should use ``log_estimate``.
    """
    if n_mc < MIN_MC:
        raise InvalidInputError(f"n_mc must be >= {MIN_MC}")
    gen = as_stream(stream)
    mu, s2 = _draw_prior(model.kind.priors, gen, n_mc)
    ll = _log_likelihoods(model, stat, mu, s2)
    if not np.all(np.isfinite(ll)):
        raise NumericError("non-finite log likelihood at a prior draw")
    top = float(ll.max())
    scaled = np.exp(ll - top)
    mean_scaled = float(scaled.mean())
    log_est = top + math.log(mean_scaled)
    sd_scaled = float(scaled.std(ddof=1))
    log_se = top + math.log(sd_scaled / math.sqrt(n_mc)) if sd_scaled > 0 else -math.inf
    return MarginalLikelihood(_exp(log_est), _exp(log_se), log_est)


def _exp(x: float) -> float:
    # evidence beyond the double range saturates to inf; log_estimate stays exact
    return math.exp(x) if x < 709.0 else math.inf


def model_posterior(marginals: Sequence[float], prior_probs: Sequence[float], log: bool = False) -> np.ndarray:
    """``P(M_i | S) = P(S|M_i) P(M_i) / sum_j P(S|M_j) P(M_j)``.

    With ``log=True`` the first argument holds log marginals.
    """
    pp = np.asarray(prior_probs, dtype=np.float64)
    lm = np.asarray(marginals, dtype=np.float64)
    if lm.shape != pp.shape or lm.ndim != 1 or lm.size == 0:
        raise InvalidInputError("need equal-length marginals and prior probabilities")
    if np.any(pp <= 0) or abs(pp.sum() - 1.0) > 1e-12:
        raise InvalidInputError("prior probabilities must be > 0 and sum to 1")
    if not log:
        if np.any(lm < 0):
            raise InvalidInputError("marginal likelihoods must be >= 0")
        with np.errstate(divide="ignore"):
            lm = np.log(lm)
    terms = lm + np.log(pp)
    total = logsumexp(terms)
    if not np.isfinite(total):
        raise NumericError("all evidence products are zero or non-finite")
    post = np.exp(terms - total)
    return post / post.sum()


def compare_models(models: Sequence[ModelSpec], stat: ReturnStat, n_mc: int, streams) -> ModelComparison:
    """Evidence and posterior probability for each model (one stream per model)."""
    if len(models) != len(streams):
        raise InvalidInputError("need one random stream per model")
    results = [marginal_likelihood(m, stat, n_mc, s) for m, s in zip(models, streams)]
    logs = np.array([r.log_estimate for r in results])
    post = model_posterior(logs, [m.prior_prob for m in models], log=True)
    return ModelComparison(
        tuple(r.estimate for r in results),
        tuple(float(p) for p in post),
        tuple(r.std_error for r in results),
        tuple(float(v) for v in logs),
    )
