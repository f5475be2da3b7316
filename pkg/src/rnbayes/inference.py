"""Conditional posteriors, the two-block Gibbs sampler and posterior diagnostics.

With ``u = log(S_t/S_0)/t`` the full conditionals are

* ``mu | sigma^2``: flat prior gives ``N(u + sigma^2/2, sigma^2/t)``; a
  ``N(m, s^2)`` prior gives
  ``N((m sigma^2/s^2 + log(S_t/S_0) + t sigma^2/2)/(t + sigma^2/s^2), sigma^2/(t + sigma^2/s^2))``.
* ``sigma^2 | mu``: flat prior gives ``GIG(1/2, sqrt(t)|mu - u|, sqrt(t)/2)``; a
  ``GIG(lam, delta, gamma)`` prior gives
  ``GIG(lam - 1/2, sqrt(t (mu - u)^2 + delta^2), sqrt(t/4 + gamma^2))``.

A flat prior on both parameters is formally allowed but the joint posterior
is then improper in ``sigma^2``; use a proper ``sigma^2`` prior (or a point
mass) when the chain's ``sigma^2`` marginal matters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Sequence

import numpy as np

from . import _kernels
from .distributions import GIGParams, NormalParams, gig_moments
from .errors import BoundaryCaseError, GibbsRunError, InvalidInputError, NumericError, UnsupportedModelError
from .paths import PricePath, ReturnStat, log_return, realized_variance
from .priors import FlatPrior, GIGPrior, NormalPrior, PointMass, PriorSpec
from .rng import make_stream

DEFAULT_BURN_IN = 1000


def conditional_mu(stat: ReturnStat, sigma2: float, r: float, prior) -> NormalParams:
    """Normal full conditional of the drift given ``sigma2``.

    ``r`` does not enter the GBM conditional; it is accepted so every
    conditional shares the same call shape.
    """
    if not sigma2 > 0:
        raise InvalidInputError("sigma2 must be > 0")
    t = stat.horizon
    if isinstance(prior, FlatPrior):
        return NormalParams(stat.ln_ratio / t + sigma2 / 2.0, sigma2 / t)
    if isinstance(prior, NormalPrior):
        ratio = sigma2 / prior.variance
        denom = t + ratio
        mean = (prior.mean * ratio + stat.ln_ratio + t * sigma2 / 2.0) / denom
        return NormalParams(mean, sigma2 / denom)
    raise UnsupportedModelError(f"no conjugate mu conditional for {prior!r}")


def conditional_sigma2(stat: ReturnStat, mu: float, prior) -> GIGParams:
    """GIG full conditional of the variance given ``mu``."""
    t = stat.horizon
    dev = mu - stat.ln_ratio / t
    if isinstance(prior, FlatPrior):
        lam, delta2, gamma2 = 0.5, t * dev * dev, t / 4.0
    elif isinstance(prior, GIGPrior):
        p = prior.params
        lam = p.lam - 0.5
        delta2 = t * dev * dev + p.delta * p.delta
        gamma2 = t / 4.0 + p.gamma * p.gamma
    else:
        raise UnsupportedModelError(f"no conjugate sigma2 conditional for {prior!r}")
    if delta2 == 0.0 and lam <= 0.0:
        raise BoundaryCaseError(f"conditional GIG({lam}, 0, {math.sqrt(gamma2)}) is not a distribution")
    return GIGParams(lam, math.sqrt(delta2), math.sqrt(gamma2))


def drift_posterior_given_brownian(w_t: float, t: float, sigma2: float, r: float) -> NormalParams:
    """Flat-prior drift posterior written in terms of the driving Brownian value:
    ``N(r - sigma W_t / t, sigma^2 / t)``."""
    if not (t > 0 and sigma2 > 0):
        raise InvalidInputError("t and sigma2 must be > 0")
    return NormalParams(r - math.sqrt(sigma2) * w_t / t, sigma2 / t)


@dataclass(frozen=True)
class GibbsConfig:
    n_draws: int = 5000
    burn_in: int = DEFAULT_BURN_IN
    thin: int = 1
    seed: int = 0
    init_mu: float = 0.0
    init_sigma2: float = 0.04
    stream_id: int = 0

    def __post_init__(self):
        if self.n_draws < 1 or self.thin < 1 or self.burn_in < 0:
            raise InvalidInputError("need n_draws >= 1, thin >= 1, burn_in >= 0")
        if not self.init_sigma2 > 0:
            raise InvalidInputError("init_sigma2 must be > 0")
        if self.seed < 0:
            raise InvalidInputError("seed must be >= 0")


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PosteriorDraws:
    mu: np.ndarray
    sigma2: np.ndarray
    config: GibbsConfig = field(default_factory=GibbsConfig)

    def __post_init__(self):
        mu, s2 = _readonly(self.mu), _readonly(self.sigma2)
        if mu.shape != s2.shape or mu.ndim != 1:
            raise InvalidInputError("mu and sigma2 draws must be equal-length 1-d arrays")
        if np.any(~(s2 > 0)):
            raise InvalidInputError("sigma2 draws must be > 0")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma2", s2)

    def __len__(self):
        return self.mu.size

    def __eq__(self, other):
        if not isinstance(other, PosteriorDraws):
            return NotImplemented
        return (
            self.config == other.config
            and np.array_equal(self.mu, other.mu)
            and np.array_equal(self.sigma2, other.sigma2)
        )


def gibbs_run(stat: ReturnStat, r: float, priors: PriorSpec, cfg: GibbsConfig) -> PosteriorDraws:
    """Two-block Gibbs sampler: each sweep draws ``mu | sigma2`` then ``sigma2 | mu``.

    A :class:`PointMass` prior freezes that block at its value.  Draws are
    deterministic given ``(cfg.seed, cfg.stream_id)``.
    """
    mu_p, s2_p = priors.mu, priors.sigma2
    m = s2 = 1.0
    if isinstance(mu_p, FlatPrior):
        mu_kind = _kernels.MU_FLAT
    elif isinstance(mu_p, NormalPrior):
        mu_kind, m, s2 = _kernels.MU_NORMAL, mu_p.mean, mu_p.variance
    elif isinstance(mu_p, PointMass):
        mu_kind = _kernels.MU_POINT
    else:
        raise UnsupportedModelError(f"Gibbs sampler has no conditional for mu prior {mu_p!r}")

    init_mu, init_s2 = cfg.init_mu, cfg.init_sigma2
    if isinstance(mu_p, PointMass):
        init_mu = mu_p.value
    if isinstance(s2_p, FlatPrior):
        s2_kind, lam, delta, gamma = _kernels.S2_GIG, 1.0, 0.0, 0.0
    elif isinstance(s2_p, GIGPrior):
        g = s2_p.params
        s2_kind, lam, delta, gamma = _kernels.S2_GIG, g.lam, g.delta, g.gamma
    elif isinstance(s2_p, PointMass):
        s2_kind, lam, delta, gamma = _kernels.S2_POINT, 1.0, 0.0, 0.0
        init_s2 = s2_p.value
    else:
        raise UnsupportedModelError(f"Gibbs sampler has no conditional for sigma2 prior {s2_p!r}")

    gen = make_stream(cfg.seed, cfg.stream_id)
    mu, sig, err = _kernels.gibbs_chain(
        stat.ln_ratio, stat.horizon, mu_kind, m, s2, s2_kind, lam, delta, gamma,
        init_mu, init_s2, cfg.n_draws, cfg.burn_in, cfg.thin, gen,
    )
    if err:
        raise GibbsRunError("sigma2 conditional is GIG with delta = 0 and lambda <= 0", err)
    return PosteriorDraws(mu, sig, cfg)


def effective_sample_size(x: Sequence[float]) -> float:
    """ESS by Geyer's initial positive sequence of paired autocorrelations."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    if n == 0:
        raise InvalidInputError("ESS of an empty sample")
    xc = x - x.mean()
    if n < 4 or not np.any(xc):
        return float(n)
    nfft = 1 << (2 * n - 1).bit_length()
    f = np.fft.rfft(xc, nfft)
    acov = np.fft.irfft(f * np.conj(f), nfft)[:n]
    rho = acov / acov[0]
    tau = -1.0
    for k in range(0, n - 1, 2):
        pair = rho[k] + rho[k + 1]
        if pair <= 0:
            break
        tau += 2.0 * pair
    return float(n / tau)


class ParameterSummary(NamedTuple):
    mean: float
    variance: float
    interval: tuple
    ess: float
    mcse: float


def summarize(x: Sequence[float], level: float = 0.90) -> ParameterSummary:
    """Mean, sample variance, central interval from order statistics, ESS and MC error."""
    x = np.asarray(x, dtype=np.float64)
    if x.size == 0:
        raise InvalidInputError("cannot summarise an empty sample")
    tail = (1.0 - level) / 2.0
    lo, hi = np.quantile(x, [tail, 1.0 - tail], method="inverted_cdf")
    var = float(x.var(ddof=1)) if x.size > 1 else 0.0
    ess = effective_sample_size(x)
    return ParameterSummary(float(x.mean()), var, (float(lo), float(hi)), ess, math.sqrt(var / ess))


def posterior_summary(draws: PosteriorDraws) -> Dict[str, ParameterSummary]:
    if len(draws) == 0:
        raise InvalidInputError("no posterior draws")
    return {"mu": summarize(draws.mu), "sigma2": summarize(draws.sigma2)}


class ConsistencyRow(NamedTuple):
    t: float
    var_mu: float
    var_sigma2: float
    sigma2: float
    mu: float


def _mu_variance(prior, sigma2, t):
    if isinstance(prior, FlatPrior):
        return sigma2 / t
    if isinstance(prior, NormalPrior):
        return sigma2 / (t + sigma2 / prior.variance)
    if isinstance(prior, PointMass):
        return 0.0
    raise UnsupportedModelError(f"no conjugate mu conditional for {prior!r}")


def _sigma2_variance(stat, mu, prior):
    if isinstance(prior, PointMass):
        return 0.0
    g = conditional_sigma2(stat, mu, prior)
    if g.delta == 0.0:
        # Gamma(lam, rate gamma^2/2) limit
        return 4.0 * g.lam / g.gamma**4
    return gig_moments(g)[1]


def consistency_diagnostic(
    path: PricePath,
    r: float,
    priors: PriorSpec,
    checkpoints: Sequence[float],
    sigma2: Optional[float] = None,
    mu: Optional[float] = None,
) -> List[ConsistencyRow]:
    """Conditional posterior variances of ``mu`` and ``sigma^2`` at growing horizons.

    At each checkpoint (a grid time of ``path``) the data are the path up to
    that time.  The conditioning values are ``sigma2`` (default: realised
    variance of the truncated path) and ``mu`` (default: the conditional mean
    of ``mu`` given that ``sigma2``).  ``r`` is recorded for symmetry with
    the other diagnostics; GBM conditionals do not depend on it.
    """
    cps = np.asarray(checkpoints, dtype=np.float64)
    if cps.ndim != 1 or cps.size == 0 or np.any(np.diff(cps) <= 0):
        raise InvalidInputError("checkpoints must be a nonempty increasing sequence")
    if cps[0] <= 0 or cps[-1] > path.horizon * (1 + 1e-12):
        raise InvalidInputError("checkpoints must lie in (0, path horizon]")
    rows = []
    for t in cps:
        sub = path.truncate(float(t))
        stat = log_return(sub)
        s2 = realized_variance(sub) if sigma2 is None else float(sigma2)
        if isinstance(priors.mu, PointMass):
            m = priors.mu.value
        elif mu is None:
            m = conditional_mu(stat, s2, r, priors.mu).mean
        else:
            m = float(mu)
        rows.append(ConsistencyRow(
            stat.horizon, _mu_variance(priors.mu, s2, stat.horizon),
            _sigma2_variance(stat, m, priors.sigma2), s2, m,
        ))
    return rows


def _trapezoid_weights(grid: np.ndarray) -> np.ndarray:
    d = np.diff(grid)
    w = np.zeros_like(grid)
    w[:-1] += d / 2.0
    w[1:] += d / 2.0
    return w


def _known_sigma2(prior_a, prior_b, sigma2):
    if sigma2 is not None:
        return float(sigma2)
    sa, sb = prior_a.sigma2, prior_b.sigma2
    if isinstance(sa, PointMass) and isinstance(sb, PointMass) and sa.value == sb.value:
        return sa.value
    raise InvalidInputError("merging diagnostic needs a known sigma2 (argument or shared point mass)")


def merging_diagnostic(
    returns: Sequence[float],
    r: float,
    prior_a: PriorSpec,
    prior_b: PriorSpec,
    grid: Sequence[float],
    sigma2: Optional[float] = None,
    interval: float = 1.0,
) -> np.ndarray:
    """L1 distance between two grid posteriors of ``mu`` after ``n = 1..N`` returns.

    Each posterior is prior times the discrete Wald likelihood of the first
    ``n`` observed log returns, normalised by the trapezoid rule on ``grid``.
    Element ``n - 1`` of the result is the distance after ``n`` returns.
    """
    grid = np.asarray(grid, dtype=np.float64)
    x = np.asarray(returns, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise InvalidInputError("grid must be a 1-d increasing array")
    if x.ndim != 1 or x.size == 0:
        raise InvalidInputError("need at least one return")
    if not interval > 0:
        raise InvalidInputError("interval must be > 0")
    s2 = _known_sigma2(prior_a, prior_b, sigma2)
    weights = _trapezoid_weights(grid)

    nu = grid - 0.5 * s2
    a = (r - nu) / s2
    n = np.arange(1, x.size + 1, dtype=np.float64)[:, None]
    cum = np.cumsum(x)[:, None]
    # prefix log Z_n^{-1} on the grid: -a sum_k (x_k - nu dt) + n a^2 s2 dt / 2
    loglik = -a * (cum - n * nu * interval) + n * a * a * s2 * interval / 2.0

    def posterior(prior):
        lp = np.asarray(prior.mu.logpdf(grid), dtype=np.float64)
        if not np.all(np.isfinite(lp)):
            raise InvalidInputError("priors must be positive on the whole grid")
        logpost = loglik + lp
        logpost -= logpost.max(axis=1, keepdims=True)
        dens = np.exp(logpost)
        mass = dens @ weights
        if not np.all(np.isfinite(mass)) or np.any(mass <= 0):
            raise NumericError("grid posterior has no mass; refine or widen the grid")
        return dens / mass[:, None]

    pa = posterior(prior_a)
    pb = posterior(prior_b)
    return np.abs(pa - pb) @ weights
