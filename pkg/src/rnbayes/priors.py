"""Prior families for the drift ``mu`` and the variance ``sigma^2``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
from scipy.special import logsumexp

from . import _kernels
from .distributions import GIGParams, gig_logpdf
from .errors import ImproperPriorError, InvalidInputError


@dataclass(frozen=True)
class FlatPrior:
    """Improper uniform prior on the parameter's whole range."""

    def logpdf(self, x):
        return np.zeros_like(np.asarray(x, dtype=np.float64))

    def sample(self, gen, n):
        raise ImproperPriorError("cannot sample from a flat (improper) prior")


@dataclass(frozen=True)
class NormalPrior:
    mean: float
    variance: float

    def __post_init__(self):
        if not (self.variance > 0 and math.isfinite(self.variance)):
            raise InvalidInputError("normal prior variance must be finite and > 0")

    def logpdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        return -0.5 * (math.log(2 * math.pi * self.variance) + (x - self.mean) ** 2 / self.variance)

    def sample(self, gen, n):
        return self.mean + math.sqrt(self.variance) * _kernels.normal_fill(n, gen)


@dataclass(frozen=True)
class GIGPrior:
    params: GIGParams

    def logpdf(self, x):
        return gig_logpdf(np.asarray(x, dtype=np.float64), self.params)

    def sample(self, gen, n):
        p = self.params
        return _kernels.gig_fill(p.lam, p.delta, p.gamma, n, gen)


@dataclass(frozen=True)
class PointMass:
    """Degenerate prior: the parameter is known to equal ``value``."""

    value: float

    def logpdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.where(x == self.value, 0.0, -np.inf)

    def sample(self, gen, n):
        return np.full(n, float(self.value))


@dataclass(frozen=True)
class MixturePrior:
    """Finite mixture ``sum_i w_i prior_i`` of proper priors."""

    components: Tuple
    weights: Tuple[float, ...]

    def __post_init__(self):
        if len(self.components) != len(self.weights) or not self.components:
            raise InvalidInputError("mixture needs one weight per component")
        w = np.asarray(self.weights, dtype=np.float64)
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-12:
            raise InvalidInputError("mixture weights must be > 0 and sum to 1")
        if any(isinstance(c, (FlatPrior, PointMass)) for c in self.components):
            raise InvalidInputError("mixture components must be proper densities")
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "weights", tuple(float(v) for v in w))

    def logpdf(self, x):
        lps = [math.log(w) + c.logpdf(x) for w, c in zip(self.weights, self.components)]
        return logsumexp(np.stack(lps), axis=0)

    def sample(self, gen, n):
        labels = gen.choice(len(self.components), size=n, p=self.weights)
        out = np.empty(n)
        for i, comp in enumerate(self.components):
            idx = np.flatnonzero(labels == i)
            out[idx] = comp.sample(gen, idx.size)
        return out


MuPrior = Union[FlatPrior, NormalPrior, PointMass, MixturePrior]
Sigma2Prior = Union[FlatPrior, GIGPrior, PointMass, MixturePrior]


@dataclass(frozen=True)
class PriorSpec:
    mu: MuPrior = FlatPrior()
    sigma2: Sigma2Prior = FlatPrior()

    def __post_init__(self):
        if not isinstance(self.mu, (FlatPrior, NormalPrior, PointMass, MixturePrior)):
            raise InvalidInputError(f"unsupported mu prior {self.mu!r}")
        if not isinstance(self.sigma2, (FlatPrior, GIGPrior, PointMass, MixturePrior)):
            raise InvalidInputError(f"unsupported sigma2 prior {self.sigma2!r}")
        if isinstance(self.sigma2, PointMass) and not self.sigma2.value > 0:
            raise InvalidInputError("sigma2 point mass must be > 0")

    @property
    def is_proper(self) -> bool:
        return not (isinstance(self.mu, FlatPrior) or isinstance(self.sigma2, FlatPrior))


def parse_prior(text: str, param: str):
    """Parse ``flat``, ``normal:m:s2``, ``gig:lam:delta:gamma`` or ``point:v``."""
    parts = [s.strip() for s in str(text).split(":")]
    kind = parts[0].lower()
    try:
        nums = [float(v) for v in parts[1:]]
    except ValueError:
        raise InvalidInputError(f"bad prior specification {text!r}") from None
    if kind == "flat" and not nums:
        return FlatPrior()
    if kind == "point" and len(nums) == 1:
        return PointMass(nums[0])
    if kind == "normal" and len(nums) == 2 and param == "mu":
        return NormalPrior(*nums)
    if kind == "gig" and len(nums) == 3 and param == "sigma2":
        return GIGPrior(GIGParams(*nums))
    raise InvalidInputError(f"bad {param} prior specification {text!r}")


def format_prior(prior) -> str:
    """Inverse of :func:`parse_prior` (mixtures are not representable)."""
    if isinstance(prior, FlatPrior):
        return "flat"
    if isinstance(prior, PointMass):
        return f"point:{prior.value!r}"
    if isinstance(prior, NormalPrior):
        return f"normal:{prior.mean!r}:{prior.variance!r}"
    if isinstance(prior, GIGPrior):
        p = prior.params
        return f"gig:{p.lam!r}:{p.delta!r}:{p.gamma!r}"
    raise InvalidInputError(f"cannot format prior {prior!r}")
