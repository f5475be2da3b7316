"""Generalized Inverse Gaussian distribution and the normal parameter record.

GIG(lam, delta, gamma) has density

    (gamma/delta)^lam / (2 K_lam(gamma delta)) x^(lam-1) exp(-(delta^2/x + gamma^2 x)/2)

on ``x > 0``.  Boundary triples are the Gamma limit (``delta = 0``, needs
``lam > 0``) and the inverse-Gamma limit (``gamma = 0``, needs ``lam < 0``);
density and sampling support them, Bessel-ratio moments do not.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .bessel import log_bessel_k
from .errors import DomainError, UnsupportedMomentError
from .rng import as_stream


@dataclass(frozen=True)
class GIGParams:
    lam: float
    delta: float
    gamma: float

    def __post_init__(self):
        lam, delta, gamma = float(self.lam), float(self.delta), float(self.gamma)
        if not all(math.isfinite(v) for v in (lam, delta, gamma)):
            raise DomainError("GIG parameters must be finite")
        if delta < 0 or gamma < 0:
            raise DomainError("GIG requires delta >= 0 and gamma >= 0")
        if delta == 0 and not (gamma > 0 and lam > 0):
            raise DomainError("GIG with delta = 0 requires gamma > 0 and lam > 0")
        if gamma == 0 and not (delta > 0 and lam < 0):
            raise DomainError("GIG with gamma = 0 requires delta > 0 and lam < 0")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "gamma", gamma)

    @property
    def omega(self) -> float:
        """Bessel argument ``gamma * delta``."""
        return self.gamma * self.delta

    @property
    def is_boundary(self) -> bool:
        return self.delta == 0 or self.gamma == 0


@dataclass(frozen=True)
class NormalParams:
    mean: float
    variance: float

    def __post_init__(self):
        if not (self.variance > 0 and math.isfinite(self.variance)):
            raise DomainError("normal variance must be finite and > 0")
        if not math.isfinite(self.mean):
            raise DomainError("normal mean must be finite")

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)


def _check(p) -> GIGParams:
    if not isinstance(p, GIGParams):
        raise DomainError(f"expected GIGParams, got {type(p).__name__}")
    return p


def gig_log_normalizer(p: GIGParams) -> float:
    """Log of the density's constant factor."""
    p = _check(p)
    lam, delta, gamma = p.lam, p.delta, p.gamma
    if delta == 0:
        return lam * math.log(0.5 * gamma * gamma) - math.lgamma(lam)
    if gamma == 0:
        return -lam * math.log(0.5 * delta * delta) - math.lgamma(-lam)
    return lam * (math.log(gamma) - math.log(delta)) - math.log(2.0) - log_bessel_k(lam, gamma * delta)


def gig_logpdf(x, p: GIGParams):
    """Log density; ``x`` may be a scalar or array (``-inf`` for ``x <= 0``)."""
    p = _check(p)
    xa = np.asarray(x, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        safe = np.where(xa > 0, xa, 1.0)
        out = (
            gig_log_normalizer(p)
            + (p.lam - 1.0) * np.log(safe)
            - 0.5 * (p.delta * p.delta / safe + p.gamma * p.gamma * safe)
        )
    out = np.where(xa > 0, out, -np.inf)
    return float(out) if out.ndim == 0 else out


def gig_density(x, p: GIGParams):
    """Density at ``x``; see :func:`gig_logpdf`."""
    if np.ndim(x) == 0 and not x > 0:
        raise DomainError("gig_density requires x > 0")
    lp = gig_logpdf(x, p)
    return math.exp(lp) if np.ndim(lp) == 0 else np.exp(lp)


def gig_sample(p: GIGParams, stream, size=None):
    """Draw from GIG(p) using Devroye's rejection sampler (any admissible triple).

    ``stream`` is a :class:`numpy.random.Generator` (or int seed).  Returns a
    float when ``size`` is None, otherwise an array of shape ``size``.
    """
    p = _check(p)
    gen = as_stream(stream)
    n = 1 if size is None else int(np.prod(size))
    draws = _kernels.gig_fill(p.lam, p.delta, p.gamma, n, gen)
    if size is None:
        return float(draws[0])
    return draws.reshape(size)


def gig_moments(p: GIGParams):
    """``(mean, variance)`` from Bessel ratios at argument ``gamma * delta``."""
    p = _check(p)
    if p.is_boundary:
        raise UnsupportedMomentError("Bessel-ratio moments need delta > 0 and gamma > 0")
    w = p.omega
    lk0 = log_bessel_k(p.lam, w)
    r1 = math.exp(log_bessel_k(p.lam + 1, w) - lk0)
    r2 = math.exp(log_bessel_k(p.lam + 2, w) - lk0)
    scale = p.delta / p.gamma
    return scale * r1, scale * scale * (r2 - r1 * r1)
