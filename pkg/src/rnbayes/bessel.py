"""Modified Bessel function of the second (third) kind, carried in log space.

``K_nu(x)`` for real order and ``x > 0``.  The order is reduced to
``mu = nu - round(nu)`` with ``|mu| <= 1/2``; ``K_mu`` and ``K_{mu+1}`` come
from Temme's series for ``x < 2`` and from Steed's continued fraction
otherwise, then upward recurrence (stable for K) is applied to the ratio
``K_{k+1}/K_k`` so nothing overflows for large orders or small arguments.
"""

from __future__ import annotations

import math

from .errors import DomainError

_EPS = 1e-16
_MAXIT = 10000
_EULER = 0.5772156649015329
# expansion of 1/Gamma(1+z) = 1 + c2 z + c3 z^2 + ...; odd powers below
_C4 = -0.0420026350340952
_C6 = -0.0421977345555443
_C8 = 0.0072189432466630


def _gamma_terms(mu: float):
    """Return (gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu)) for |mu| <= 1/2."""
    gampl = 1.0 / math.gamma(1.0 + mu)
    gammi = 1.0 / math.gamma(1.0 - mu)
    if abs(mu) < 1e-3:
        m2 = mu * mu
        gam1 = -(_EULER + m2 * (_C4 + m2 * (_C6 + m2 * _C8)))
    else:
        gam1 = (gammi - gampl) / (2.0 * mu)
    gam2 = 0.5 * (gammi + gampl)
    return gam1, gam2, gampl, gammi


def _temme(mu: float, x: float):
    """log K_mu(x) and K_{mu+1}/K_mu for x < 2 (Temme's series)."""
    x2 = 0.5 * x
    pimu = math.pi * mu
    fact = 1.0 if abs(pimu) < _EPS else pimu / math.sin(pimu)
    d = -math.log(x2)
    e = mu * d
    fact2 = 1.0 if abs(e) < _EPS else math.sinh(e) / e
    gam1, gam2, gampl, gammi = _gamma_terms(mu)
    ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
    total = ff
    e = math.exp(e)
    p = 0.5 * e / gampl
    q = 0.5 / (e * gammi)
    c = 1.0
    d = x2 * x2
    total1 = p
    mu2 = mu * mu
    for i in range(1, _MAXIT):
        ff = (i * ff + p + q) / (i * i - mu2)
        c *= d / i
        p /= i - mu
        q /= i + mu
        delta = c * ff
        total += delta
        total1 += c * (p - i * ff)
        if abs(delta) < abs(total) * _EPS:
            break
    return math.log(total), total1 * (2.0 / x) / total


def _steed(mu: float, x: float):
    """log K_mu(x) and K_{mu+1}/K_mu for x >= 2 (continued fraction CF2)."""
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25 - mu * mu
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _MAXIT):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    h = a1 * h
    log_k = 0.5 * math.log(math.pi / (2.0 * x)) - x - math.log(s)
    return log_k, (mu + x + 0.5 - h) / x


def log_bessel_k(nu: float, x: float) -> float:
    """``log K_nu(x)``; raises :class:`DomainError` unless ``x > 0``."""
    nu = float(nu)
    x = float(x)
    if not (x > 0) or math.isnan(x):
        raise DomainError(f"bessel_k requires x > 0, got {x}")
    if not math.isfinite(nu):
        raise DomainError("bessel_k requires a finite order")
    if math.isinf(x):
        return -math.inf
    nu = abs(nu)
    nl = int(nu + 0.5)
    mu = nu - nl
    log_k, ratio = _temme(mu, x) if x < 2.0 else _steed(mu, x)
    two_over_x = 2.0 / x
    for i in range(1, nl + 1):
        log_k += math.log(ratio)
        ratio = (mu + i) * two_over_x + 1.0 / ratio
    return log_k


def bessel_k(nu: float, x: float) -> float:
    """``K_nu(x)``; may overflow to ``inf`` or underflow to 0 where ``log_bessel_k`` does not."""
    return math.exp(log_bessel_k(nu, x))


def bessel_k_ratio(nu: float, x: float, shift: int = 1) -> float:
    """``K_{nu+shift}(x) / K_nu(x)`` computed from log values."""
    return math.exp(log_bessel_k(nu + shift, x) - log_bessel_k(nu, x))
