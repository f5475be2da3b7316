"""Pure-Python kernels: GIG sampling and the two-block Gibbs chain.

This module is the reference twin of ``_ckernels.pyx``.  Both consume the
generator's ``next_double`` stream one value at a time and perform the same
floating-point operations in the same order, so for a given generator state
they return bit-identical draws.  Keep the two files in lockstep.
"""

from math import cosh, exp, log, sinh, sqrt

import numpy as np

MU_FLAT, MU_NORMAL, MU_POINT = 0, 1, 2
S2_GIG, S2_POINT = 0, 1

_BLOCK = 4096
_XMAX = 700.0


class _Uniforms:
    """Sequential reader over ``generator.random``; same values as ``next_double``."""

    __slots__ = ("_gen", "_buf", "_pos")

    def __init__(self, gen):
        self._gen = gen
        self._buf = []
        self._pos = 0

    def raw(self):
        if self._pos == len(self._buf):
            self._buf = self._gen.random(_BLOCK).tolist()
            self._pos = 0
        u = self._buf[self._pos]
        self._pos += 1
        return u


def _open_unit(src):
    # (0, 1]
    return 1.0 - src.raw()


def _normal(src):
    while True:
        u1 = 2.0 * src.raw() - 1.0
        u2 = 2.0 * src.raw() - 1.0
        s = u1 * u1 + u2 * u2
        if 0.0 < s < 1.0:
            return u1 * sqrt(-2.0 * log(s) / s)


def _gamma(a, src):
    """Gamma(a, 1) by Marsaglia-Tsang; shape < 1 via the U^(1/a) boost."""
    if a < 1.0:
        g = _gamma(a + 1.0, src)
        return g * exp(log(_open_unit(src)) / a)
    d = a - 1.0 / 3.0
    c = 1.0 / sqrt(9.0 * d)
    while True:
        while True:
            x = _normal(src)
            v = 1.0 + c * x
            if v > 0.0:
                break
        v = v * v * v
        u = _open_unit(src)
        if log(u) < 0.5 * x * x + d - d * v + d * log(v):
            return d * v


def _psi(x, alpha, lam):
    return -alpha * (cosh(x) - 1.0) - lam * (exp(x) - x - 1.0)


def _dpsi(x, alpha, lam):
    return -alpha * sinh(x) - lam * (exp(x) - 1.0)


def _devroye(lam, omega, src):
    """Standardised GIG, density ~ x^(lam-1) exp(-omega (x + 1/x) / 2), lam >= 0, omega > 0."""
    alpha = omega * omega / (sqrt(omega * omega + lam * lam) + lam)

    x = -_psi(1.0, alpha, lam)
    if 0.5 <= x <= 2.0:
        t = 1.0
    elif x > 2.0:
        t = sqrt(2.0 / (alpha + lam))
    else:
        t = log(4.0 / (alpha + 2.0 * lam))

    x = -_psi(-1.0, alpha, lam)
    if 0.5 <= x <= 2.0:
        s = 1.0
    elif x > 2.0:
        s = sqrt(4.0 / (alpha * cosh(1.0) + lam))
    elif alpha == 0.0:
        s = 1.0 / lam
    else:
        s = log(1.0 + 1.0 / alpha + sqrt(1.0 / (alpha * alpha) + 2.0 / alpha))
        if lam > 0.0 and 1.0 / lam < s:
            s = 1.0 / lam

    eta = -_psi(t, alpha, lam)
    zeta = -_dpsi(t, alpha, lam)
    theta = -_psi(-s, alpha, lam)
    xi = _dpsi(-s, alpha, lam)
    p = 1.0 / xi
    r = 1.0 / zeta
    td = t - r * eta
    sd = s - p * theta
    q = td + sd
    tot = p + q + r

    while True:
        u = src.raw()
        v = _open_unit(src)
        w = _open_unit(src)
        if u < q / tot:
            xx = -sd + q * v
        elif u < (q + r) / tot:
            xx = td - r * log(v)
        else:
            xx = -sd + p * log(v)
        if xx > _XMAX or xx < -_XMAX:
            continue
        if xx > td:
            log_g = -eta - zeta * (xx - t)
        elif xx < -sd:
            log_g = -theta + xi * (xx + s)
        else:
            log_g = 0.0
        if log(w) + log_g <= _psi(xx, alpha, lam):
            return exp(xx) * ((lam + sqrt(lam * lam + omega * omega)) / omega)


def _gig(lam, delta, gamma, src):
    """GIG(lam, delta, gamma): density ~ x^(lam-1) exp(-(delta^2/x + gamma^2 x)/2)."""
    if delta == 0.0:
        return _gamma(lam, src) * (2.0 / (gamma * gamma))
    if gamma == 0.0:
        return (0.5 * delta * delta) / _gamma(-lam, src)
    omega = delta * gamma
    if lam < 0.0:
        y = 1.0 / _devroye(-lam, omega, src)
    else:
        y = _devroye(lam, omega, src)
    return y * (delta / gamma)


def gig_fill(lam, delta, gamma, n, gen):
    src = _Uniforms(gen)
    return np.array([_gig(lam, delta, gamma, src) for _ in range(n)], dtype=np.float64)


def normal_fill(n, gen):
    src = _Uniforms(gen)
    return np.array([_normal(src) for _ in range(n)], dtype=np.float64)


def gibbs_chain(ln_ratio, horizon, mu_kind, m, s2, s2_kind, lam, delta, gamma,
                mu0, sig0, n_draws, burn_in, thin, gen):
    """Alternate mu | sigma2 (normal) and sigma2 | mu (GIG).

    ``s2_kind == S2_GIG`` uses prior GIG(lam, delta, gamma); a flat prior is
    passed as (1, 0, 0).  Returns ``(mu, sigma2, err)``; ``err`` is the
    1-based iteration of a degenerate GIG conditional, else 0.
    """
    src = _Uniforms(gen)
    out_mu = np.empty(n_draws)
    out_s2 = np.empty(n_draws)
    u_bar = ln_ratio / horizon
    lam_post = lam - 0.5
    gam_post = sqrt(0.25 * horizon + gamma * gamma)
    delta2 = delta * delta
    mu = mu0
    sig = sig0
    total = burn_in + n_draws * thin
    k = 0
    for i in range(total):
        if mu_kind == MU_FLAT:
            mu = u_bar + 0.5 * sig + sqrt(sig / horizon) * _normal(src)
        elif mu_kind == MU_NORMAL:
            ratio = sig / s2
            denom = horizon + ratio
            mean = (m * ratio + ln_ratio + 0.5 * horizon * sig) / denom
            mu = mean + sqrt(sig / denom) * _normal(src)
        if s2_kind == S2_GIG:
            dev = mu - u_bar
            d2 = horizon * dev * dev + delta2
            if d2 == 0.0 and lam_post <= 0.0:
                return out_mu[:k], out_s2[:k], i + 1
            sig = _gig(lam_post, sqrt(d2), gam_post, src)
        if i >= burn_in and (i - burn_in) % thin == 0:
            out_mu[k] = mu
            out_s2[k] = sig
            k += 1
    return out_mu, out_s2, 0
