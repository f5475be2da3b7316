# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: GIG sampling and the two-block Gibbs chain.

Line-for-line twin of ``_pykernels.py``; uniforms are pulled straight from
the generator's ``bitgen_t.next_double`` so both backends see one stream.
"""

from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport cosh, exp, log, sinh, sqrt
from numpy.random cimport bitgen_t

import numpy as np

cdef double XMAX = 700.0

cdef int MU_FLAT = 0
cdef int MU_NORMAL = 1
cdef int S2_GIG = 0


cdef inline double _raw(bitgen_t* bg) noexcept nogil:
    return bg.next_double(bg.state)


cdef inline double _open_unit(bitgen_t* bg) noexcept nogil:
    return 1.0 - bg.next_double(bg.state)


cdef double _normal(bitgen_t* bg) noexcept nogil:
    cdef double u1, u2, s
    while True:
        u1 = 2.0 * _raw(bg) - 1.0
        u2 = 2.0 * _raw(bg) - 1.0
        s = u1 * u1 + u2 * u2
        if 0.0 < s < 1.0:
            return u1 * sqrt(-2.0 * log(s) / s)


cdef double _gamma(double a, bitgen_t* bg) noexcept nogil:
    cdef double g, d, c, x, v, u
    if a < 1.0:
        g = _gamma(a + 1.0, bg)
        return g * exp(log(_open_unit(bg)) / a)
    d = a - 1.0 / 3.0
    c = 1.0 / sqrt(9.0 * d)
    while True:
        while True:
            x = _normal(bg)
            v = 1.0 + c * x
            if v > 0.0:
                break
        v = v * v * v
        u = _open_unit(bg)
        if log(u) < 0.5 * x * x + d - d * v + d * log(v):
            return d * v


cdef inline double _psi(double x, double alpha, double lam) noexcept nogil:
    return -alpha * (cosh(x) - 1.0) - lam * (exp(x) - x - 1.0)


cdef inline double _dpsi(double x, double alpha, double lam) noexcept nogil:
    return -alpha * sinh(x) - lam * (exp(x) - 1.0)


cdef double _devroye(double lam, double omega, bitgen_t* bg) noexcept nogil:
    cdef double alpha, x, t, s, eta, zeta, theta, xi, p, r, td, sd, q, tot
    cdef double u, v, w, xx, log_g
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
        u = _raw(bg)
        v = _open_unit(bg)
        w = _open_unit(bg)
        if u < q / tot:
            xx = -sd + q * v
        elif u < (q + r) / tot:
            xx = td - r * log(v)
        else:
            xx = -sd + p * log(v)
        if xx > XMAX or xx < -XMAX:
            continue
        if xx > td:
            log_g = -eta - zeta * (xx - t)
        elif xx < -sd:
            log_g = -theta + xi * (xx + s)
        else:
            log_g = 0.0
        if log(w) + log_g <= _psi(xx, alpha, lam):
            return exp(xx) * ((lam + sqrt(lam * lam + omega * omega)) / omega)


cdef double _gig(double lam, double delta, double gamma, bitgen_t* bg) noexcept nogil:
    cdef double omega, y
    if delta == 0.0:
        return _gamma(lam, bg) * (2.0 / (gamma * gamma))
    if gamma == 0.0:
        return (0.5 * delta * delta) / _gamma(-lam, bg)
    omega = delta * gamma
    if lam < 0.0:
        y = 1.0 / _devroye(-lam, omega, bg)
    else:
        y = _devroye(lam, omega, bg)
    return y * (delta / gamma)


cdef bitgen_t* _bitgen(object gen) except NULL:
    capsule = gen.bit_generator.capsule
    return <bitgen_t*> PyCapsule_GetPointer(capsule, "BitGenerator")


def gig_fill(double lam, double delta, double gamma, Py_ssize_t n, gen):
    cdef bitgen_t* bg = _bitgen(gen)
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with gen.bit_generator.lock, nogil:
        for i in range(n):
            o[i] = _gig(lam, delta, gamma, bg)
    return out


def normal_fill(Py_ssize_t n, gen):
    cdef bitgen_t* bg = _bitgen(gen)
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with gen.bit_generator.lock, nogil:
        for i in range(n):
            o[i] = _normal(bg)
    return out


def gibbs_chain(double ln_ratio, double horizon, int mu_kind, double m, double s2,
                int s2_kind, double lam, double delta, double gamma,
                double mu0, double sig0, Py_ssize_t n_draws, Py_ssize_t burn_in,
                Py_ssize_t thin, gen):
    cdef bitgen_t* bg = _bitgen(gen)
    out_mu = np.empty(n_draws, dtype=np.float64)
    out_s2 = np.empty(n_draws, dtype=np.float64)
    cdef double[::1] om = out_mu
    cdef double[::1] os = out_s2
    cdef double u_bar = ln_ratio / horizon
    cdef double lam_post = lam - 0.5
    cdef double gam_post = sqrt(0.25 * horizon + gamma * gamma)
    cdef double delta2 = delta * delta
    cdef double mu = mu0
    cdef double sig = sig0
    cdef double ratio, denom, mean, dev, d2
    cdef Py_ssize_t total = burn_in + n_draws * thin
    cdef Py_ssize_t i, k = 0
    cdef Py_ssize_t err = 0
    with gen.bit_generator.lock, nogil:
        for i in range(total):
            if mu_kind == MU_FLAT:
                mu = u_bar + 0.5 * sig + sqrt(sig / horizon) * _normal(bg)
            elif mu_kind == MU_NORMAL:
                ratio = sig / s2
                denom = horizon + ratio
                mean = (m * ratio + ln_ratio + 0.5 * horizon * sig) / denom
                mu = mean + sqrt(sig / denom) * _normal(bg)
            if s2_kind == S2_GIG:
                dev = mu - u_bar
                d2 = horizon * dev * dev + delta2
                if d2 == 0.0 and lam_post <= 0.0:
                    err = i + 1
                    break
                sig = _gig(lam_post, sqrt(d2), gam_post, bg)
            if i >= burn_in and (i - burn_in) % thin == 0:
                om[k] = mu
                os[k] = sig
                k += 1
    if err:
        return out_mu[:k], out_s2[:k], err
    return out_mu, out_s2, 0
