"""Price paths under the physical measure, CSV ingestion and sufficient statistics.

Simulation uses the exact law of the log price (Gaussian increments plus a
compound-Poisson sum of log jumps), so there is no discretisation bias.  Jump
sizes are given in log space, ``eta = ln(1 + xi)``; a price-space jump ``xi``
maps to ``eta = log1p(xi)`` and positivity of ``1 + xi`` is automatic.

Random streams: the Brownian part of path batch ``stream_id`` is drawn from
``make_stream(seed, stream_id, 0)`` and the jump part from
``make_stream(seed, stream_id, 1)``.  A jump-diffusion with zero intensity
(or only zero-size jumps) therefore reproduces the GBM path for the same seed.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import IO, Sequence, Union

import numpy as np

from .errors import DataError, InvalidInputError
from .rng import make_stream

_BROWNIAN = 0
_JUMPS = 1


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PricePath:
    """Strictly positive prices on an increasing time grid starting at 0."""

    times: np.ndarray
    prices: np.ndarray

    def __post_init__(self):
        times = _frozen(self.times)
        prices = _frozen(self.prices)
        if times.ndim != 1 or prices.ndim != 1:
            raise InvalidInputError("times and prices must be one-dimensional")
        if times.size != prices.size or times.size < 2:
            raise InvalidInputError("times and prices need equal length >= 2")
        if times[0] != 0.0:
            raise InvalidInputError("first time must be 0")
        if not np.all(np.isfinite(times)) or np.any(np.diff(times) <= 0):
            raise InvalidInputError("times must be finite and strictly increasing")
        if not np.all(np.isfinite(prices)) or np.any(prices <= 0):
            raise InvalidInputError("prices must be finite and > 0")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "prices", prices)

    @property
    def s0(self) -> float:
        return float(self.prices[0])

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def __len__(self):
        return self.times.size

    def __eq__(self, other):
        if not isinstance(other, PricePath):
            return NotImplemented
        return np.array_equal(self.times, other.times) and np.array_equal(
            self.prices, other.prices
        )

    def truncate(self, t: float, atol: float = 1e-9) -> "PricePath":
        """Sub-path observed up to grid time ``t`` (must lie on the grid)."""
        idx = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[idx] - t) > atol or idx == 0:
            raise InvalidInputError(f"time {t} is not a positive grid time of the path")
        return PricePath(self.times[: idx + 1], self.prices[: idx + 1])


@dataclass(frozen=True)
class ReturnStat:
    """``ln_ratio = log(S_t / S_0)`` over ``horizon = t`` years."""

    ln_ratio: float
    horizon: float

    def __post_init__(self):
        if not math.isfinite(self.ln_ratio):
            raise InvalidInputError("ln_ratio must be finite")
        if not (self.horizon > 0 and math.isfinite(self.horizon)):
            raise InvalidInputError("horizon must be finite and > 0")

    @property
    def mean_log_return(self) -> float:
        """Annualised log return ``ln_ratio / horizon``."""
        return self.ln_ratio / self.horizon


@dataclass(frozen=True, eq=False)
class JumpDist:
    """Finite law of log jump sizes: ``support[i]`` with probability ``probs[i]``."""

    support: np.ndarray
    probs: np.ndarray

    def __post_init__(self):
        support = _frozen(self.support)
        probs = _frozen(self.probs)
        if support.ndim != 1 or support.shape != probs.shape or support.size == 0:
            raise InvalidInputError("support and probs must be equal-length 1-d arrays")
        if not np.all(np.isfinite(support)):
            raise InvalidInputError("jump support must be finite")
        if np.any(probs <= 0) or abs(probs.sum() - 1.0) > 1e-12:
            raise InvalidInputError("jump probabilities must be > 0 and sum to 1")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_price_jumps(cls, xi: Sequence[float], probs: Sequence[float]) -> "JumpDist":
        """Build from relative price jumps ``xi > -1``."""
        xi = np.asarray(xi, dtype=np.float64)
        if np.any(xi <= -1):
            raise InvalidInputError("price jumps must satisfy 1 + xi > 0")
        return cls(np.log1p(xi), probs)

    def __eq__(self, other):
        if not isinstance(other, JumpDist):
            return NotImplemented
        return np.array_equal(self.support, other.support) and np.array_equal(
            self.probs, other.probs
        )


def _check_grid(s0, sigma, t_grid) -> np.ndarray:
    if not (s0 > 0 and math.isfinite(s0)):
        raise InvalidInputError("s0 must be finite and > 0")
    if not (sigma >= 0 and math.isfinite(sigma)):
        raise InvalidInputError("sigma must be finite and >= 0")
    grid = np.asarray(t_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size < 2 or grid[0] != 0.0:
        raise InvalidInputError("t_grid must be 1-d, start at 0 and have length >= 2")
    if not np.all(np.isfinite(grid)) or np.any(np.diff(grid) <= 0):
        raise InvalidInputError("t_grid must be strictly increasing")
    return grid


def _brownian_log_paths(mu, sigma, grid, n_paths, seed, stream_id) -> np.ndarray:
    """Log price ``(mu - sigma^2/2) t + sigma W_t`` on ``grid``, shape (n_paths, len)."""
    dt = np.diff(grid)
    z = make_stream(seed, stream_id, _BROWNIAN).standard_normal((n_paths, dt.size))
    w = np.zeros((n_paths, grid.size))
    np.cumsum(z * np.sqrt(dt), axis=1, out=w[:, 1:])
    return (mu - 0.5 * sigma * sigma) * grid + sigma * w


def simulate_gbm_paths(s0, mu, sigma, t_grid, seed, n_paths=1, stream_id=0) -> np.ndarray:
    """Exact GBM prices, array of shape ``(n_paths, len(t_grid))``."""
    grid = _check_grid(s0, sigma, t_grid)
    if n_paths < 1:
        raise InvalidInputError("n_paths must be >= 1")
    return s0 * np.exp(_brownian_log_paths(mu, sigma, grid, n_paths, seed, stream_id))


def simulate_gbm(s0, mu, sigma, t_grid, seed, stream_id=0) -> PricePath:
    """One exact GBM path ``S_t = s0 exp((mu - sigma^2/2) t + sigma W_t)``."""
    grid = _check_grid(s0, sigma, t_grid)
    prices = simulate_gbm_paths(s0, mu, sigma, grid, seed, 1, stream_id)[0]
    prices[0] = s0
    return PricePath(grid, prices)


def simulate_jump_diffusion_paths(
    s0, mu, sigma, jump_intensity, jump_dist, t_grid, seed, n_paths=1, stream_id=0,
    return_counts=False,
):
    """Exact jump-diffusion prices, shape ``(n_paths, len(t_grid))``.

    With ``return_counts`` also returns the cumulative jump counts ``N(t)`` on
    the grid (same shape, integer).
    """
    grid = _check_grid(s0, sigma, t_grid)
    if not (jump_intensity >= 0 and math.isfinite(jump_intensity)):
        raise InvalidInputError("jump_intensity must be finite and >= 0")
    if not isinstance(jump_dist, JumpDist):
        raise InvalidInputError("jump_dist must be a JumpDist")
    if n_paths < 1:
        raise InvalidInputError("n_paths must be >= 1")
    log_s = _brownian_log_paths(mu, sigma, grid, n_paths, seed, stream_id)

    rng = make_stream(seed, stream_id, _JUMPS)
    dt = np.diff(grid)
    counts = rng.poisson(jump_intensity * dt, size=(n_paths, dt.size))
    # per-step sum of eta over N_step jumps: multinomial split across atoms
    per_atom = rng.multinomial(counts.ravel(), jump_dist.probs)
    jumps = (per_atom @ jump_dist.support).reshape(counts.shape)
    y = np.zeros_like(log_s)
    np.cumsum(jumps, axis=1, out=y[:, 1:])
    prices = s0 * np.exp(log_s + y)
    prices[:, 0] = s0
    if return_counts:
        n_t = np.zeros(log_s.shape, dtype=np.int64)
        np.cumsum(counts, axis=1, out=n_t[:, 1:])
        return prices, n_t
    return prices


def simulate_jump_diffusion(
    s0, mu, sigma, jump_intensity, jump_dist, t_grid, seed, stream_id=0
) -> PricePath:
    """One exact path of ``S_t = s0 exp(t(mu - sigma^2/2) + sigma W_t + Y_t)``."""
    prices = simulate_jump_diffusion_paths(
        s0, mu, sigma, jump_intensity, jump_dist, t_grid, seed, 1, stream_id
    )[0]
    return PricePath(np.asarray(t_grid, dtype=np.float64), prices)


Source = Union[bytes, str, IO[bytes], IO[str]]


def _read_text(source: Source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8-sig")
    if isinstance(source, str):
        return source
    data = source.read()
    return data.decode("utf-8-sig") if isinstance(data, bytes) else data


def load_price_series(source: Source) -> PricePath:
    """Parse a ``t,price`` CSV (header required) into a :class:`PricePath`.

    Times are rebased so the first observation is at 0.  Numbers are parsed
    with :func:`float`, which is locale independent (dot decimal separator).
    Raises :class:`DataError` naming the 1-based data row on bad input.
    """
    text = _read_text(source)
    if not text.strip():
        raise DataError("empty price file")
    rows = [r for r in csv.reader(io.StringIO(text, newline="")) if any(c.strip() for c in r)]
    header = [c.strip().lower() for c in rows[0]]
    if header != ["t", "price"]:
        raise DataError(f"expected header 't,price', got {','.join(rows[0])!r}")
    if len(rows) < 3:
        raise DataError("need at least two observations")
    times, prices = [], []
    for i, row in enumerate(rows[1:], start=1):
        if len(row) != 2:
            raise DataError(f"expected 2 columns, got {len(row)}", row=i)
        try:
            t, p = float(row[0]), float(row[1])
        except ValueError:
            raise DataError(f"non-numeric value in {row!r}", row=i) from None
        if not (math.isfinite(t) and math.isfinite(p)):
            raise DataError("non-finite value", row=i)
        if p <= 0:
            raise DataError(f"price must be > 0, got {row[1].strip()}", row=i)
        if times and t <= times[-1]:
            raise DataError("times must be strictly increasing", row=i)
        times.append(t)
        prices.append(p)
    t0 = times[0]
    return PricePath(np.array(times) - t0, np.array(prices))


def dump_price_series(path: PricePath) -> str:
    """Serialise to the CSV format read by :func:`load_price_series`.

    Values are written with ``repr`` so the round trip is exact.
    """
    lines = ["t,price"]
    lines.extend(f"{t!r},{p!r}" for t, p in zip(path.times.tolist(), path.prices.tolist()))
    return "\n".join(lines) + "\n"


def log_return(path: PricePath) -> ReturnStat:
    """Single-interval sufficient statistic ``(log(S_t/S_0), t)``."""
    return ReturnStat(math.log(path.prices[-1] / path.s0), path.horizon)


def interval_returns(path: PricePath, rtol: float = 1e-9):
    """Log returns over the path's (equal) sampling intervals.

    Returns ``(returns, interval)``.  This is the i.i.d. multi-interval view
    of the data; the grid must be uniform to relative tolerance ``rtol``.
    """
    dt = np.diff(path.times)
    interval = float(dt.mean())
    if np.any(np.abs(dt - interval) > rtol * interval):
        raise InvalidInputError("path grid is not uniform; interval returns undefined")
    return np.diff(np.log(path.prices)), interval


def realized_variance(path: PricePath) -> float:
    """Annualised realised variance ``sum(dlog S)^2 / t``."""
    return float(np.sum(np.diff(np.log(path.prices)) ** 2) / path.horizon)
