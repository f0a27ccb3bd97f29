"""Monte Carlo estimates of ``P(sup_{[0,1]} |X_t| <= eps)``.

Jumps larger than ``delta`` are simulated exactly as a marked Poisson
process (inverse CDF for power laws, thinning when tempered).  Jumps below
``delta`` are replaced by a variance-matched Brownian motion
(``gaussian_substitute``) or dropped (``drift_only``); in both cases the
drift is the truncated drift ``b_delta``.  Between consecutive grid points
and jump instants the continuous part is a Brownian bridge, whose maximum
and minimum are sampled exactly, so the supremum is not biased by the grid.

Every path draws from its own generator seeded from the master seed, which
makes estimates reproducible and independent of the thread count.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional, Sequence

import numba
import numpy as np
from numba import njit, prange
from scipy import special as sps

from .calculus import abs_moment, truncated_drift
from .model import Atom, LevyTriplet, NumericDensity, TemperedPowerLaw
from .special import power_exp_integral

THREADS_ENV = "LEVY_SMALLBALL_THREADS"

# prefer OpenMP or the built-in queue; old TBB builds only emit warnings
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

# component kinds in the packed parameter table
_POWER, _TEMPERED, _ATOM = 0, 1, 2


@dataclass(frozen=True)
class SimulationConfig:
    """Monte Carlo settings.

    ``delta`` defaults to ``eps / 10`` at estimation time.  ``bridge``
    switches exact Brownian-bridge monitoring of the continuous part on
    (default) or off (plain grid monitoring).
    """

    n_paths: int = 100_000
    grid_n: int = 1024
    delta: Optional[float] = None
    small_jump_mode: str = "gaussian_substitute"
    seed: int = 12345
    bridge: bool = True

    def __post_init__(self):
        if self.n_paths < 100:
            raise ValueError("n_paths must be >= 100")
        if self.grid_n < 16:
            raise ValueError("grid_n must be >= 16")
        if self.small_jump_mode not in ("gaussian_substitute", "drift_only"):
            raise ValueError("small_jump_mode must be gaussian_substitute or drift_only")
        if self.delta is not None and not self.delta > 0.0:
            raise ValueError("delta must be > 0")

    def resolved(self, eps: float) -> "SimulationConfig":
        return self if self.delta is not None else replace(self, delta=eps / 10.0)


@dataclass(frozen=True)
class SmallBallEstimate:
    """Fraction of simulated paths staying in ``[-eps, eps]``."""

    eps: float
    p_hat: float
    stderr: float
    n_paths: int
    delta: float
    small_jump_mode: str
    bias_note: str

    @property
    def rel_ci(self) -> float:
        """Half-width of the 95% interval relative to ``p_hat``."""
        return math.inf if self.p_hat == 0.0 else 1.96 * self.stderr / self.p_hat

    def upper_one_sided(self, level: float = 0.95) -> float:
        """One-sided upper confidence bound, meaningful when ``p_hat = 0``."""
        if self.p_hat == 0.0:
            return 1.0 - (1.0 - level) ** (1.0 / self.n_paths)
        return self.p_hat + 1.645 * self.stderr


class PathSkeleton(NamedTuple):
    jump_times: np.ndarray
    jump_sizes: np.ndarray
    grid_times: np.ndarray
    grid_values: np.ndarray


def set_threads(n: Optional[int] = None) -> int:
    """Set numba's thread count from ``n`` or ``$LEVY_SMALLBALL_THREADS``."""
    if n is None:
        env = os.environ.get(THREADS_ENV)
        if not env:
            return numba.get_num_threads()
        n = int(env)
    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)
    return n


# ------------------------------------------------------------- parameter table


@dataclass(frozen=True)
class _Packed:
    table: np.ndarray  # rows: kind, C, alpha, lam, sign, lower, upper, split, rate1, rate2, loc, mass
    drift: float
    scale: float  # std of the continuous part at t = 1


def _pack(triplet: LevyTriplet, delta: float, mode: str) -> _Packed:
    rows = []
    for c in triplet.components:
        if isinstance(c, NumericDensity):
            raise ValueError("numeric densities cannot be simulated")
        if isinstance(c, Atom):
            if abs(c.location) <= delta:
                raise ValueError("delta must lie below every atom location")
            rows.append([_ATOM, 0, 0, 0, 0, 0, 0, 0, c.mass, 0, c.location, c.mass])
            continue
        if c.C == 0.0 or c.cutoff <= delta:
            continue
        lo, hi = delta, c.cutoff
        if c.lam == 0.0:
            if math.isinf(hi) and c.alpha <= 0.0:
                raise ValueError("untempered power law with infinite mass at infinity")
            rate = c.C * power_exp_integral(-c.alpha, 0.0, lo, hi)
            rows.append([_POWER, c.C, c.alpha, 0, c.sign, lo, hi, hi, rate, 0, 0, 0])
        else:
            if c.alpha < -1.0:
                raise ValueError("tempered sampling needs alpha >= -1")
            m = min(max(1.0 / c.lam, lo), hi)
            r1 = c.C * math.exp(-c.lam * lo) * power_exp_integral(-c.alpha, 0.0, lo, m) if m > lo else 0.0
            if hi > m:
                tail = -math.expm1(-c.lam * (hi - m)) if math.isfinite(hi) else 1.0
                r2 = c.C * m ** (-1.0 - c.alpha) * math.exp(-c.lam * m) * tail / c.lam
            else:
                r2 = 0.0
            rows.append([_TEMPERED, c.C, c.alpha, c.lam, c.sign, lo, hi, m, r1, r2, 0, 0])
    table = np.array(rows, dtype=np.float64).reshape(-1, 12)
    drift = truncated_drift(triplet, delta)
    var = triplet.sigma2
    if mode == "gaussian_substitute":
        var += abs_moment(triplet, delta, 2.0)
    return _Packed(table, drift, math.sqrt(var))


# --------------------------------------------------------------- numba kernels


@njit(cache=True)
def _power_inv(u, alpha, lo, hi):
    # inverse CDF of x^(-1-alpha) on (lo, hi]
    if alpha == 0.0:
        return lo * math.exp(u * math.log(hi / lo))
    hi_p = 0.0 if (math.isinf(hi) and alpha > 0.0) else hi ** (-alpha)
    return ((1.0 - u) * lo ** (-alpha) + u * hi_p) ** (-1.0 / alpha)


@njit(cache=True)
def _draw_jumps(table):
    n_rows = table.shape[0]
    counts = np.zeros(n_rows, dtype=np.int64)
    counts2 = np.zeros(n_rows, dtype=np.int64)
    total = 0
    for i in range(n_rows):
        counts[i] = np.random.poisson(table[i, 8])
        if table[i, 0] == 1.0:
            counts2[i] = np.random.poisson(table[i, 9])
        total += counts[i] + counts2[i]
    times = np.empty(total)
    sizes = np.empty(total)
    n = 0
    for i in range(n_rows):
        kind = table[i, 0]
        if kind == 2.0:
            for _ in range(counts[i]):
                times[n] = np.random.random()
                sizes[n] = table[i, 10]
                n += 1
            continue
        alpha, lam, sign = table[i, 2], table[i, 3], table[i, 4]
        lo, hi, m = table[i, 5], table[i, 6], table[i, 7]
        if kind == 0.0:
            for _ in range(counts[i]):
                times[n] = np.random.random()
                sizes[n] = sign * _power_inv(np.random.random(), alpha, lo, hi)
                n += 1
            continue
        # tempered: thinning of two dominating proposals split at m
        for _ in range(counts[i]):
            x = _power_inv(np.random.random(), alpha, lo, m)
            if np.random.random() <= math.exp(-lam * (x - lo)):
                times[n] = np.random.random()
                sizes[n] = sign * x
                n += 1
        for _ in range(counts2[i]):
            v = np.random.random()
            if math.isinf(hi):
                x = m - math.log1p(-v) / lam
            else:
                x = m - math.log1p(-v * -math.expm1(-lam * (hi - m))) / lam
            if np.random.random() <= (x / m) ** (-1.0 - alpha):
                times[n] = np.random.random()
                sizes[n] = sign * x
                n += 1
    times = times[:n]
    sizes = sizes[:n]
    order = np.argsort(times)
    return times[order], sizes[order]


@njit(cache=True)
def _bridge_max(a, b, var_dt):
    # maximum of a Brownian bridge from a to b with variance var_dt
    d = b - a
    return 0.5 * (a + b + math.sqrt(d * d - 2.0 * var_dt * math.log(1.0 - np.random.random())))


@njit(cache=True)
def _path(times, sizes, drift, scale, grid_n, bridge, stop_above, record, grid_out):
    """Walk one path through the given jumps and return sup |X|.

    The sup is exact up to ``stop_above``; once exceeded the walk stops and
    the current value (> stop_above) is returned.
    """
    dt_grid = 1.0 / grid_n
    x = 0.0
    t = 0.0
    hi = 0.0
    lo = 0.0
    j = 0
    n_j = times.shape[0]
    if record:
        grid_out[0] = 0.0
    for k in range(1, grid_n + 1):
        t_end = k * dt_grid
        while True:
            jump = j < n_j and times[j] <= t_end
            t_next = times[j] if jump else t_end
            dt = t_next - t
            if dt > 0.0:
                sd = scale * math.sqrt(dt)
                y = x + drift * dt + sd * np.random.standard_normal()
                if bridge and sd > 0.0:
                    reach = 6.0 * sd
                    top = max(x, y)
                    bot = min(x, y)
                    if top + reach > hi:
                        top = _bridge_max(x, y, sd * sd)
                    if bot - reach < lo:
                        bot = -_bridge_max(-x, -y, sd * sd)
                    hi = max(hi, top)
                    lo = min(lo, bot)
                else:
                    hi = max(hi, y)
                    lo = min(lo, y)
                x = y
                t = t_next
            if jump:
                x += sizes[j]
                hi = max(hi, x)
                lo = min(lo, x)
                j += 1
            if max(hi, -lo) > stop_above and not record:
                return max(hi, -lo)
            if not jump:
                break
        if record:
            grid_out[k] = x
    return max(hi, -lo)


@njit(cache=True, parallel=True)
def _sups(table, drift, scale, grid_n, bridge, stop_above, seeds):
    n = seeds.shape[0]
    out = np.empty(n)
    dummy = np.empty(1)
    for i in prange(n):
        np.random.seed(seeds[i])
        times, sizes = _draw_jumps(table)
        out[i] = _path(times, sizes, drift, scale, grid_n, bridge, stop_above, False, dummy)
    return out


@njit(cache=True, parallel=True)
def _terminal(table, drift, scale, seeds):
    n = seeds.shape[0]
    out = np.empty(n)
    for i in prange(n):
        np.random.seed(seeds[i])
        times, sizes = _draw_jumps(table)
        out[i] = drift + scale * np.random.standard_normal() + sizes.sum()
    return out


# ------------------------------------------------------------------ front end


def path_seeds(seed: int, n: int) -> np.ndarray:
    """Per-path 32-bit seeds derived from the master seed."""
    return np.random.SeedSequence(seed).generate_state(n, dtype=np.uint32).astype(np.int64)


def sample_path(triplet: LevyTriplet, config: SimulationConfig, path_seed: int, eps: Optional[float] = None) -> PathSkeleton:
    """Jump skeleton and grid values of one path (``delta`` from config or ``eps/10``)."""
    cfg = config if config.delta is not None else config.resolved(eps if eps is not None else 1.0)
    p = _pack(triplet, cfg.delta, cfg.small_jump_mode)
    grid = np.empty(cfg.grid_n + 1)
    _seed_one(path_seed)
    times, sizes = _draw_jumps(p.table)
    _path(times, sizes, p.drift, p.scale, cfg.grid_n, cfg.bridge, math.inf, True, grid)
    return PathSkeleton(times, sizes, np.linspace(0.0, 1.0, cfg.grid_n + 1), grid)


@njit(cache=True)
def _seed_one(s):
    np.random.seed(s)


def path_sups(
    triplet: LevyTriplet,
    config: SimulationConfig,
    eps: Optional[float] = None,
    stop_above: float = math.inf,
) -> np.ndarray:
    """Sup of ``|X|`` over ``[0, 1]`` for every path, censored above ``stop_above``."""
    cfg = config.resolved(eps if eps is not None else 1.0)
    if eps is not None and cfg.delta >= eps / 4.0 + 1e-15 and config.delta is not None:
        raise ValueError("delta must lie below eps / 4")
    p = _pack(triplet, cfg.delta, cfg.small_jump_mode)
    seeds = path_seeds(cfg.seed, cfg.n_paths)
    return _sups(p.table, p.drift, p.scale, cfg.grid_n, cfg.bridge, stop_above, seeds)


def _estimate(eps, inside, cfg) -> SmallBallEstimate:
    n = inside.size
    p = float(inside.mean())
    se = math.sqrt(p * (1.0 - p) / n)
    note = (
        "exact bridge monitoring between events; residual bias from small-jump treatment"
        if cfg.bridge
        else "grid monitoring: sup underestimated, p_hat biased upward"
    )
    return SmallBallEstimate(eps, p, se, n, cfg.delta, cfg.small_jump_mode, note)


def estimate_small_ball(triplet: LevyTriplet, eps: float, config: SimulationConfig) -> SmallBallEstimate:
    """Estimate ``P(sup_{[0,1]} |X_t| <= eps)``."""
    cfg = config.resolved(eps)
    sups = path_sups(triplet, cfg, eps, stop_above=eps)
    return _estimate(eps, sups <= eps, cfg)


def estimate_small_ball_many(
    triplet: LevyTriplet, eps_values: Sequence[float], config: SimulationConfig
) -> list[SmallBallEstimate]:
    """Estimates at several radii from one set of paths.

    ``delta`` (default: a tenth of the smallest radius) is shared by all.
    """
    eps_values = [float(e) for e in eps_values]
    cfg = config.resolved(min(eps_values))
    sups = path_sups(triplet, cfg, None, stop_above=max(eps_values))
    return [_estimate(e, sups <= e, cfg) for e in eps_values]


def sample_terminal(triplet: LevyTriplet, config: SimulationConfig, eps: Optional[float] = None) -> np.ndarray:
    """Samples of ``X_1`` (jumps above ``delta`` plus the Gaussian substitute)."""
    cfg = config.resolved(eps if eps is not None else 1.0)
    p = _pack(triplet, cfg.delta, cfg.small_jump_mode)
    return _terminal(p.table, p.drift, p.scale, path_seeds(cfg.seed, cfg.n_paths))


def brownian_small_ball_exact(eps: float) -> float:
    """``P(sup_{[0,1]} |W_t| <= eps)`` for standard Brownian motion.

    Uses the theta series in ``exp(-(2k+1)^2 pi^2 / (8 eps^2))`` for
    ``eps <= 1`` and the method-of-images series in normal CDFs otherwise.
    """
    if eps <= 0.0:
        return 0.0
    if math.isinf(eps):
        return 1.0
    if eps <= 1.0:
        total = 0.0
        k = 0
        while True:
            n = 2 * k + 1
            term = (4.0 / math.pi) * (-1) ** k / n * math.exp(-(n * n) * math.pi**2 / (8.0 * eps * eps))
            total += term
            if abs(term) < 1e-16 * max(abs(total), 1e-300) or k > 1000:
                break
            k += 1
        return total
    # sum_k (-1)^k [Phi((2k+1) eps) - Phi((2k-1) eps)] over all integers k
    total = 0.0
    for k in range(-50, 51):
        total += (-1) ** k * (sps.ndtr((2 * k + 1) * eps) - sps.ndtr((2 * k - 1) * eps))
    return float(total)
