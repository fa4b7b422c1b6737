"""Monte Carlo cross-checks of the closed-form escape and scatter counts."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._parallel import chunk_rng, chunk_sizes, ordered_map
from .physics import StripGeometry

__all__ = ["McConfig", "McEstimate", "simulate_escape", "simulate_scatter_count"]


@dataclass(frozen=True)
class McConfig:
    n_samples: int = 1_000_000
    seed: int = 0
    chunk_size: int = 65_536
    workers: int = 1

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    n_samples: int


def _moments(x: np.ndarray) -> tuple[int, float, float]:
    m = float(x.mean())
    return x.size, m, float(np.sum((x - m) ** 2))


def _combine(parts) -> McEstimate:
    # Chan et al. pairwise update, applied strictly in chunk order
    n, mean, m2 = 0, 0.0, 0.0
    for nb, mb, m2b in parts:
        tot = n + nb
        delta = mb - mean
        mean += delta * nb / tot
        m2 += m2b + delta * delta * n * nb / tot
        n = tot
    var = m2 / (n - 1) if n > 1 else 0.0
    return McEstimate(mean=mean, std_error=math.sqrt(var / n), n_samples=n)


def simulate_escape(strip: StripGeometry, lam: float, mc: McConfig = McConfig()) -> McEstimate:
    """Escape probability of photons emitted uniformly in depth.

    Each sample draws a depth in ``[0, z]`` and scores the survival weight
    ``exp(-depth / lam)``.
    """
    if not lam > 0:
        raise ValueError("absorption length must be positive")
    z = strip.thickness_z

    def run(i, n):
        depth = chunk_rng(mc.seed, i).uniform(0.0, z, size=n)
        return _moments(np.exp(-depth / lam))

    return _combine(ordered_map(run, chunk_sizes(mc.n_samples, mc.chunk_size), mc.workers))


_MAX_DRAW = 4_000_000


def _count_arrivals(rng: np.random.Generator, n: int, length: float, mfp: float) -> np.ndarray:
    counts = np.zeros(n, dtype=np.int64)
    pos = np.zeros(n)
    alive = np.arange(n)
    mean = length / mfp
    block = max(1, int(math.ceil(mean + 5.0 * math.sqrt(mean) + 5.0)))
    while alive.size:
        # cap each draw at ~4M variates
        block = max(1, min(block, _MAX_DRAW // alive.size))
        steps = np.cumsum(rng.exponential(mfp, size=(alive.size, block)), axis=1)
        steps += pos[alive, None]
        inside = steps <= length
        counts[alive] += inside.sum(axis=1)
        unfinished = inside[:, -1]
        pos[alive[unfinished]] = steps[unfinished, -1]
        alive = alive[unfinished]
    return counts


def _count_arrivals_blocked(rng: np.random.Generator, n: int, length: float, mfp: float) -> np.ndarray:
    # Jump `block` free paths at a time: their sum is Gamma(block, mfp). If a
    # jump overshoots, the block's interior arrivals are uniform on the jump,
    # so the number still inside is Binomial(block - 1, remaining / jump).
    block = max(1, int(length / mfp) // 2)
    counts = np.zeros(n, dtype=np.int64)
    pos = np.zeros(n)
    alive = np.arange(n)
    while alive.size:
        jump = rng.gamma(block, mfp, size=alive.size)
        end = pos[alive] + jump
        full = end <= length
        counts[alive[full]] += block
        pos[alive[full]] = end[full]
        over = alive[~full]
        if over.size and block > 1:
            frac = (length - pos[over]) / jump[~full]
            counts[over] += rng.binomial(block - 1, frac)
        alive = alive[full]
    return counts


# above this many expected scatterings per walker, paths are drawn in blocks
DIRECT_SCATTER_MAX = 1000.0


def simulate_scatter_count(strip: StripGeometry, mc: McConfig = McConfig()) -> McEstimate:
    """Mean number of electron-atom scatterings over the detector window.

    Free paths are exponential with mean ``mu`` along a straight line; the
    count is the number of scatterings before the path exceeds ``D``. Up to
    ``DIRECT_SCATTER_MAX`` expected scatterings every free path is drawn;
    beyond that, paths are summed in Gamma-distributed blocks, which samples
    the same count distribution at a cost independent of ``D / mu``.
    """
    D, mu = strip.window_D, strip.mean_free_path_mu
    counter = _count_arrivals if D / mu <= DIRECT_SCATTER_MAX else _count_arrivals_blocked

    def run(i, n):
        return _moments(counter(chunk_rng(mc.seed, i), n, D, mu).astype(float))

    return _combine(ordered_map(run, chunk_sizes(mc.n_samples, mc.chunk_size), mc.workers))
