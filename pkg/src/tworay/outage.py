"""Monte-Carlo outage probability under random link distances.

Random streams are counter based: block ``i`` of any sampler draws from
``Philox(SeedSequence(seed, spawn_key=(i,)))``. The split of blocks over
workers never touches the numbers, so results are identical for any
worker count.
"""

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, ResolutionError, TraceFileError
from .single_freq import DistanceInterval

UNIFORM_BLOCK = 2**16
MOBILITY_BLOCK = 50  # trajectories per random substream


def _block_rng(seed, block):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


@dataclass(frozen=True)
class UniformSampler:
    interval: DistanceInterval
    seed: int = 0

    @property
    def block_size(self):
        return UNIFORM_BLOCK

    @property
    def bounds(self):
        return self.interval.d_min, self.interval.d_max

    def block(self, index):
        rng = _block_rng(self.seed, index)
        return rng.uniform(self.interval.d_min, self.interval.d_max, UNIFORM_BLOCK)


@dataclass(frozen=True)
class MobilityParams:
    """Per-axis damped mean-reverting motion inside a disk.

    Positions are normalized by `region_radius` and measured from the disk
    centre. Each axis follows

        dv = beta * (-alpha * v - gamma * (u - clip(u, -s, s))) dt + sigma dW
        du = v dt

    integrated by Euler-Maruyama with step `dt`, and the position is
    mirrored back into the unit disk whenever it leaves it. With ``s = 1``
    the restoring force only acts outside the disk, so the walls do the
    confining. The transmitter sits `origin_offset` meters from the centre.
    """

    alpha: float = 1.0
    beta: float = 3.0
    gamma: float = 7.0
    sigma: float = 1.0
    s: float = 1.0
    dt: float = 0.1
    n_steps: int = 2000
    origin_offset: float = 180.0
    region_radius: float = 150.0

    def __post_init__(self):
        if self.sigma < 0:
            raise DomainError("sigma must be >= 0")
        if not self.dt > 0:
            raise DomainError("dt must be > 0")
        if not self.region_radius > 0:
            raise DomainError("region_radius must be > 0")
        if self.n_steps < 1:
            raise DomainError("n_steps must be >= 1")
        if self.origin_offset < 0:
            raise DomainError("origin_offset must be >= 0")


def simulate_trajectories(params: MobilityParams, rng, count):
    """Positions of `count` trajectories in meters, shape ``(count, n_steps, 2)``.

    The transmitter is at the origin and the region centre at
    ``(origin_offset, 0)``. All trajectories start at rest in the centre.
    """
    p = params
    noise = rng.standard_normal((p.n_steps, count, 2)) * (p.sigma * math.sqrt(p.dt))
    u = np.zeros((count, 2))
    v = np.zeros((count, 2))
    out = np.empty((count, p.n_steps, 2))
    for step in range(p.n_steps):
        excess = u - np.clip(u, -p.s, p.s)
        v = v + p.beta * (-p.alpha * v - p.gamma * excess) * p.dt + noise[step]
        u = u + v * p.dt
        r = np.hypot(u[:, 0], u[:, 1])
        outside = r > 1.0
        if outside.any():
            normal = u[outside] / r[outside, None]
            # mirror at the circle, never past the opposite side
            depth = np.minimum(r[outside], 3.0)[:, None]
            u[outside] = normal * (2.0 - depth)
            vn = np.sum(v[outside] * normal, axis=1)[:, None]
            v[outside] = v[outside] - 2.0 * vn * normal
        out[:, step] = u
    out *= p.region_radius
    out[..., 0] += p.origin_offset
    return out


@dataclass(frozen=True)
class MobilitySampler:
    params: MobilityParams = MobilityParams()
    seed: int = 0

    @property
    def block_size(self):
        return MOBILITY_BLOCK * self.params.n_steps

    @property
    def bounds(self):
        p = self.params
        return max(p.origin_offset - p.region_radius, 0.0), p.origin_offset + p.region_radius

    def block(self, index):
        xy = simulate_trajectories(self.params, _block_rng(self.seed, index), MOBILITY_BLOCK)
        return np.hypot(xy[..., 0], xy[..., 1]).ravel()


def read_trace(path):
    """Distances from a text file, one per line; blank lines and ``#`` comments skipped."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise TraceFileError(f"{path}: {exc.strerror or exc}") from exc
    values = []
    for lineno, line in enumerate(lines, 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            value = float(text)
        except ValueError:
            raise TraceFileError(f"{path}:{lineno}: not a number: {text!r}") from None
        if not math.isfinite(value) or value <= 0:
            raise TraceFileError(f"{path}:{lineno}: distance must be positive and finite, got {text!r}")
        values.append(value)
    if not values:
        raise TraceFileError(f"{path}: no distances found")
    return np.array(values)


@dataclass(frozen=True)
class TraceSampler:
    """Replays a recorded distance trace, wrapping around when it runs out."""

    path: str
    seed: int = 0  # unused, kept so all samplers share a shape

    def __post_init__(self):
        object.__setattr__(self, "_data", read_trace(self.path))

    @property
    def block_size(self):
        return self._data.size

    @property
    def bounds(self):
        return float(self._data.min()), float(self._data.max())

    def block(self, index):
        return self._data


def sample_distances(sampler, n, workers=1):
    """First `n` distances of the sampler's stream."""
    if n < 1:
        raise DomainError("n must be >= 1")
    n_blocks = -(-n // sampler.block_size)
    if workers > 1 and n_blocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(sampler.block, range(n_blocks)))
    else:
        blocks = [sampler.block(i) for i in range(n_blocks)]
    return np.concatenate(blocks)[:n]


@dataclass(frozen=True)
class OutageEstimate:
    threshold: float
    probability: float
    n_samples: int
    half_width_95: float


def _estimate(threshold, count, n):
    p = count / n
    return OutageEstimate(float(threshold), p, n, 1.96 * math.sqrt(p * (1.0 - p) / n))


def _rates(sampler, rate_fn, n, workers, distances):
    if distances is None:
        distances = sample_distances(sampler, n, workers)
    return np.asarray(rate_fn(distances), dtype=float)


def outage_probability(sampler, rate_fn, threshold, n, workers=1, distances=None) -> OutageEstimate:
    """Fraction of sampled distances whose rate falls strictly below `threshold`.

    Pass `distances` to reuse a batch across several rate functions.
    """
    rates = _rates(sampler, rate_fn, n, workers, distances)
    return _estimate(threshold, int(np.count_nonzero(rates < threshold)), rates.size)


def outage_curve(sampler, rate_fn, thresholds, n, workers=1, distances=None):
    """Outage estimates for ascending `thresholds` from one shared sample batch."""
    thresholds = np.asarray(thresholds, dtype=float)
    if np.any(np.diff(thresholds) < 0):
        raise DomainError("thresholds must be sorted ascending")
    rates = np.sort(_rates(sampler, rate_fn, n, workers, distances))
    counts = np.searchsorted(rates, thresholds, side="left")
    return [_estimate(t, int(c), rates.size) for t, c in zip(thresholds, counts)]


def eps_outage_capacity(sampler, rate_fn, epsilon, n, workers=1, distances=None):
    """Largest rate whose estimated outage probability is at most `epsilon`.

    With ``k = floor(epsilon * n)`` this is the k-th smallest sampled rate
    (0-based): any threshold up to it has at most k rates strictly below.
    """
    if not 0 <= epsilon < 1:
        raise DomainError("epsilon must lie in [0, 1)")
    size = n if distances is None else len(distances)
    if epsilon > 0 and size < 10.0 / epsilon:
        raise ResolutionError(f"{size} samples cannot resolve epsilon={epsilon:g}; need >= {math.ceil(10 / epsilon)}")
    rates = _rates(sampler, rate_fn, n, workers, distances)
    k = int(math.floor(epsilon * rates.size))
    return float(np.partition(rates, k)[k])


def export_trajectory(params: MobilityParams, seed, path, trajectory=0):
    """Write one mobility trajectory as CSV with columns ``step,x,y,d`` in meters.

    `trajectory` indexes the same stream `MobilitySampler` uses.
    """
    block, offset = divmod(trajectory, MOBILITY_BLOCK)
    xy = simulate_trajectories(params, _block_rng(seed, block), MOBILITY_BLOCK)[offset]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "x", "y", "d"])
        for step, (x, y) in enumerate(xy):
            writer.writerow([step, repr(float(x)), repr(float(y)), repr(float(math.hypot(x, y)))])
