"""Narrowband achievable rates for one and two carriers.

Noise enters once, as linear watts, through `NoiseModel.noise_power`. With
two carriers the band is split in halves and each half carries its share
of the transmit power.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .envelope import sum_power_lower_bound
from .errors import DomainError
from .geometry import SPEED_OF_LIGHT, LinkGeometry, _scalar_or_array, path_lengths
from .optimizer import worst_case_power_two
from .single_freq import (
    DistanceInterval,
    RadioConfig,
    received_power,
    worst_case_power_single,
)

C = SPEED_OF_LIGHT


@dataclass(frozen=True)
class NoiseModel:
    """Receiver noise: bandwidth in Hz, noise figure in dB, density in dBm/Hz."""

    bandwidth: float = 100e3
    noise_figure: float = 3.0
    noise_density: float = -174.0

    def __post_init__(self):
        if not (np.isfinite(self.bandwidth) and self.bandwidth > 0):
            raise DomainError(f"bandwidth must be positive, got {self.bandwidth!r}")

    def noise_power(self, band=None):
        """Noise power in watts over `band` Hz (the full bandwidth by default)."""
        band = self.bandwidth if band is None else band
        return 10.0 ** ((self.noise_figure + self.noise_density + 10.0 * math.log10(band) - 30.0) / 10.0)


@dataclass(frozen=True)
class RateResult:
    rate: object
    snr_linear: object
    band: float


def _shannon(band, snr):
    return _scalar_or_array(band * np.log2(1.0 + np.asarray(snr, dtype=float)))


def rate_single(d, geom: LinkGeometry, cfg: RadioConfig, noise: NoiseModel) -> RateResult:
    """Rate of one carrier at `cfg.f1` using the whole band and all of `p_t`."""
    snr = np.asarray(received_power(d, cfg.omega1, geom, cfg.p_t, cfg.rho)) / noise.noise_power()
    snr = _scalar_or_array(snr)
    return RateResult(_shannon(noise.bandwidth, snr), snr, noise.bandwidth)


def _half_band_snrs(d, delta_omega, geom, cfg, noise):
    half = 0.5 * noise.bandwidth
    n_half = noise.noise_power(half)
    w1 = cfg.omega1
    s1 = np.asarray(received_power(d, w1, geom, cfg.theta * cfg.p_t)) / n_half
    s2 = np.asarray(received_power(d, w1 + delta_omega, geom, (1.0 - cfg.theta) * cfg.p_t)) / n_half
    return s1, s2, half


def rate_two(d, delta_omega, geom: LinkGeometry, cfg: RadioConfig, noise: NoiseModel) -> RateResult:
    """Sum rate over two half bands, carriers at ``w1`` and ``w1 + delta_omega``.

    `snr_linear` is the effective ``(1 + s1)(1 + s2) - 1``, so that
    ``rate == band * log2(1 + snr_linear)`` with ``band = B/2``.
    """
    if delta_omega < 0:
        raise DomainError("delta_omega must be >= 0")
    s1, s2, half = _half_band_snrs(d, delta_omega, geom, cfg, noise)
    rate = half * (np.log2(1.0 + s1) + np.log2(1.0 + s2))
    snr = _scalar_or_array(s1 + s2 + s1 * s2)
    return RateResult(_scalar_or_array(rate), snr, half)


def alpha_offset(interval: DistanceInterval, delta_omega, geom: LinkGeometry, cfg: RadioConfig, noise: NoiseModel):
    """Floor on the product of the two half-band SNRs over the interval.

    Each single-carrier power is at least ``p (c/2w)^2 (1/l - 1/lt)^2``
    and that smooth term is smallest at ``d_max``.
    """
    los, reflected = path_lengths(interval.d_max, geom)
    w1 = cfg.omega1
    w2 = w1 + delta_omega
    n_half = noise.noise_power(0.5 * noise.bandwidth)
    share = cfg.theta * (1.0 - cfg.theta) * cfg.p_t**2
    smooth = (1.0 / los - 1.0 / reflected) ** 4
    return float(share * (C / 2.0) ** 4 / (w1 * w2) ** 2 * smooth / n_half**2)


def rate_two_lower_bound(
    d, delta_omega, interval: DistanceInterval, geom: LinkGeometry, cfg: RadioConfig, noise: NoiseModel
) -> RateResult:
    """Lower bound on `rate_two` that depends on d only through the envelope bound."""
    if delta_omega < 0:
        raise DomainError("delta_omega must be >= 0")
    half = 0.5 * noise.bandwidth
    alpha = alpha_offset(interval, delta_omega, geom, cfg, noise)
    snr = alpha + np.asarray(sum_power_lower_bound(d, delta_omega, geom, cfg)) / noise.noise_power(half)
    snr = _scalar_or_array(snr)
    return RateResult(_shannon(half, snr), snr, half)


def _exact_two_minimum(interval, delta_omega, geom, cfg, noise, grid_points):
    def rate(x):
        return rate_two(x, delta_omega, geom, cfg, noise).rate

    ds = np.linspace(interval.d_min, interval.d_max, grid_points)
    rates = rate(ds)
    i = int(np.argmin(rates))
    best = float(rates[i])
    lo, hi = ds[max(i - 1, 0)], ds[min(i + 1, grid_points - 1)]
    if hi > lo:
        # polish inside the two neighbouring cells
        res = minimize_scalar(rate, bounds=(lo, hi), method="bounded", options={"xatol": 1e-9 * hi})
        best = min(best, float(res.fun))
    return best


def zero_outage_capacity(
    interval: DistanceInterval,
    delta_omega,
    geom: LinkGeometry,
    cfg: RadioConfig,
    noise: NoiseModel,
    mode="bound",
    grid_points=1_000_000,
):
    """Largest rate that every distance in the interval supports, in bit/s.

    ``delta_omega=None`` selects a single carrier. With two carriers,
    ``mode="bound"`` uses the lower bound (from the worst-case power
    candidates) and ``mode="exact"`` uses the sum rate itself, minimized on
    a fine grid and then polished locally.
    """
    if delta_omega is None:
        worst = worst_case_power_single(interval, cfg.omega1, geom, cfg)
        return float(noise.bandwidth * math.log2(1.0 + worst.power / noise.noise_power()))
    if mode == "bound":
        worst = worst_case_power_two(interval, delta_omega, geom, cfg)
        half = 0.5 * noise.bandwidth
        alpha = alpha_offset(interval, delta_omega, geom, cfg, noise)
        return float(half * math.log2(1.0 + alpha + worst.power / noise.noise_power(half)))
    if mode == "exact":
        return _exact_two_minimum(interval, delta_omega, geom, cfg, noise, grid_points)
    raise ValueError(f"mode must be 'bound' or 'exact', got {mode!r}")
