"""Sum power of two parallel carriers and its distance envelope.

The reflected-path gain is fixed to 1 throughout this module since that is
the worst case for destructive interference. The second carrier sits at
``omega1 + delta_omega`` and gets ``1 - theta`` of the transmit power.
"""

import math
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, SearchError
from .geometry import (
    SPEED_OF_LIGHT,
    LinkGeometry,
    _scalar_or_array,
    check_distance,
    path_difference,
    path_lengths,
)
from .single_freq import RadioConfig

C = SPEED_OF_LIGHT


class SpacingLandmarks(NamedTuple):
    """Approximate envelope peak and null spacings of order k, in rad/s."""

    peak: float
    null: float
    order: int


def _carrier_weights(delta_omega, cfg):
    if np.any(np.asarray(delta_omega) < 0):
        raise DomainError("delta_omega must be >= 0")
    w1 = cfg.omega1
    w2 = w1 + np.asarray(delta_omega, dtype=float)
    return cfg.theta / w1**2, (1.0 - cfg.theta) / w2**2, w2


def _common(d, geom):
    d = check_distance(d, strictly_positive=True)
    los, reflected = path_lengths(d, geom)
    delta = path_difference(d, geom)
    return los * reflected, delta


def sum_power(d, delta_omega, geom: LinkGeometry, cfg: RadioConfig):
    """Total receive power of both carriers in watts."""
    a, b, w2 = _carrier_weights(delta_omega, cfg)
    prod, delta = _common(d, geom)
    smooth = (delta / prod) ** 2
    phi1 = cfg.omega1 / C * delta
    phi2 = w2 / C * delta
    # 1/l^2 + 1/lt^2 - 2cos(phi)/(l lt) == (1/l - 1/lt)^2 + 4 sin^2(phi/2)/(l lt)
    p1 = a * (smooth + 4.0 * np.sin(0.5 * phi1) ** 2 / prod)
    p2 = b * (smooth + 4.0 * np.sin(0.5 * phi2) ** 2 / prod)
    return _scalar_or_array(cfg.p_t * (C / 2.0) ** 2 * (p1 + p2))


def sum_power_lower_bound(d, delta_omega, geom: LinkGeometry, cfg: RadioConfig):
    """Lower envelope of `sum_power` over distance.

    The two cosines are replaced by the modulus of their analytic signal,
    ``sqrt(a^2 + b^2 + 2ab cos(psi))`` with ``psi = delta_omega (lt - l) / c``.
    """
    a, b, _ = _carrier_weights(delta_omega, cfg)
    prod, delta = _common(d, geom)
    psi = np.asarray(delta_omega, dtype=float) / C * delta
    env = np.sqrt(a * a + b * b + 2.0 * a * b * np.cos(psi))
    # (a+b) - env, rewritten to avoid cancellation when psi is near 2 pi k
    gap = 4.0 * a * b * np.sin(0.5 * psi) ** 2 / (a + b + env)
    value = (a + b) * (delta / prod) ** 2 + 2.0 * gap / prod
    return _scalar_or_array(cfg.p_t * (C / 2.0) ** 2 * value)


def envelope_simplified(d, delta_omega, geom: LinkGeometry, cfg: RadioConfig):
    """Bound with both carriers treated as equal frequency (theta = 0.5 only)."""
    if cfg.theta != 0.5:
        raise DomainError("the simplified envelope assumes theta = 0.5")
    prod, delta = _common(d, geom)
    half_psi = 0.5 * np.asarray(delta_omega, dtype=float) / C * delta
    value = (delta / prod) ** 2 + 2.0 * (1.0 - np.abs(np.cos(half_psi))) / prod
    return _scalar_or_array(cfg.p_t / cfg.omega1**2 * (C / 2.0) ** 2 * value)


def peak_spacing(d, k: int, geom: LinkGeometry):
    """Spacing of the k-th envelope maximum, ``pi c (2k+1) / (lt - l)``."""
    if k < 0:
        raise DomainError("k must be >= 0")
    d = check_distance(d, strictly_positive=True)
    return _scalar_or_array(math.pi * C * (2 * k + 1) / path_difference(d, geom))


def null_spacing(d, k: int, geom: LinkGeometry):
    """Spacing of the k-th envelope minimum, ``2 pi c k / (lt - l)``; 0 for k=0."""
    if k < 0:
        raise DomainError("k must be >= 0")
    d = check_distance(d, strictly_positive=True)
    return _scalar_or_array(2.0 * math.pi * C * k / path_difference(d, geom))


def landmarks(d, k: int, geom: LinkGeometry) -> SpacingLandmarks:
    return SpacingLandmarks(float(peak_spacing(d, k, geom)), float(null_spacing(d, k, geom)), k)


def exact_peak_spacing(d, geom: LinkGeometry, cfg: RadioConfig, bracket, kind="max", rtol=1e-6):
    """Locate the stationary point of the bound in `delta_omega` numerically.

    `bracket` is a ``(lo, hi)`` pair in rad/s that must contain exactly one
    maximum (``kind="max"``) or minimum (``kind="min"``). Raises SearchError
    when the optimum lands on a bracket end, i.e. there was no interior
    extremum to find.
    """
    lo, hi = map(float, bracket)
    if not 0 <= lo < hi:
        raise DomainError(f"bad bracket {bracket!r}")
    sign = -1.0 if kind == "max" else 1.0
    if kind not in ("max", "min"):
        raise ValueError(f"kind must be 'max' or 'min', got {kind!r}")

    def objective(x):
        return sign * sum_power_lower_bound(d, x, geom, cfg)

    scale = lo if lo > 0 else 0.25 * hi
    res = minimize_scalar(objective, bounds=(lo, hi), method="bounded", options={"xatol": 0.5 * rtol * scale})
    x = float(res.x)
    edge = 10 * rtol * hi
    if x - lo < edge or hi - x < edge:
        raise SearchError(f"no interior {kind}imum in bracket [{lo:g}, {hi:g}]")
    return x
