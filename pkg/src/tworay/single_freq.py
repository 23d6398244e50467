"""Single-carrier receive power and its worst case over a distance interval."""

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError
from .geometry import (
    SPEED_OF_LIGHT,
    LinkGeometry,
    _scalar_or_array,
    check_distance,
    distance_for_path_difference,
    max_phase_shift,
    path_difference,
    path_lengths,
)


@dataclass(frozen=True)
class RadioConfig:
    """Carrier and power settings.

    Frequencies are in Hz; `theta` is the share of `p_t` on the first
    carrier and `rho` the reflected-path amplitude gain relative to the
    direct path.
    """

    f1: float
    delta_f: float = 0.0
    theta: float = 0.5
    p_t: float = 1.0
    rho: float = 1.0

    def __post_init__(self):
        if not (np.isfinite(self.f1) and self.f1 > 0):
            raise DomainError(f"f1 must be positive, got {self.f1!r}")
        if not (np.isfinite(self.delta_f) and self.delta_f >= 0):
            raise DomainError(f"delta_f must be >= 0, got {self.delta_f!r}")
        if not 0.0 <= self.theta <= 1.0:
            raise DomainError(f"theta must lie in [0, 1], got {self.theta!r}")
        if not (np.isfinite(self.p_t) and self.p_t >= 0):
            raise DomainError(f"p_t must be >= 0, got {self.p_t!r}")
        if not 0.0 <= self.rho <= 1.0:
            raise DomainError(f"rho must lie in [0, 1], got {self.rho!r}")

    @property
    def omega1(self):
        return 2.0 * math.pi * self.f1

    @property
    def delta_omega(self):
        return 2.0 * math.pi * self.delta_f


@dataclass(frozen=True)
class DistanceInterval:
    d_min: float
    d_max: float

    def __post_init__(self):
        if not (np.isfinite(self.d_min) and np.isfinite(self.d_max)):
            raise DomainError("interval bounds must be finite")
        if not 0 < self.d_min < self.d_max:
            raise DomainError(
                f"need 0 < d_min < d_max, got [{self.d_min!r}, {self.d_max!r}]"
            )

    def __contains__(self, d):
        return self.d_min <= d <= self.d_max


class WorstCaseKind(enum.Enum):
    LOWER_ENDPOINT = "lower_endpoint"
    UPPER_ENDPOINT = "upper_endpoint"
    LOCAL_MINIMUM = "local_minimum"


@dataclass(frozen=True)
class WorstCase:
    power: float
    at_distance: float
    kind: WorstCaseKind
    null_index: Optional[int] = None


def received_power(d, omega, geom: LinkGeometry, p_t=1.0, rho=1.0):
    """Two-ray receive power without validating `rho` or `p_t`.

    Written as ``(1/l - rho/lt)^2 + 4 rho sin^2(phi/2) / (l lt)`` instead of
    the textbook cosine form so the result keeps full relative precision
    near destructive nulls and at long range.
    """
    d = check_distance(d, strictly_positive=True)
    los, reflected = path_lengths(d, geom)
    delta = path_difference(d, geom)
    phi = omega / SPEED_OF_LIGHT * delta
    if rho == 1.0:
        smooth = (delta / (los * reflected)) ** 2
    else:
        smooth = (1.0 / los - rho / reflected) ** 2
    osc = 4.0 * rho * np.sin(0.5 * phi) ** 2 / (los * reflected)
    return _scalar_or_array(p_t * (SPEED_OF_LIGHT / (2.0 * omega)) ** 2 * (smooth + osc))


def receive_power_single(d, omega, geom: LinkGeometry, cfg: RadioConfig):
    """Receive power in watts on one carrier at angular frequency `omega`."""
    if not omega > 0:
        raise DomainError("omega must be > 0")
    return received_power(d, omega, geom, cfg.p_t, cfg.rho)


def local_minimum_count(omega, geom: LinkGeometry) -> int:
    """Number of destructive-interference nulls over all d >= 0."""
    return int(math.floor(max_phase_shift(omega, geom) / (2.0 * math.pi)))


def null_distance(k: int, omega, geom: LinkGeometry) -> Optional[float]:
    """Distance of the k-th null (k=1 is the farthest one).

    Returns None if rounding pushes the closed form's radicand below zero.
    """
    k_max = local_minimum_count(omega, geom)
    if not 1 <= k <= k_max:
        raise DomainError(f"null index {k} outside [1, {k_max}]")
    ck = SPEED_OF_LIGHT * math.pi * k
    radicand = (ck**2 - (omega * geom.h_rx) ** 2) * (ck**2 - (omega * geom.h_tx) ** 2)
    if radicand < 0:
        return None
    return math.sqrt(radicand) / (omega * ck)


def _distance_at_phase(phase, omega, geom):
    return distance_for_path_difference(phase * SPEED_OF_LIGHT / omega, geom)


def _refine_null(power_fn, phase_of_null, omega, interval, geom):
    """Minimize `power_fn` between the maxima that flank a null.

    `phase_of_null` is the null's phase in radians (a multiple of 2 pi)
    measured against `omega`; the flanking maxima sit at +-pi from it.
    """
    near = _distance_at_phase(phase_of_null + math.pi, omega, geom)
    far = _distance_at_phase(phase_of_null - math.pi, omega, geom)
    lo = max(interval.d_min, near)
    hi = min(interval.d_max, far)
    res = minimize_scalar(
        power_fn, bounds=(lo, hi), method="bounded", options={"xatol": 1e-10 * hi}
    )
    return float(res.x), float(res.fun)


def worst_case_power_single(
    interval: DistanceInterval, omega, geom: LinkGeometry, cfg: RadioConfig, refine=True
) -> WorstCase:
    """Minimum receive power over `interval` on a single carrier.

    The candidates are both endpoints and the farthest null inside the
    interval. With ``refine=False`` the null candidate is evaluated exactly
    at its closed-form distance. The default refines it to the true local
    minimum nearby, which sits a hair off the null because the direct and
    reflected amplitudes also vary with distance.
    """
    candidates = [
        (receive_power_single(interval.d_min, omega, geom, cfg), interval.d_min,
         WorstCaseKind.LOWER_ENDPOINT, None),
        (receive_power_single(interval.d_max, omega, geom, cfg), interval.d_max,
         WorstCaseKind.UPPER_ENDPOINT, None),
    ]
    k_max = local_minimum_count(omega, geom)
    if k_max >= 1:
        # phase shift decreases with d, so the farthest null has the smallest k
        phase_far = omega / SPEED_OF_LIGHT * path_difference(interval.d_max, geom)
        k = max(1, math.ceil(phase_far / (2.0 * math.pi)))
        d_k = null_distance(k, omega, geom) if k <= k_max else None
        if d_k is not None and d_k in interval:
            if refine:
                d_k, p_k = _refine_null(
                    lambda x: receive_power_single(x, omega, geom, cfg),
                    2.0 * math.pi * k, omega, interval, geom,
                )
            else:
                p_k = receive_power_single(d_k, omega, geom, cfg)
            candidates.append((p_k, d_k, WorstCaseKind.LOCAL_MINIMUM, k))
    power, at, kind, k = min(candidates, key=lambda c: c[0])
    return WorstCase(float(power), float(at), kind, k)
