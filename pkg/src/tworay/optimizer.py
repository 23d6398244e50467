"""Worst-case choice of the spacing between two parallel carriers.

For a distance known only to lie in ``[d_min, d_max]``, the spacing that
maximizes the minimum of the envelope bound sits where the bound at
``d_max`` (increasing in the spacing) meets an auxiliary decreasing curve
`g`: the bound at ``d_min`` while the first envelope null is still beyond
the interval, and the bound at that null once it has moved inside.
"""

import enum
import logging
import math
import warnings
from dataclasses import dataclass

from .envelope import exact_peak_spacing, null_spacing, peak_spacing, sum_power_lower_bound
from .errors import DomainError, NoIntersectionError, SingularityError
from .geometry import SPEED_OF_LIGHT, LinkGeometry, distance_for_path_difference, path_difference
from .single_freq import DistanceInterval, RadioConfig, WorstCase, WorstCaseKind, _refine_null

logger = logging.getLogger(__name__)

C = SPEED_OF_LIGHT
SINGULARITY_GUARD = 1e-6


class Branch(enum.Enum):
    NO_INTERSECTION = "no_intersection"
    INTERSECT_BELOW_FIRST_NULL = "intersect_below_first_null"
    INTERSECT_BETWEEN_NULLS = "intersect_between_nulls"


@dataclass(frozen=True)
class SpacingSolution:
    delta_omega_star: float
    delta_f_star: float
    worst_case_power: float
    branch: Branch
    iterations: int
    peak_at_d_min: float
    peak_at_d_max: float
    null_at_d_min: float
    null_at_d_max: float

    def as_dict(self):
        out = {k: getattr(self, k) for k in self.__dataclass_fields__}
        out["branch"] = self.branch.value
        return out


def first_null_distance(delta_omega, geom: LinkGeometry):
    """Distance at which `delta_omega` is the first envelope null spacing."""
    if not delta_omega > 0:
        raise DomainError("delta_omega must be > 0")
    return distance_for_path_difference(2.0 * math.pi * C / delta_omega, geom)


def power_at_first_null(delta_omega, geom: LinkGeometry, cfg: RadioConfig):
    """Envelope bound evaluated at the first envelope null, in closed form.

    At that distance the envelope cosine is exactly one, so the bound
    collapses to ``(c/2)^2 (theta/w1^2 + (1-theta)/w2^2) (1/l - 1/lt)^2``
    with both path lengths expressed through `delta_omega` alone.
    """
    if not delta_omega > 0:
        raise DomainError("delta_omega must be > 0")
    hh = geom.height_product
    base = (C * math.pi) ** 2
    minus = base - hh * delta_omega**2
    if abs(minus) < SINGULARITY_GUARD * base:
        raise SingularityError(
            f"delta_omega={delta_omega:g} rad/s is at the pole c*pi/sqrt(h_tx*h_rx)"
        )
    plus = base + hh * delta_omega**2
    w1 = cfg.omega1
    w2 = w1 + delta_omega
    weight = cfg.theta / w1**2 + (1.0 - cfg.theta) / w2**2
    inv_diff = C * math.pi * delta_omega * (1.0 / abs(minus) - 1.0 / plus)
    return cfg.p_t * (C / 2.0) ** 2 * weight * inv_diff**2


def g(delta_omega, interval: DistanceInterval, geom: LinkGeometry, cfg: RadioConfig):
    """The decreasing side of the max-min problem.

    Defined on ``0 < delta_omega < null_spacing(d_max, 1)``.
    """
    null_lo = null_spacing(interval.d_min, 1, geom)
    null_hi = null_spacing(interval.d_max, 1, geom)
    if not 0 < delta_omega < null_hi:
        raise DomainError(f"delta_omega={delta_omega:g} outside (0, {null_hi:g})")
    if delta_omega < null_lo:
        return sum_power_lower_bound(interval.d_min, delta_omega, geom, cfg)
    return power_at_first_null(delta_omega, geom, cfg)


def _bisect(f_increasing, f_decreasing, lo, hi, tol, max_iter):
    def h(x):
        return f_increasing(x) - f_decreasing(x)

    h_lo, h_hi = h(lo), h(hi)
    if h_lo == 0:
        return lo, 0
    if h_hi == 0:
        return hi, 0
    if (h_lo > 0) == (h_hi > 0):
        raise NoIntersectionError(f"curves do not cross on [{lo:g}, {hi:g}]")
    it = 0
    while it < max_iter:
        it += 1
        mid = 0.5 * (lo + hi)
        h_mid = h(mid)
        if h_mid == 0 or hi - lo <= tol * abs(mid):
            return mid, it
        if (h_mid > 0) == (h_lo > 0):
            lo, h_lo = mid, h_mid
        else:
            hi = mid
    return 0.5 * (lo + hi), it


def find_intersection(f_increasing, f_decreasing, lo, hi, tol=1e-9, max_iter=200):
    """Crossing point of two monotone curves on ``[lo, hi]`` by bisection.

    Raises NoIntersectionError when the difference has no sign change.
    """
    x, _ = _bisect(f_increasing, f_decreasing, lo, hi, tol, max_iter)
    return x


def worst_case_power_two(
    interval: DistanceInterval, delta_omega, geom: LinkGeometry, cfg: RadioConfig, refine=True
) -> WorstCase:
    """Minimum of the envelope bound over the interval at a fixed spacing.

    Candidates are the two endpoints and the farthest envelope null inside
    the interval (the first one whenever ``delta_omega`` is below
    ``null_spacing(d_max, 1)``). The null candidate is the closed form
    `power_at_first_null` when ``refine=False``; by default it is replaced
    by the true local minimum of the bound next to the null.
    """
    if delta_omega < 0:
        raise DomainError("delta_omega must be >= 0")

    def bound(x):
        return sum_power_lower_bound(x, delta_omega, geom, cfg)

    candidates = [
        (bound(interval.d_min), interval.d_min, WorstCaseKind.LOWER_ENDPOINT, None),
        (bound(interval.d_max), interval.d_max, WorstCaseKind.UPPER_ENDPOINT, None),
    ]
    if delta_omega > 0:
        psi_far = delta_omega / C * path_difference(interval.d_max, geom)
        psi_near = delta_omega / C * path_difference(interval.d_min, geom)
        k = max(1, math.ceil(psi_far / (2.0 * math.pi)))
        if 2.0 * math.pi * k <= psi_near:
            d_k = distance_for_path_difference(2.0 * math.pi * k * C / delta_omega, geom)
            if refine:
                d_k, p_k = _refine_null(bound, 2.0 * math.pi * k, delta_omega, interval, geom)
            elif k == 1:
                p_k = power_at_first_null(delta_omega, geom, cfg)
            else:
                p_k = bound(d_k)
            candidates.append((p_k, d_k, WorstCaseKind.LOCAL_MINIMUM, k))
    power, at, kind, k = min(candidates, key=lambda c: c[0])
    return WorstCase(float(power), float(at), kind, k)


def _exact_landmarks(d, geom, cfg):
    null_approx = null_spacing(d, 1, geom)
    peak = exact_peak_spacing(d, geom, cfg, (1e-3 * null_approx, null_approx), kind="max")
    null = exact_peak_spacing(d, geom, cfg, (peak, 1.5 * null_approx), kind="min")
    return peak, null


def optimal_spacing(
    interval: DistanceInterval,
    geom: LinkGeometry,
    cfg: RadioConfig,
    exact_landmarks=False,
    tol=1e-9,
    max_iter=200,
) -> SpacingSolution:
    """Spacing between the carriers that maximizes the worst-case bound.

    Landmarks are the first envelope peak and null spacings at both ends of
    the interval. If the bound at ``d_max`` stays below `g` even at its own
    peak, that peak is the answer; otherwise the crossing of the two curves
    is bracketed either below the ``d_min`` null spacing (against the bound
    at ``d_min``) or above it (against the first-null power).
    """
    d_min, d_max = interval.d_min, interval.d_max
    if exact_landmarks:
        peak_lo, null_lo = _exact_landmarks(d_min, geom, cfg)
        peak_hi, null_hi = _exact_landmarks(d_max, geom, cfg)
    else:
        peak_lo, peak_hi = peak_spacing(d_min, 0, geom), peak_spacing(d_max, 0, geom)
        null_lo, null_hi = null_spacing(d_min, 1, geom), null_spacing(d_max, 1, geom)

    def bound_far(x):
        return sum_power_lower_bound(d_max, x, geom, cfg)

    def bound_near(x):
        return sum_power_lower_bound(d_min, x, geom, cfg)

    def first_null(x):
        return power_at_first_null(x, geom, cfg)

    # past the d_max peak the d_max bound decreases again, so never search beyond it
    upper = min(null_hi, peak_hi)
    brackets = {
        Branch.INTERSECT_BELOW_FIRST_NULL: (bound_near, peak_lo, null_lo),
        Branch.INTERSECT_BETWEEN_NULLS: (first_null, null_lo, upper),
    }

    if bound_far(peak_hi) < g(peak_hi, interval, geom, cfg):
        branch, dw, iterations = Branch.NO_INTERSECTION, peak_hi, 0
    else:
        # ties go to the second bracket
        if bound_far(null_lo) > bound_near(null_lo):
            order = [Branch.INTERSECT_BELOW_FIRST_NULL, Branch.INTERSECT_BETWEEN_NULLS]
        else:
            order = [Branch.INTERSECT_BETWEEN_NULLS, Branch.INTERSECT_BELOW_FIRST_NULL]
        for branch in order:
            f_dec, lo, hi = brackets[branch]
            try:
                dw, iterations = _bisect(bound_far, f_dec, lo, hi, tol, max_iter)
                break
            except NoIntersectionError:
                logger.warning("no crossing in %s bracket, trying the next one", branch.value)
        else:
            logger.warning("no crossing found; falling back to the d_max envelope peak")
            branch, dw, iterations = Branch.NO_INTERSECTION, peak_hi, 0

    delta_f = dw / (2.0 * math.pi)
    if delta_f > cfg.f1 / 4.0:
        warnings.warn(
            f"optimal spacing {delta_f:.4g} Hz exceeds a quarter of f1={cfg.f1:.4g} Hz; "
            "the landmark approximations lose accuracy here (consider exact_landmarks=True)",
            RuntimeWarning,
            stacklevel=2,
        )
    worst = worst_case_power_two(interval, dw, geom, cfg)
    return SpacingSolution(
        delta_omega_star=float(dw),
        delta_f_star=float(delta_f),
        worst_case_power=worst.power,
        branch=branch,
        iterations=iterations,
        peak_at_d_min=float(peak_lo),
        peak_at_d_max=float(peak_hi),
        null_at_d_min=float(null_lo),
        null_at_d_max=float(null_hi),
    )
