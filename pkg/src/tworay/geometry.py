"""Flat-ground two-ray geometry: path lengths, path difference, phase shift.

All lengths are in meters and all frequencies are angular (rad/s). Every
function accepts scalar or array distances and returns the same shape.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact


@dataclass(frozen=True)
class LinkGeometry:
    """Antenna heights above a flat reflecting ground."""

    h_tx: float
    h_rx: float

    def __post_init__(self):
        for name in ("h_tx", "h_rx"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise DomainError(f"{name} must be positive and finite, got {value!r}")

    @property
    def height_product(self):
        return self.h_tx * self.h_rx


class PathLengths(NamedTuple):
    los: np.ndarray
    reflected: np.ndarray


def check_distance(d, *, strictly_positive=False):
    """Return `d` as a float array, raising DomainError on bad entries."""
    d = np.asarray(d, dtype=float)
    if not np.all(np.isfinite(d)):
        raise DomainError("distance must be finite")
    if strictly_positive and np.any(d <= 0):
        raise DomainError("distance must be > 0")
    if np.any(d < 0):
        raise DomainError("distance must be >= 0")
    return d


def _scalar_or_array(x):
    return x.item() if isinstance(x, np.ndarray) and x.ndim == 0 else x


def path_lengths(d, geom: LinkGeometry) -> PathLengths:
    """Line-of-sight and ground-reflected path lengths at ground distance `d`."""
    d = check_distance(d)
    los = np.hypot(geom.h_tx - geom.h_rx, d)
    reflected = np.hypot(geom.h_tx + geom.h_rx, d)
    return PathLengths(_scalar_or_array(los), _scalar_or_array(reflected))


def path_difference(d, geom: LinkGeometry):
    """Reflected minus line-of-sight length.

    Evaluated as ``4 h_tx h_rx / (reflected + los)``, which equals the plain
    difference but keeps full precision when both paths are long.
    """
    los, reflected = path_lengths(d, geom)
    return 4.0 * geom.height_product / (np.asarray(los) + reflected)


def distance_for_path_difference(delta, geom: LinkGeometry):
    """Ground distance at which the path difference equals `delta`.

    Inverse of `path_difference`. Values of `delta` at or above the
    difference at d=0 (``2 min(h_tx, h_rx)``) map to 0.
    """
    delta = np.asarray(delta, dtype=float)
    if np.any(delta <= 0):
        raise DomainError("path difference must be > 0")
    los = 0.5 * (4.0 * geom.height_product / delta - delta)
    d_sq = los * los - (geom.h_tx - geom.h_rx) ** 2
    return _scalar_or_array(np.sqrt(np.maximum(d_sq, 0.0)))


def phase_shift(d, omega, geom: LinkGeometry):
    """Phase lag of the reflected ray relative to the direct ray, in radians."""
    if not omega > 0:
        raise DomainError("omega must be > 0")
    return _scalar_or_array(omega / SPEED_OF_LIGHT * path_difference(d, geom))


def max_phase_shift(omega, geom: LinkGeometry):
    """Phase shift at d=0, the supremum over all distances."""
    if not omega > 0:
        raise DomainError("omega must be > 0")
    return 2.0 * omega * min(geom.h_tx, geom.h_rx) / SPEED_OF_LIGHT
