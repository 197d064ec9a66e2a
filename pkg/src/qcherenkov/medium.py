"""
Refractive-index models.

Two models are offered: a constant index and a table of (omega, n) pairs
interpolated with a monotone cubic (PCHIP) so that dn/domega carries no
spurious oscillations. Frequencies are in electron masses; tables on disk
use eV.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import OutOfRange
from .units import ev_to_natural

# Soft limit on (omega/n) dn/domega above which a point is flagged as not
# weakly dispersive. Project choice; only "much less than one" is known.
WEAK_DISPERSION_THRESHOLD = 0.1


@dataclass(frozen=True)
class ConstantMedium:
    n: float

    def __post_init__(self):
        if not self.n > 0:
            raise ValueError(f"refractive index must be positive, got {self.n}")

    def index(self, omega):
        return float(self.n)


@dataclass(frozen=True)
class TabulatedMedium:
    """Index table ``n(omega)`` with ``omega`` strictly increasing (electron masses)."""

    omega: tuple
    n: tuple
    _interp: PchipInterpolator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        w = np.asarray(self.omega, dtype=float)
        n = np.asarray(self.n, dtype=float)
        if w.ndim != 1 or w.shape != n.shape or w.size < 2:
            raise ValueError("need at least two (omega, n) pairs of equal length")
        if np.any(np.diff(w) <= 0):
            raise ValueError("omega values must be strictly increasing")
        if np.any(n <= 0):
            raise ValueError("refractive index values must be positive")
        object.__setattr__(self, "omega", tuple(w))
        object.__setattr__(self, "n", tuple(n))
        object.__setattr__(self, "_interp", PchipInterpolator(w, n, extrapolate=False))

    @property
    def bounds(self):
        return self.omega[0], self.omega[-1]

    def index(self, omega):
        lo, hi = self.bounds
        if not lo <= omega <= hi:
            raise OutOfRange(f"omega={omega!r} outside table range [{lo!r}, {hi!r}]")
        return float(self._interp(omega))

    @classmethod
    def from_file(cls, path):
        """Load a two-column text table (omega in eV, n); '#' starts a comment."""
        data = np.loadtxt(path, comments="#", ndmin=2)
        if data.shape[1] != 2:
            raise ValueError(f"{path}: expected two columns, got {data.shape[1]}")
        return cls(tuple(ev_to_natural(data[:, 0])), tuple(data[:, 1]))


def refractive_index(medium, omega):
    return medium.index(omega)


def weak_dispersion_metric(medium, omega):
    """Return (omega/n) dn/domega.

    Constant media give exactly 0. For tables the derivative is a central
    difference on the interpolant; ``omega`` must lie strictly inside the table.
    """
    if isinstance(medium, ConstantMedium):
        return 0.0
    lo, hi = medium.bounds
    if not lo < omega < hi:
        raise OutOfRange(f"omega={omega!r} not interior to table range [{lo!r}, {hi!r}]")
    h = min(1e-6 * (hi - lo), 0.5 * (omega - lo), 0.5 * (hi - omega))
    dn = (medium.index(omega + h) - medium.index(omega - h)) / (2 * h)
    return omega / medium.index(omega) * dn


def is_weakly_dispersive(medium, omega, threshold=WEAK_DISPERSION_THRESHOLD):
    return abs(weak_dispersion_metric(medium, omega)) <= threshold
