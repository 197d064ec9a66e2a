"""
Natural-unit bookkeeping.

Internally hbar = c = 1 and energies, momenta and inverse lengths are measured
in electron masses. Times and lengths are then measured in 1/m, i.e. in
hbar/(m c^2) ~ 1.29e-21 s and hbar/(m c) ~ 3.86e-13 m. Conversion to SI
happens only at the presentation boundary.
"""

from dataclasses import dataclass

from scipy import constants as _c

FINE_STRUCTURE = 1 / 137.035999


@dataclass(frozen=True)
class UnitSystem:
    electron_mass_eV: float
    compton_length_m: float
    compton_time_s: float

    @property
    def compton_length_cm(self):
        return self.compton_length_m * 100.0


def _codata():
    mass_ev = _c.physical_constants["electron mass energy equivalent in MeV"][0] * 1e6
    length = _c.hbar / (_c.m_e * _c.c)
    return UnitSystem(mass_ev, length, length / _c.c)


NATURAL = _codata()


def to_seconds(t):
    """Convert a time in units of 1/m to seconds."""
    return t * NATURAL.compton_time_s


def from_seconds(t_s):
    return t_s / NATURAL.compton_time_s


def to_attoseconds(t):
    return to_seconds(t) * 1e18


def from_attoseconds(t_as):
    return from_seconds(t_as * 1e-18)


def to_picoseconds(t):
    return to_seconds(t) * 1e12


def to_meters(x):
    """Convert a length in units of 1/m to meters."""
    return x * NATURAL.compton_length_m


def from_meters(x_m):
    return x_m / NATURAL.compton_length_m


def to_nanometers(x):
    return to_meters(x) * 1e9


def from_nanometers(x_nm):
    return from_meters(x_nm * 1e-9)


def ev_to_natural(energy_ev):
    """Energy in eV to electron masses."""
    return energy_ev / NATURAL.electron_mass_eV


def natural_to_ev(energy):
    return energy * NATURAL.electron_mass_eV


def sigma_from_length(sigma_x_m):
    """Momentum width (electron masses) of a packet with rms size ``sigma_x_m`` meters.

    >>> round(sigma_from_length(10e-9), 8)
    3.862e-05
    """
    return 1.0 / from_meters(sigma_x_m)


def length_from_sigma(sigma):
    """Inverse of :func:`sigma_from_length`, in meters."""
    return to_meters(1.0 / sigma)
