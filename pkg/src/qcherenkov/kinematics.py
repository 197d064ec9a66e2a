"""
Electron and photon states, momentum conservation and transverse geometry.

Momenta are 3-vectors in electron masses, the electron mass is 1, and the
photon obeys |k| = n(omega) omega inside the medium. Conservation p = p' + k
is imposed by building the outgoing electron as p - k.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidTriangle, NoCherenkov

TWO_PI = 2 * math.pi


def _vec(v):
    a = np.array(v, dtype=float).reshape(3)
    a.setflags(write=False)
    return a


def wrap_angle(x):
    """Reduce an angle to [0, 2pi)."""
    r = math.fmod(x, TWO_PI)
    if r < 0:
        r += TWO_PI
    return 0.0 if r >= TWO_PI else r


def wrap_signed(x):
    """Reduce an angle to (-pi, pi]."""
    r = math.remainder(x, TWO_PI)
    return math.pi if r == -math.pi else r


class Configuration(enum.Enum):
    """Which of the two mirror-image transverse triangles is realised."""

    PLUS = 1
    MINUS = -1

    @property
    def sign(self):
        return self.value

    def flipped(self):
        return Configuration(-self.value)


def _check_helicity(lam):
    if lam not in (0.5, -0.5):
        raise ValueError(f"electron helicity must be +-1/2, got {lam!r}")


@dataclass(frozen=True)
class ElectronState:
    p: np.ndarray
    helicity: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "p", _vec(self.p))
        _check_helicity(self.helicity)

    @classmethod
    def from_speed(cls, beta, direction=(0.0, 0.0, 1.0), helicity=0.5):
        if not 0 <= beta < 1:
            raise ValueError(f"speed must lie in [0, 1), got {beta!r}")
        d = np.asarray(direction, dtype=float)
        d = d / np.linalg.norm(d)
        return cls(beta / math.sqrt((1 - beta) * (1 + beta)) * d, helicity)

    @property
    def momentum(self):
        return float(np.linalg.norm(self.p))

    @property
    def energy(self):
        return math.sqrt(1.0 + float(self.p @ self.p))

    @property
    def gamma(self):
        return self.energy

    @property
    def velocity(self):
        return self.p / self.energy

    @property
    def speed(self):
        return self.momentum / self.energy

    @property
    def p_perp(self):
        return math.hypot(self.p[0], self.p[1])

    @property
    def polar(self):
        return math.atan2(self.p_perp, self.p[2])

    @property
    def azimuth(self):
        return math.atan2(self.p[1], self.p[0])


@dataclass(frozen=True)
class PhotonState:
    """Photon of wave vector ``k`` in a medium of index ``n`` (taken at its own omega)."""

    k: np.ndarray
    n: float
    helicity: int = 1

    def __post_init__(self):
        object.__setattr__(self, "k", _vec(self.k))
        if self.helicity not in (1, -1):
            raise ValueError(f"photon helicity must be +-1, got {self.helicity!r}")
        if not self.n > 0:
            raise ValueError("refractive index must be positive")

    @classmethod
    def from_frequency(cls, omega, theta, phi, medium, helicity=1):
        n = medium.index(omega)
        kk = n * omega
        s = math.sin(theta)
        k = (kk * s * math.cos(phi), kk * s * math.sin(phi), kk * math.cos(theta))
        return cls(k, n, helicity)

    @classmethod
    def from_wavevector(cls, k, medium, helicity=1, tol=1e-12, max_iter=200):
        """Solve |k| = n(omega) omega for omega by fixed-point iteration from omega = |k|."""
        kk = float(np.linalg.norm(k))
        omega = kk
        for _ in range(max_iter):
            new = kk / medium.index(omega)
            if abs(new - omega) <= tol * new:
                omega = new
                break
            omega = new
        else:
            raise RuntimeError("dispersion relation iteration did not converge")
        return cls(k, kk / omega, helicity)

    @property
    def wavenumber(self):
        return float(np.linalg.norm(self.k))

    @property
    def omega(self):
        return self.wavenumber / self.n

    @property
    def direction(self):
        return self.k / self.wavenumber

    @property
    def velocity(self):
        return self.direction / self.n

    @property
    def k_perp(self):
        return math.hypot(self.k[0], self.k[1])

    @property
    def polar(self):
        return math.atan2(self.k_perp, self.k[2])

    @property
    def azimuth(self):
        return math.atan2(self.k[1], self.k[0])


@dataclass(frozen=True)
class TriangleGeometry:
    """Triangle formed by the transverse momenta, p_perp = pp_perp + k_perp.

    ``alpha`` is the angle between p_perp and pp_perp, ``gamma`` the angle
    between p_perp and k_perp, ``beta`` the remaining interior angle.
    """

    p_perp: float
    pp_perp: float
    k_perp: float
    area: float
    alpha: float
    beta: float
    gamma: float
    valid: bool


def _triangle_area(a, b, c):
    # Kahan's cancellation-free form of Heron's formula.
    a, b, c = sorted((a, b, c), reverse=True)
    prod = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
    return 0.25 * math.sqrt(max(prod, 0.0))


def _cos_numerator(x, y, z):
    # x^2 + y^2 - z^2 with the cancelling pair written as (y - z)(y + z)
    if abs(y - z) > abs(x - z):
        x, y = y, x
    return x * x + (y - z) * (y + z)


def triangle_decompose(p_perp, pp_perp, k_perp):
    """Area and interior angles of the transverse-momentum triangle.

    Each angle is taken as atan2(sin, cos) with sin from the area, which is
    the arccos of the law-of-cosines ratio without its loss of precision near
    0 and pi. Collinear (degenerate) legs are valid with zero area.
    """
    sides = (p_perp, pp_perp, k_perp)
    if min(sides) < 0:
        raise ValueError("transverse magnitudes must be non-negative")
    valid = (
        p_perp <= pp_perp + k_perp
        and pp_perp <= p_perp + k_perp
        and k_perp <= p_perp + pp_perp
    )
    if not valid:
        nan = float("nan")
        return TriangleGeometry(p_perp, pp_perp, k_perp, 0.0, nan, nan, nan, False)
    area = _triangle_area(*sides)
    four = 4 * area
    alpha = math.atan2(four, _cos_numerator(p_perp, pp_perp, k_perp))
    beta = math.atan2(four, _cos_numerator(k_perp, pp_perp, p_perp))
    gamma = math.atan2(four, _cos_numerator(p_perp, k_perp, pp_perp))
    return TriangleGeometry(p_perp, pp_perp, k_perp, area, alpha, beta, gamma, True)


def resolve_azimuths(tri, phi_prime, configuration=Configuration.PLUS):
    """Azimuths (phi, phi_gamma) of p_perp and k_perp given that of pp_perp."""
    if not tri.valid:
        raise InvalidTriangle(
            f"legs ({tri.p_perp}, {tri.pp_perp}, {tri.k_perp}) do not close a triangle"
        )
    s = Configuration(configuration).sign
    phi = phi_prime + s * tri.alpha
    phi_gamma = phi + s * tri.gamma
    return wrap_angle(phi), wrap_angle(phi_gamma)


def cherenkov_angle_classical(beta, n):
    """Classical Cherenkov angle arccos(1/(beta n)).

    >>> round(math.degrees(cherenkov_angle_classical(0.7, 1.5)), 2)
    17.75
    """
    if not beta * n > 1:
        raise NoCherenkov(f"beta*n = {beta * n!r} <= 1")
    return math.acos(1.0 / (beta * n))


def cherenkov_angle_recoil(beta, n, omega, energy):
    """Cherenkov angle including the photon recoil correction of order omega/energy."""
    bn = beta * n
    cos_t = 1.0 / bn + (omega / (2 * energy)) * (n * n - 1) / bn
    if not bn > 1 or cos_t > 1:
        raise NoCherenkov(f"cos(theta) = {cos_t!r} for beta*n = {bn!r}")
    return math.acos(cos_t)


def cutoff_frequency(energy, beta, n):
    """Highest photon energy 2 eps (beta n - 1)/(n^2 - 1) allowed by recoil."""
    if n <= 1 or beta * n < 1:
        raise NoCherenkov(f"no emission for beta={beta!r}, n={n!r}")
    return 2 * energy * (beta * n - 1) / (n * n - 1)


@dataclass(frozen=True)
class EmissionKinematics:
    """One emission event p -> p' + k with helicities, p' = p - k."""

    electron_in: ElectronState
    electron_out: ElectronState
    photon: PhotonState

    @classmethod
    def from_momenta(cls, p, k, medium, helicity=0.5, helicity_out=0.5, photon_helicity=1):
        photon = PhotonState.from_wavevector(k, medium, photon_helicity)
        p = _vec(p)
        return cls(ElectronState(p, helicity), ElectronState(p - photon.k, helicity_out), photon)

    @classmethod
    def on_triangle(
        cls,
        speed,
        p_perp,
        pp_perp,
        theta,
        omega,
        medium,
        phi_prime=0.0,
        configuration=Configuration.PLUS,
        helicity=0.5,
        helicity_out=0.5,
        photon_helicity=1,
    ):
        """Build the event from the transverse triangle.

        The incoming electron has speed ``speed`` and transverse momentum
        ``p_perp``; the photon has lab polar angle ``theta`` and frequency
        ``omega``; the outgoing electron's transverse momentum has magnitude
        ``pp_perp`` and azimuth ``phi_prime``. Raises InvalidTriangle when the
        three transverse magnitudes cannot close.
        """
        n = medium.index(omega)
        k_perp = n * omega * math.sin(theta)
        tri = triangle_decompose(p_perp, pp_perp, k_perp)
        phi, phi_gamma = resolve_azimuths(tri, phi_prime, configuration)
        pmag = speed / math.sqrt((1 - speed) * (1 + speed))
        if p_perp > pmag:
            raise ValueError("transverse momentum exceeds total momentum")
        p_z = math.sqrt((pmag - p_perp) * (pmag + p_perp))
        p = (p_perp * math.cos(phi), p_perp * math.sin(phi), p_z)
        k = (k_perp * math.cos(phi_gamma), k_perp * math.sin(phi_gamma), n * omega * math.cos(theta))
        photon = PhotonState(k, n, photon_helicity)
        p = _vec(p)
        return cls(ElectronState(p, helicity), ElectronState(p - photon.k, helicity_out), photon)

    def with_helicities(self, helicity=None, helicity_out=None, photon_helicity=None):
        e_in, e_out, ph = self.electron_in, self.electron_out, self.photon
        if helicity is not None:
            e_in = ElectronState(e_in.p, helicity)
        if helicity_out is not None:
            e_out = ElectronState(e_out.p, helicity_out)
        if photon_helicity is not None:
            ph = PhotonState(ph.k, ph.n, photon_helicity)
        return EmissionKinematics(e_in, e_out, ph)

    @property
    def n(self):
        return self.photon.n

    @property
    def omega(self):
        return self.photon.omega

    @property
    def theta(self):
        """Angle between p and k."""
        p, k = self.electron_in.p, self.photon.k
        return math.atan2(float(np.linalg.norm(np.cross(p, k))), float(p @ k))

    @property
    def delta_e(self):
        """Energy mismatch eps(p) - eps(p') - omega of the partial wave."""
        return self.electron_in.energy - self.electron_out.energy - self.omega

    @property
    def triangle(self):
        return triangle_decompose(
            self.electron_in.p_perp, self.electron_out.p_perp, self.photon.k_perp
        )

    @property
    def configuration(self):
        """PLUS when p_perp lies counter-clockwise of pp_perp, else MINUS."""
        a, b = self.electron_out.p, self.electron_in.p
        cross = a[0] * b[1] - a[1] * b[0]
        return Configuration.PLUS if cross >= 0 else Configuration.MINUS


@dataclass(frozen=True)
class ElectronPacket:
    """Gaussian electron packet psi(p) ~ exp(-(p - p0)^2 / (2 sigma^2))."""

    mean_momentum: np.ndarray
    sigma: float
    helicity: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "mean_momentum", _vec(self.mean_momentum))
        if not self.sigma > 0:
            raise ValueError("momentum width must be positive")
        _check_helicity(self.helicity)

    @property
    def sigma_x(self):
        """Rms size 1/sigma in units of 1/m."""
        return 1.0 / self.sigma

    def wave_function(self, p):
        """Amplitude normalised to one with the measure d^3p/(2 pi)^3."""
        d = np.asarray(p, dtype=float) - self.mean_momentum
        norm = (2 * math.sqrt(math.pi) / self.sigma) ** 1.5
        return norm * math.exp(-float(d @ d) / (2 * self.sigma**2))
