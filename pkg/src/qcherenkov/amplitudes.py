"""
Tree-level helicity amplitudes of p -> p' + k and their dynamic phase.

The amplitude is g * sum_ch M_ch exp(i zeta_ch) over the four spin-projection
channels (s, s', s_gamma) with s = s' + s_gamma. Each M_ch is a product of
small Wigner d-functions of the lab polar angles of p, p' and k, and each
zeta_ch a combination of the azimuths.
"""

import math
from dataclasses import dataclass

from .kinematics import wrap_signed
from .units import FINE_STRUCTURE

ZERO_AMPLITUDE = 1e-300
SQRT2 = math.sqrt(2.0)


def wigner_d_half(sigma, lam, theta):
    """Spin-1/2 small d-function d_{sigma lam}(theta).

    >>> wigner_d_half(0.5, -0.5, math.pi)
    -1.0
    """
    if sigma == lam:
        return math.cos(theta / 2)
    return -2 * sigma * math.sin(theta / 2)


def wigner_d_one(sigma_g, lam_g, theta):
    """Spin-1 small d-function d_{sigma_g lam_g}(theta) for lam_g = +-1."""
    if sigma_g == lam_g:
        return math.cos(theta / 2) ** 2
    if sigma_g == -lam_g:
        return math.sin(theta / 2) ** 2
    return lam_g / SQRT2 * math.sin(theta)


def g_factor(lam, lam_out, energy, energy_out):
    """Overall coupling sqrt(4 pi alpha)(2 lam sqrt(e-1) sqrt(e'+1) + 2 lam' sqrt(e'-1) sqrt(e+1))."""
    a = 2 * lam * math.sqrt(max(energy - 1, 0.0)) * math.sqrt(energy_out + 1)
    b = 2 * lam_out * math.sqrt(max(energy_out - 1, 0.0)) * math.sqrt(energy + 1)
    return math.sqrt(4 * math.pi * FINE_STRUCTURE) * (a + b)


@dataclass(frozen=True)
class HelicityChannel:
    sigma: float
    sigma_out: float
    sigma_gamma: int
    amplitude: float
    phase: float


@dataclass(frozen=True)
class AmplitudePolar:
    modulus: float
    phase: float
    g_factor: float
    zero: bool = False


# (sigma, sigma', sigma_gamma, coefficient, sign of zeta_1 or zeta_2)
_CHANNELS = (
    (0.5, -0.5, 1, SQRT2, 1, 1),
    (0.5, 0.5, 0, -1.0, 2, 1),
    (-0.5, 0.5, -1, -SQRT2, 1, -1),
    (-0.5, -0.5, 0, 1.0, 2, -1),
)


def channels_from_angles(theta, theta_out, theta_gamma, dphi, dphi_gamma, lam, lam_out, lam_g):
    """The four channels from polar angles and the azimuth differences.

    ``dphi`` is phi - phi' and ``dphi_gamma`` is phi_gamma - phi, both in
    (-pi, pi]. Writing the phases through differences keeps them continuous
    across the 2 pi seam of the individual azimuths.
    """
    zeta1 = dphi_gamma + 0.5 * dphi
    zeta2 = -0.5 * dphi
    out = []
    for s, s_out, s_g, coef, which, sign in _CHANNELS:
        m = (
            coef
            * wigner_d_half(s, lam, theta)
            * wigner_d_half(s_out, lam_out, theta_out)
            * wigner_d_one(s_g, lam_g, theta_gamma)
        )
        out.append(HelicityChannel(s, s_out, s_g, m, sign * (zeta1 if which == 1 else zeta2)))
    return out


def _angles(kin):
    e_in, e_out, ph = kin.electron_in, kin.electron_out, kin.photon
    dphi = wrap_signed(e_in.azimuth - e_out.azimuth)
    dphi_g = wrap_signed(ph.azimuth - e_in.azimuth)
    return e_in.polar, e_out.polar, ph.polar, dphi, dphi_g


def channel_amplitudes(kin):
    """The four (M, zeta) channel pairs of an emission event."""
    return channels_from_angles(
        *_angles(kin),
        kin.electron_in.helicity,
        kin.electron_out.helicity,
        kin.photon.helicity,
    )


def channel_sum(channels):
    """Real and imaginary parts of sum M exp(i zeta)."""
    re = sum(c.amplitude * math.cos(c.phase) for c in channels)
    im = sum(c.amplitude * math.sin(c.phase) for c in channels)
    return re, im


def polar_from_channels(channels, g):
    re, im = channel_sum(channels)
    modulus = abs(g) * math.hypot(re, im)
    if modulus < ZERO_AMPLITUDE:
        return AmplitudePolar(modulus, float("nan"), g, True)
    return AmplitudePolar(modulus, math.atan2(im, re), g, False)


def amplitude_polar(kin):
    """Modulus |g sum M e^{i zeta}| and phase atan2(sum M sin zeta, sum M cos zeta).

    The phase is that of the channel sum; it lies in (-pi, pi] and is NaN
    (with ``zero`` set) where the amplitude vanishes.
    """
    g = g_factor(
        kin.electron_in.helicity,
        kin.electron_out.helicity,
        kin.electron_in.energy,
        kin.electron_out.energy,
    )
    return polar_from_channels(channel_amplitudes(kin), g)


def modulus_sq_interference(channels, g=1.0):
    """|M|^2 as the sum of squares plus pairwise cos(zeta_i - zeta_j) interference terms."""
    total = 0.0
    for i, a in enumerate(channels):
        total += a.amplitude**2
        for b in channels[i + 1 :]:
            total += 2 * a.amplitude * b.amplitude * math.cos(a.phase - b.phase)
    return g * g * total
