"""
Closed-form time and length scales of the emitted photon.

Everything is expressed through the electron velocity u_p, the photon group
velocity u_k (|u_k| = 1/n), the packet momentum width sigma and the energies
omega, eps. The arrival-time shift additionally needs the momentum gradient
of the amplitude phase, which is taken by finite differences.
"""

import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import bisect

from .amplitudes import ZERO_AMPLITUDE, channel_sum, channels_from_angles
from .errors import (
    DegenerateGeometry,
    DomainError,
    InconsistentGradient,
    NoCherenkov,
    StencilInvalid,
    ZeroAmplitude,
)
from .kinematics import cherenkov_angle_classical, wrap_signed
from .units import to_attoseconds

# Richardson self-consistency levels for the phase gradient.
GRADIENT_PASS = 1e-6
GRADIENT_INCONSISTENT = 1e-4


def _split(u_p, u_k):
    u_p = np.asarray(u_p, dtype=float)
    u_k = np.asarray(u_k, dtype=float)
    w = u_p - u_k
    cr = np.cross(u_p, u_k)
    return u_p, u_k, w, float(w @ w), cr, float(cr @ cr)


def _denominator_parts(u_p, u_k, n):
    """Return (q, D, S - D) with q = 1/n - u_p.l, D = (u_p - u_k)^2, S = [u_p x u_k]^2.

    With h = sin^2(theta/2) and u = |u_p|,
        q = (1/n - u) + 2 u h,
        D = (u - 1/n)^2 + 4 (u/n) h,
        S - D = -(u - 1/n)^2 - 4 (u/n) h (1 - (u/n)(1 - h)),
    which keep full relative precision near theta = 0 and beta n = 1.
    """
    u_p = np.asarray(u_p, dtype=float)
    l = np.asarray(u_k, dtype=float)
    l = l / np.linalg.norm(l)
    speed = float(np.linalg.norm(u_p))
    theta = math.atan2(float(np.linalg.norm(np.cross(u_p, l))), float(u_p @ l))
    h = math.sin(0.5 * theta) ** 2
    gap = speed - 1.0 / n
    ratio = speed / n
    q = 2 * speed * h - gap
    d = gap * gap + 4 * ratio * h
    s_minus_d = -(gap * gap) - 4 * ratio * h * (1 - ratio * (1 - h))
    return q, d, s_minus_d


def spreading_time(u_p, u_k, sigma, omega, energy, n):
    """Spreading time t_d of the photon field.

    t_d = (2/sigma^2) D / [(1/(omega n^2) - 1/eps) D + (1/eps - 1/omega) S]
    with D = (u_p - u_k)^2 and S = [u_p x u_k]^2. The bracket is evaluated
    as q^2/(omega n^2) + (S - D)/eps, q = 1/n - u_p cos(theta), an identical
    rearrangement that avoids subtracting two terms of order 1/omega.
    Returns a signed infinity where the bracket vanishes. If also D = 0
    (u_p = u_k, only possible head-on at beta n = 1) the theta -> 0 limit,
    the axial time, is returned.
    """
    q, d, s_minus_d = _denominator_parts(u_p, u_k, n)
    den = q * q / (omega * n * n) + s_minus_d / energy
    num = 2.0 / sigma**2 * d
    if den == 0:
        if num == 0:
            return axial_spreading_time(sigma, omega, energy, n)
        return math.copysign(math.inf, num)
    return num / den


def velocities(theta, speed, n):
    """Velocity vectors with u_p along z and the photon at angle theta in the xz plane."""
    u_p = np.array([0.0, 0.0, speed])
    u_k = np.array([math.sin(theta), 0.0, math.cos(theta)]) / n
    return u_p, u_k


def spreading_time_at(theta, speed, sigma, omega, energy, n):
    return spreading_time(*velocities(theta, speed, n), sigma, omega, energy, n)


def axial_spreading_time(sigma, omega, energy, n):
    """Second spreading time (2/sigma^2) omega n^2/(1 - n^2 omega/eps), equal to t_d at theta = 0."""
    return 2.0 / sigma**2 * omega * n * n / (1 - n * n * omega / energy)


def inverse_tau_d_sq(t_d, t_d_axial, sigma, omega, energy):
    """1/tau_d^2 = (sigma^2/2)(1/eps - 1/omega)(1/t_d + 1/t~_d); finite for infinite t_d."""
    return 0.5 * sigma**2 * (1 / energy - 1 / omega) * (1 / t_d + 1 / t_d_axial)


def tau_d_squared(t_d, t_d_axial, sigma, omega, energy):
    """tau_d^2 = (2/sigma^2) t_d t~_d / ((1/eps - 1/omega)(t_d + t~_d)); may be negative."""
    inv = inverse_tau_d_sq(t_d, t_d_axial, sigma, omega, energy)
    return math.inf if inv == 0 else 1 / inv


def formation_length(speed, t_d):
    return speed * abs(t_d)


@dataclass(frozen=True)
class ThetaInfinity:
    """Angles where t_d diverges: small-recoil approximation and exact roots."""

    approx: tuple
    exact: tuple

    @property
    def gap(self):
        return self.exact[1] - self.exact[0]

    @property
    def approx_gap(self):
        return self.approx[1] - self.approx[0]


def _axis_denominator(theta, speed, omega, energy, n):
    """Denominator of t_d for u_p along z, vectorised over the emission angle."""
    h = np.sin(0.5 * np.asarray(theta)) ** 2
    gap = speed - 1.0 / n
    ratio = speed / n
    q = 2 * speed * h - gap
    s_minus_d = -(gap * gap) - 4 * ratio * h * (1 - ratio * (1 - h))
    return q * q / (omega * n * n) + s_minus_d / energy


def theta_infinity(beta, n, omega, energy, grid=10_000):
    """Emission angles (theta_-, theta_+) at which t_d changes sign through infinity.

    The approximate pair is cos = (1 -+ sqrt(omega/eps) sqrt((n^2-1)(beta^2 n^2-1)))/(beta n).
    The exact pair is found by bisection of the denominator of t_d. The
    denominator is negative at the classical Cherenkov angle, so each root is
    bracketed between that angle and the nearest point of a uniform grid on
    (0, pi) where the denominator is positive. NaN marks a missing root.
    """
    theta_ch = cherenkov_angle_classical(beta, n)
    bn = beta * n
    root = math.sqrt(omega / energy) * math.sqrt((n * n - 1) * (bn * bn - 1))
    approx = []
    for cos_t in ((1 + root) / bn, (1 - root) / bn):
        approx.append(math.acos(cos_t) if -1 <= cos_t <= 1 else math.nan)

    def den(t):
        return float(_axis_denominator(t, beta, omega, energy, n))

    nodes = np.linspace(0.0, math.pi, grid + 1)
    values = _axis_denominator(nodes, beta, omega, energy, n)
    exact = []
    for side in (nodes < theta_ch, nodes > theta_ch):
        idx = np.flatnonzero(side & (values > 0))
        if idx.size == 0:
            exact.append(math.nan)
            continue
        j = idx[-1] if side[0] else idx[0]
        a, b = sorted((float(nodes[j]), theta_ch))
        exact.append(bisect(den, a, b, xtol=1e-16, rtol=1e-15, maxiter=200))
    return ThetaInfinity(tuple(approx), tuple(exact))


@functools.lru_cache(maxsize=256)
def _cached_theta_infinity(beta, n, omega, energy):
    return theta_infinity(beta, n, omega, energy)


def mach_angle(theta, u_p, u_k):
    """Mach-cone angle pi - arcsin(sin(theta) / (n |u_k - u_p|)) with n = 1/|u_k|."""
    u_p = np.asarray(u_p, dtype=float)
    u_k = np.asarray(u_k, dtype=float)
    n = 1.0 / np.linalg.norm(u_k)
    arg = math.sin(theta) / (n * float(np.linalg.norm(u_k - u_p)))
    if arg > 1:
        if arg - 1 > 1e-12:
            raise DomainError(f"arcsin argument {arg!r} exceeds 1")
        arg = 1.0
    return math.pi - math.asin(arg)


def sigma_x(t_prime, sigma, t_d):
    """Packet rms size sigma^-1 sqrt(1 + (t'/t_d)^2)."""
    return math.sqrt(1 + (t_prime / t_d) ** 2) / sigma


def correlation_terms(R, u_p, u_k):
    """X = [R x w]^2/D and Y = (R.[u_p x u_k])^2/D with w = u_p - u_k."""
    R = np.asarray(R, dtype=float)
    _, _, w, d, cr, _ = _split(u_p, u_k)
    rw = np.cross(R, w)
    return float(rw @ rw) / d, float(R @ cr) ** 2 / d


def correlation_radius_sq(R, t_prime, u_p, u_k, sigma, omega, energy):
    """R^2/R_eff^2(t'): minus the real part of the exponent of the time integrand.

    Zero at t' = 0 for R along u_k - u_p.
    """
    n = 1.0 / float(np.linalg.norm(u_k))
    t_d = spreading_time(u_p, u_k, sigma, omega, energy, n)
    t_ax = axial_spreading_time(sigma, omega, energy, n)
    x, y = correlation_terms(R, u_p, u_k)
    spread = t_prime**2 * inverse_tau_d_sq(t_d, t_ax, sigma, omega, energy)
    spread /= 1 + (t_prime / t_ax) ** 2
    return (x + spread * y) / sigma_x(t_prime, sigma, t_d) ** 2


def flash_sigma_t(t_prime, sigma, t_d, u_p, u_k):
    """Flash duration sigma_x(t') |u_p - u_k| / (sqrt(2) |u_p x u_k|)."""
    _, _, _, d, _, s = _split(u_p, u_k)
    if s <= 1e-30 * d:
        raise DegenerateGeometry("electron and photon velocities are collinear")
    return sigma_x(t_prime, sigma, t_d) * math.sqrt(d / (2 * s))


def l0_vector(u_p, u_k):
    """l0 = [w x (u_k x u_p)] / [u_p x u_k]^2 with w = u_p - u_k."""
    u_p, u_k, w, d, cr, s = _split(u_p, u_k)
    if s <= 1e-30 * d:
        raise DegenerateGeometry("electron and photon velocities are collinear")
    return np.cross(w, -cr) / s


# ---------------------------------------------------------------------------
# Phase gradient and arrival time


def _phase_state(p, pp, k, lam, lam_out, lam_g):
    """Phase, channel-sum modulus and triangle orientation at (p, p', k)."""
    px, py, pz = p
    qx, qy, qz = pp
    kx, ky, kz = k
    phi = math.atan2(py, px)
    dphi = wrap_signed(phi - math.atan2(qy, qx))
    dphi_g = wrap_signed(math.atan2(ky, kx) - phi)
    ch = channels_from_angles(
        math.atan2(math.hypot(px, py), pz),
        math.atan2(math.hypot(qx, qy), qz),
        math.atan2(math.hypot(kx, ky), kz),
        dphi,
        dphi_g,
        lam,
        lam_out,
        lam_g,
    )
    re, im = channel_sum(ch)
    size = sum(abs(c.amplitude) for c in ch)
    orient = (np.sign(qx * py - qy * px), np.sign(px * ky - py * kx))
    return math.atan2(im, re), math.hypot(re, im), size, orient


@dataclass(frozen=True)
class PhaseGradient:
    """(d/dp + d/dk) of the amplitude phase with p' held fixed."""

    vector: np.ndarray
    coarse: np.ndarray
    fine: np.ndarray
    discrepancy: float
    one_sided: bool
    flags: tuple = field(default=())

    @property
    def passed(self):
        return self.discrepancy <= GRADIENT_PASS and "failed" not in self.flags


def _step_scale(vec, i):
    """Length over which zeta varies when component i of ``vec`` moves.

    Azimuths change on the scale of the transverse magnitude, polar angles
    on the scale of the full vector.
    """
    perp = math.hypot(vec[0], vec[1])
    full = math.hypot(perp, vec[2])
    return perp if i < 2 and perp > 1e-9 * full else full


def phase_gradient(kin, strict=False, rel_step=5e-4):
    """Finite-difference (d/dp + d/dk) zeta_fi at fixed p'.

    Each Cartesian component of p and of k is stepped by h = rel_step times
    the component's natural scale (transverse magnitude for x and y, full
    magnitude for z), with central differences at h and h/2 combined by
    Richardson extrapolation. ``discrepancy`` is
    |D(h) - D(h/2)| / |D_R|. Stencil points that cross a triangle orientation
    (p'_perp x p_perp or p_perp x k_perp changing sign) or hit an amplitude
    node are invalid; the affected component then uses a one-sided
    second-order stencil and the result carries the ``one_sided`` flag. With
    ``strict`` the flagged conditions raise instead.
    """
    lam = kin.electron_in.helicity
    lam_out = kin.electron_out.helicity
    lam_g = kin.photon.helicity
    p = [float(x) for x in kin.electron_in.p]
    pp = [float(x) for x in kin.electron_out.p]
    k = [float(x) for x in kin.photon.k]

    zeta0, mod0, size0, orient0 = _phase_state(p, pp, k, lam, lam_out, lam_g)
    if mod0 < max(ZERO_AMPLITUDE, 1e-12 * size0):
        raise ZeroAmplitude("amplitude vanishes at the evaluation point")

    def value(which, i, delta):
        pv, kv = list(p), list(k)
        (pv if which == 0 else kv)[i] += delta
        z, mod, size, orient = _phase_state(pv, pp, kv, lam, lam_out, lam_g)
        if orient != orient0 or mod < max(ZERO_AMPLITUDE, 1e-12 * size):
            return None
        return zeta0 + wrap_signed(z - zeta0)

    coarse = np.zeros(3)
    fine = np.zeros(3)
    one_sided = False
    failed = False
    for which, vec in ((0, p), (1, k)):
        for i in range(3):
            h = rel_step * _step_scale(vec, i)
            for _ in range(5):
                pts = {s: value(which, i, s * h) for s in (-2, -1, -0.5, 0.5, 1, 2)}
                if all(pts[s] is not None for s in (-1, -0.5, 0.5, 1)):
                    d1 = (pts[1] - pts[-1]) / (2 * h)
                    d2 = (pts[0.5] - pts[-0.5]) / h
                    break
                for sgn in (1, -1):
                    if all(pts[sgn * s] is not None for s in (0.5, 1, 2)):
                        d1 = sgn * (-3 * zeta0 + 4 * pts[sgn] - pts[2 * sgn]) / (2 * h)
                        d2 = sgn * (-3 * zeta0 + 4 * pts[0.5 * sgn] - pts[sgn]) / h
                        one_sided = True
                        break
                else:
                    h /= 16
                    continue
                break
            else:
                failed = True
                d1 = d2 = math.nan
            coarse[i] += d1
            fine[i] += d2

    flags = []
    if failed:
        if strict:
            raise StencilInvalid("no valid finite-difference stencil")
        flags.append("failed")
    vector = (4 * fine - coarse) / 3
    norm = float(np.linalg.norm(vector))
    discrepancy = float(np.linalg.norm(fine - coarse)) / norm if norm > 0 else 0.0
    if one_sided:
        if strict:
            raise StencilInvalid("central stencil leaves the valid triangle region")
        flags.append("one_sided")
    if not discrepancy <= GRADIENT_INCONSISTENT:
        if strict:
            raise InconsistentGradient(f"step-halving discrepancy {discrepancy:.3g}")
        flags.append("inconsistent")
    vector.setflags(write=False)
    return PhaseGradient(vector, coarse, fine, discrepancy, one_sided, tuple(flags))


@dataclass(frozen=True)
class ArrivalShift:
    value: float
    attoseconds: float
    gradient: PhaseGradient

    @property
    def flags(self):
        return self.gradient.flags


def _l0(kin):
    return l0_vector(kin.electron_in.velocity, kin.photon.velocity)


def arrival_shift(kin, gradient=None, strict=False):
    """Quantum shift of the arrival time, l0 . (d/dp + d/dk) zeta_fi."""
    if gradient is None:
        gradient = phase_gradient(kin, strict=strict)
    dt = float(_l0(kin) @ gradient.vector)
    return ArrivalShift(dt, to_attoseconds(dt), gradient)


def arrival_time_t0(r, kin, gradient=None, include_phase=True):
    """Most probable detection time l0 . (r + (d/dp + d/dk) zeta_fi)."""
    r = np.asarray(r, dtype=float)
    if include_phase:
        if gradient is None:
            gradient = phase_gradient(kin)
        r = r + gradient.vector
    return float(_l0(kin) @ r)


def classical_arrival_times(r, kin):
    """(r . l0, n r . l): formation-zone and far-field classical arrival times."""
    r = np.asarray(r, dtype=float)
    return float(_l0(kin) @ r), kin.n * float(kin.photon.direction @ r)


# ---------------------------------------------------------------------------
# Aggregate report


@dataclass(frozen=True)
class TimescaleReport:
    theta: float
    t_d: float
    t_d_axial: float
    tau_d_sq: float
    formation_length: float
    theta_mach: float
    theta_inf_approx: tuple
    theta_inf_exact: tuple
    delta_theta_inf: float
    sigma_x: float
    r_eff: float
    sigma_t: float
    sigma_t_contracted: float
    t0: float
    delta_t: float
    gradient_discrepancy: float
    flags: tuple


def paraxial_ok(theta, sigma):
    return theta >= max(sigma, 1e-3)


def timescale_report(kin, sigma, t_prime=0.0, r=(0.0, 0.0, 0.0), lorentz=False, medium=None):
    """All time scales of one emission event.

    ``r_eff`` is the correlation radius along the normal of the (u_p, u_k)
    plane. With ``lorentz`` the flash duration is also quoted divided by the
    electron gamma factor. ``medium`` enables the weak-dispersion check.
    """
    from .medium import is_weakly_dispersive

    nan = math.nan
    flags = []
    e = kin.electron_in
    u_p, u_k = e.velocity, kin.photon.velocity
    n, omega, energy = kin.n, kin.omega, e.energy
    theta = kin.theta
    if not paraxial_ok(theta, sigma):
        flags.append("paraxial")
    if medium is not None and not is_weakly_dispersive(medium, omega):
        flags.append("dispersion")

    t_d = spreading_time(u_p, u_k, sigma, omega, energy, n)
    if math.isinf(t_d):
        flags.append("t_d_infinite")
    t_ax = axial_spreading_time(sigma, omega, energy, n)
    tau_sq = tau_d_squared(t_d, t_ax, sigma, omega, energy)

    try:
        theta_mach = mach_angle(theta, u_p, u_k)
    except DomainError:
        theta_mach = nan
        flags.append("mach_domain")

    try:
        inf = _cached_theta_infinity(e.speed, n, omega, energy)
        approx, exact, gap = inf.approx, inf.exact, inf.gap
    except NoCherenkov:
        approx = exact = (nan, nan)
        gap = nan
        flags.append("no_cherenkov")

    sx = sigma_x(t_prime, sigma, t_d)
    cr = np.cross(u_p, u_k)
    ratio = correlation_radius_sq(cr / np.linalg.norm(cr), t_prime, u_p, u_k, sigma, omega, energy)
    r_eff = 1 / math.sqrt(ratio) if ratio > 0 else nan
    sigma_t = flash_sigma_t(t_prime, sigma, t_d, u_p, u_k)
    contracted = sigma_t / e.gamma if lorentz else nan

    try:
        shift = arrival_shift(kin)
        flags.extend(shift.flags)
        dt = shift.value
        discrepancy = shift.gradient.discrepancy
        t0 = arrival_time_t0(r, kin, gradient=shift.gradient)
    except ZeroAmplitude:
        flags.append("zero_amplitude")
        dt = t0 = discrepancy = nan

    return TimescaleReport(
        theta=theta,
        t_d=t_d,
        t_d_axial=t_ax,
        tau_d_sq=tau_sq,
        formation_length=formation_length(e.speed, t_d),
        theta_mach=theta_mach,
        theta_inf_approx=tuple(approx),
        theta_inf_exact=tuple(exact),
        delta_theta_inf=gap,
        sigma_x=sx,
        r_eff=r_eff,
        sigma_t=sigma_t,
        sigma_t_contracted=contracted,
        t0=t0,
        delta_t=dt,
        gradient_discrepancy=discrepancy,
        flags=tuple(flags),
    )
