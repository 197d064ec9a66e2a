"""
Paraxial Wigner function of the emitted photon.

For fixed (p, p' = p - k, k) the space-time dependence sits in a single
integral over the auxiliary time t',

    I(R) = int dt'/(2 pi) exp(i t' dE) exp(-i g(t')/2) exp(E(t', R)) / G(t'),

taken over the whole real line. The integrand at -t' is the complex
conjugate of the one at t', so I = (1/pi) Re int_0^inf. Its analytic
continuation in t' has branch points only at t' = i t_d and t' = i t~_d on
the imaginary axis, so the half-line can be rotated to the ray
t' = s exp(+-i phi) on which exp(i t' dE) decays exponentially instead of
oscillating. The rotated integral is what :func:`master_integral` computes.
"""

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import IntegrationWarning, quad

from .amplitudes import amplitude_polar
from .errors import ParaxialViolation, QuadratureNotConverged, ZeroAmplitude
from .kinematics import EmissionKinematics
from .timescales import (
    arrival_time_t0,
    axial_spreading_time,
    correlation_terms,
    flash_sigma_t,
    paraxial_ok,
    phase_gradient,
    sigma_x,
    spreading_time,
)

# |dE| below this is treated as on-shell: the t' integral then diverges
# logarithmically and the sample is flagged.
ON_SHELL = 1e-300
# Decay of exp(i t' dE) at which the rotated ray is truncated.
TAIL_EXPONENT = 40.0
# Values below this fraction of the absolute integral are judged against it.
CANCELLATION_FLOOR = 1e-4
_ROTATIONS = (math.pi / 4, math.pi / 8, math.pi / 16, math.pi / 32, math.pi / 64)


@dataclass(frozen=True)
class IntegrandParts:
    G: float
    g1: float
    g2: float
    re_exp: float
    im_exp: float
    delta_e: float

    @property
    def g(self):
        return self.g1 + self.g2


@dataclass(frozen=True)
class EmissionSetup:
    """t'-independent quantities of one emission event, computed once."""

    kin: EmissionKinematics
    sigma: float
    u_p: np.ndarray
    u_k: np.ndarray
    w_norm: float
    d: float
    s: float
    t_d: float
    t_d_axial: float
    c: float
    delta_e: float
    modulus_sq: float
    gradient: object = field(repr=False)

    @property
    def A(self):
        return 1 / (self.kin.omega * self.kin.n**2) - 1 / self.kin.electron_in.energy

    @property
    def B(self):
        return 1 / self.kin.electron_in.energy - 1 / self.kin.omega


def exact_spreading_time(u_p, u_k, sigma, omega, energy, n):
    """t_d evaluated exactly in rational arithmetic from the velocity vectors.

    Near the Cherenkov cone the bracket of t_d cancels to a part in
    t_d/t~_d, so the closed form in ``timescales`` is only as good as that
    ratio times the rounding of its inputs. The Wigner integrand multiplies
    t'/t_d by R^2/R_eff^2, which can be tens, so here the bracket is summed
    without rounding and the result is correctly rounded for the given vectors.
    """
    up = [Fraction(float(v)) for v in u_p]
    uk = [Fraction(float(v)) for v in u_k]
    w = [a - b for a, b in zip(up, uk)]
    cr = [up[1] * uk[2] - up[2] * uk[1], up[2] * uk[0] - up[0] * uk[2], up[0] * uk[1] - up[1] * uk[0]]
    d = sum(v * v for v in w)
    s = sum(v * v for v in cr)
    om, eps, nn = Fraction(omega), Fraction(energy), Fraction(n) ** 2
    bracket = (1 / (om * nn) - 1 / eps) * d + (1 / eps - 1 / om) * s
    num = 2 / Fraction(sigma) ** 2 * d
    if bracket == 0:
        return axial_spreading_time(sigma, omega, energy, n) if num == 0 else math.inf
    return float(num / bracket)


def prepare(kin, sigma, gradient=None):
    """Cache the velocities, spreading times, |M|^2 and phase gradient of ``kin``."""
    u_p = kin.electron_in.velocity
    u_k = kin.photon.velocity
    w = u_p - u_k
    cr = np.cross(u_p, u_k)
    omega, energy, n = kin.omega, kin.electron_in.energy, kin.n
    amp = amplitude_polar(kin)
    if gradient is None and not amp.zero:
        gradient = phase_gradient(kin)
    return EmissionSetup(
        kin=kin,
        sigma=sigma,
        u_p=u_p,
        u_k=u_k,
        w_norm=float(np.linalg.norm(w)),
        d=float(w @ w),
        s=float(cr @ cr),
        t_d=exact_spreading_time(u_p, u_k, sigma, omega, energy, n),
        t_d_axial=axial_spreading_time(sigma, omega, energy, n),
        c=0.5 * sigma**2 * (1 / energy - 1 / omega),
        delta_e=kin.delta_e,
        modulus_sq=amp.modulus**2,
        gradient=gradient,
    )


def r_vector(setup, r, t):
    """R = r - u_p t + (d/dp + d/dk) zeta_fi."""
    R = np.asarray(r, dtype=float) - setup.u_p * t
    if setup.gradient is not None:
        R = R + setup.gradient.vector
    return R


def integrand_parts(t_prime, R, setup):
    """Prefactor, Gouy phases and exponent of the real-axis integrand at t' >= 0."""
    sig2 = setup.sigma**2
    a = t_prime / setup.t_d_axial
    b = t_prime / setup.t_d
    x, y = correlation_terms(R, setup.u_p, setup.u_k)
    inv_sx2 = sig2 / (1 + b * b)
    inv_tau2 = setup.c * (1 / setup.t_d + 1 / setup.t_d_axial)
    re_exp = -inv_sx2 * (x + t_prime**2 * inv_tau2 / (1 + a * a) * y)
    im_exp = inv_sx2 * t_prime * (x / setup.t_d - setup.c * (1 - a * b) / (1 + a * a) * y)
    G = setup.w_norm / (2 * sig2) * ((1 + b * b) * (1 + a * a)) ** 0.25
    return IntegrandParts(G, math.atan(b), math.atan(a), re_exp, im_exp, setup.delta_e)


def integrand(t_prime, R, setup):
    """Real-axis cosine form e^{reExp}/G cos(t' dE - g/2 + imExp)."""
    q = integrand_parts(t_prime, R, setup)
    return math.exp(q.re_exp) / q.G * math.cos(t_prime * q.delta_e - 0.5 * q.g + q.im_exp)


def gouy_phase_closed_form(t_prime, setup):
    """Total Gouy phase as a single arctangent; equals g1 + g2 while |g1 + g2| < pi/2."""
    A, B, d, s, sig2 = setup.A, setup.B, setup.d, setup.s, setup.sigma**2
    num = t_prime / (8 * sig2) * (2 * A * d + B * s)
    den = d / (2 * sig2) ** 2 - (t_prime / 4) ** 2 * A * (A * d + B * s)
    return math.atan(num / den), den


def gouy_prefactor_closed_form(t_prime, setup):
    """G(t') from the product of the two quadratic forms."""
    A, B, d, s, sig2 = setup.A, setup.B, setup.d, setup.s, setup.sigma**2
    q = (t_prime / 4) ** 2
    return ((1 / (2 * sig2) ** 2 + q * A * A) * (d * d / (2 * sig2) ** 2 + q * (A * d + B * s) ** 2)) ** 0.25


def _xy(R, setup):
    return correlation_terms(R, setup.u_p, setup.u_k)


def complex_integrand(t_prime, x, y, setup):
    """Analytic integrand H(t') exp(i dE t') for complex t'.

    H = (2 sigma^2/|w|) (1 + i a)^(-1/2) (1 + i b)^(-1/2) exp(E) with
    a = t'/t~_d, b = t'/t_d and E = -sigma^2 (X + i t' c Y/(1 + i a))/(1 + i b).
    Each square root is principal, which is the continuation of the
    real-axis branch into Re t' > 0.
    """
    one_a = 1 + 1j * t_prime / setup.t_d_axial
    one_b = 1 + 1j * t_prime / setup.t_d
    pre = 2 * setup.sigma**2 / setup.w_norm / (np.sqrt(one_a) * np.sqrt(one_b))
    return pre * np.exp(_exponent(t_prime, x, y, setup) + 1j * setup.delta_e * t_prime)


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float
    l1: float
    panels: int
    t_max: float
    rotation: float
    converged: bool


def _panel_edges(setup, s_max):
    scales = [abs(setup.t_d), abs(setup.t_d_axial)]
    if setup.delta_e != 0:
        scales.append(1 / abs(setup.delta_e))
    s0 = min(v for v in scales if v > 0 and math.isfinite(v)) / 64
    edges = [0.0]
    s = min(s0, s_max)
    while s < s_max:
        edges.append(s)
        s *= 2
    edges.append(s_max)
    for v in scales:
        if 0 < v < s_max:
            edges.append(v)
    return sorted(set(edges))


def _exponent(t_prime, x, y, setup):
    one_a = 1 + 1j * t_prime / setup.t_d_axial
    one_b = 1 + 1j * t_prime / setup.t_d
    return -setup.sigma**2 * (x + 1j * t_prime * setup.c * y / one_a) / one_b


def _choose_rotation(x, y, setup, sign):
    """Largest rotation angle whose ray keeps Re E within 2 of its real-axis maximum.

    On the real axis Re E <= 0, but on a rotated ray it can grow near the
    branch points, which would cost digits through cancellation.
    """
    lo = 1e-3 * min(abs(setup.t_d), abs(setup.t_d_axial))
    hi = TAIL_EXPONENT / (abs(setup.delta_e) * math.sin(_ROTATIONS[-1]))
    probe = np.geomspace(lo, max(hi, 10 * lo), 400)
    limit = max(float(np.max(_exponent(probe + 0j, x, y, setup).real)), -setup.sigma**2 * x) + 2
    for phi in _ROTATIONS:
        ray = probe * np.exp(1j * sign * phi)
        if float(np.max(_exponent(ray, x, y, setup).real)) <= limit:
            return phi
    return _ROTATIONS[-1]


def master_integral(R, setup, tol=1e-10, rotation=None):
    """(1/pi) Re int_0^inf H(t') exp(i dE t') dt' along a rotated ray.

    The ray t' = s exp(i sign(dE) phi) is split into geometrically growing
    panels and truncated where |exp(i dE t')| has decayed to exp(-40); each
    panel is integrated with adaptive Gauss-Kronrod. ``converged`` requires
    the summed error estimate to be below ``tol`` relative to the value, or
    relative to CANCELLATION_FLOOR times the integral of |integrand| when the
    value itself is that small (it is then zero up to exponentially small
    terms).
    """
    x, y = _xy(R, setup)
    de = setup.delta_e
    if abs(de) <= ON_SHELL:
        return QuadratureResult(math.nan, math.inf, math.inf, 0, math.inf, 0.0, False)
    sign = 1.0 if de > 0 else -1.0
    phi = rotation if rotation is not None else _choose_rotation(x, y, setup, sign)
    direction = np.exp(1j * sign * phi)
    s_max = TAIL_EXPONENT / (abs(de) * math.sin(phi))

    def re_part(s):
        return float(np.real(complex_integrand(s * direction, x, y, setup) * direction))

    def abs_part(s):
        return float(np.abs(complex_integrand(s * direction, x, y, setup)))

    edges = _panel_edges(setup, s_max)
    spans = list(zip(edges[:-1], edges[1:]))
    total = err = l1 = 0.0
    with warnings.catch_warnings():
        # roundoff warnings are reflected in the returned error estimate
        warnings.simplefilter("ignore", IntegrationWarning)
        for lo, hi in spans:
            l1 += quad(abs_part, lo, hi, epsabs=0.0, epsrel=1e-6, limit=50)[0]
        # panels that cannot reach epsrel (values near zero) may stop at a
        # small share of the cancellation floor
        epsabs = 1e-2 * tol * CANCELLATION_FLOOR * l1 / len(spans)
        for lo, hi in spans:
            v, e = quad(re_part, lo, hi, epsabs=epsabs, epsrel=1e-13, limit=200)
            total += v
            err += e
    tail = l1 * math.exp(-TAIL_EXPONENT)
    err += tail
    converged = err <= tol * max(abs(total), CANCELLATION_FLOOR * l1)
    return QuadratureResult(total / math.pi, err / math.pi, l1 / math.pi, len(edges) - 1, s_max, phi, converged)


def master_integral_real_axis(R, setup, tol=1e-10, periods_per_panel=4, max_panels=100_000):
    """Reference evaluation of the same integral directly on the real t' axis.

    Panels span a few oscillation periods; the remainder beyond the last
    panel is integrated by scipy's Fourier-integral rule (QAWF). Only
    practical when |dE| times the spreading times is moderate.
    """
    de = setup.delta_e
    x, y = _xy(R, setup)
    if abs(de) <= ON_SHELL:
        raise QuadratureNotConverged("on-shell point: the integral diverges")

    def h(t):
        return complex_integrand(t + 0j, x, y, setup) * np.exp(-1j * de * t)

    width = periods_per_panel * 2 * math.pi / abs(de)
    width = min(width, abs(setup.t_d) / 8, abs(setup.t_d_axial) / 8)
    t_end = 50 * max(abs(setup.t_d), abs(setup.t_d_axial), 2 * math.pi / abs(de))
    n_panels = int(math.ceil(t_end / width))
    if n_panels > max_panels:
        raise QuadratureNotConverged(f"real-axis reference needs {n_panels} panels")
    t_end = n_panels * width  # tail starts exactly where the panels stop
    total = err = 0.0
    for i in range(n_panels):
        lo, hi = i * width, (i + 1) * width
        v, e = quad(lambda t: float(np.real(h(t) * np.exp(1j * de * t))), lo, hi, epsabs=0.0, epsrel=tol, limit=200)
        total += v
        err += e
    # Tail: Re[h e^{i dE t}] = Re h cos(dE t) - Im h sin(dE t)
    omega = abs(de)
    sgn = 1.0 if de > 0 else -1.0

    def re_h(t):
        return float(np.real(h(t_end + t) * np.exp(1j * de * t_end)))

    def im_h(t):
        return float(np.imag(h(t_end + t) * np.exp(1j * de * t_end)))

    floor = tol * abs(total)
    c, ec = quad(re_h, 0, np.inf, weight="cos", wvar=omega, epsabs=floor, epsrel=tol)
    s, es = quad(im_h, 0, np.inf, weight="sin", wvar=omega, epsabs=floor, epsrel=tol)
    total += c - sgn * s
    err += ec + es
    return total / math.pi, err / math.pi


@dataclass(frozen=True)
class WignerSample:
    r: np.ndarray
    k: np.ndarray
    t: float
    p_out: np.ndarray
    value: float
    diagnostics: dict


def wigner_prefactor(setup, mean_momentum=None):
    """Everything outside the t' integral for one photon helicity."""
    kin = setup.kin
    n = kin.n
    e_in, e_out = kin.electron_in, kin.electron_out
    weight = 1.0
    if mean_momentum is not None:
        d = e_in.p - np.asarray(mean_momentum, dtype=float)
        weight = math.exp(-float(d @ d) / setup.sigma**2)
    return (
        (2 * math.sqrt(math.pi) / setup.sigma) ** 3
        * math.sqrt(4 * math.pi)
        / ((2 * n * n) ** 2 * 2 * e_out.energy * 2 * e_in.energy)
        * setup.modulus_sq
        * weight
    )


def helicity_setups(kin, sigma, helicity="sum"):
    """Prepared setups for the photon helicities to be summed (or the one requested)."""
    lams = (1, -1) if helicity == "sum" else (int(helicity),)
    return [prepare(kin.with_helicities(photon_helicity=lg), sigma) for lg in lams]


def wigner_point(r, t, kin, sigma, mean_momentum=None, helicity="sum", tol=1e-10, setups=None, strict=True):
    """W_p(r, p, k, t) for the event ``kin``.

    The photon helicity is summed by default; each helicity has its own
    phase gradient and therefore its own R. ``setups`` may pass cached
    results of :func:`helicity_setups`. With ``strict`` a non-converged
    integral raises QuadratureNotConverged, otherwise it is flagged in the
    diagnostics.
    """
    if not paraxial_ok(kin.theta, sigma):
        raise ParaxialViolation(f"theta={kin.theta!r} below small-angle guard")
    if setups is None:
        setups = helicity_setups(kin, sigma, helicity)
    value = err = 0.0
    panels = 0
    t_max = 0.0
    converged = True
    for st in setups:
        if st.modulus_sq == 0 or st.gradient is None:
            continue
        res = master_integral(r_vector(st, r, t), st, tol=tol)
        pref = wigner_prefactor(st, mean_momentum)
        value += pref * res.value
        err += pref * res.error
        panels += res.panels
        t_max = max(t_max, res.t_max)
        converged &= res.converged
    if strict and not converged:
        raise QuadratureNotConverged(f"estimated error {err:.3g} for value {value:.3g}")
    diag = {"panels": panels, "t_max": t_max, "error": err, "converged": converged}
    return WignerSample(
        np.asarray(r, dtype=float), kin.photon.k, t, kin.electron_out.p, value, diag
    )


def trace_electron(r, k, t, packet, medium, nodes=5, tol=1e-10, photon_helicity="sum"):
    """Wigner function of the photon alone: integrate over p and sum over lambda'.

    Gauss-Hermite nodes in each Cartesian direction sample p = <p> + sigma x,
    with p' = p - k at every node. The Gaussian weight of the packet is
    absorbed by the Hermite weights, so the sum approximates
    int d^3p/(2 pi)^3 sum_lambda' W(r, p, k, t).
    """
    x, wts = np.polynomial.hermite.hermgauss(nodes)
    p0 = packet.mean_momentum
    sig = packet.sigma
    total = 0.0
    for i in range(nodes):
        for j in range(nodes):
            for m in range(nodes):
                p = p0 + sig * np.array([x[i], x[j], x[m]])
                weight = wts[i] * wts[j] * wts[m]
                for lam_out in (0.5, -0.5):
                    kin = EmissionKinematics.from_momenta(
                        p, k, medium, packet.helicity, lam_out, 1
                    )
                    sample = wigner_point(r, t, kin, sig, mean_momentum=None, helicity=photon_helicity, tol=tol)
                    total += weight * sample.value
    return total * sig**3 / (2 * math.pi) ** 3


def temporal_envelope(r, kin, sigma, t_prime=0.0):
    """Centre t0 and width sigma_t of the Gaussian temporal envelope."""
    u_p, u_k = kin.electron_in.velocity, kin.photon.velocity
    t_d = spreading_time(u_p, u_k, sigma, kin.omega, kin.electron_in.energy, kin.n)
    return arrival_time_t0(r, kin), flash_sigma_t(t_prime, sigma, t_d, u_p, u_k)


def fit_gaussian(times, values):
    """Fit a * exp(-(t - t0)^2 / (2 s^2)) by least squares on log|values|.

    Returns (t0, s, a). All values must share one sign.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    sign = np.sign(values[np.argmax(np.abs(values))])
    if np.any(values * sign <= 0):
        raise ValueError("values change sign; not a single Gaussian")
    scale = np.max(np.abs(times - times.mean())) or 1.0
    tau = (times - times.mean()) / scale
    c2, c1, c0 = np.polyfit(tau, np.log(values * sign), 2)
    if c2 >= 0:
        raise ValueError("log-values are not concave")
    center = -c1 / (2 * c2)
    width = math.sqrt(-1 / (2 * c2))
    amp = sign * math.exp(c0 - c1 * c1 / (4 * c2))
    return times.mean() + center * scale, width * scale, amp
