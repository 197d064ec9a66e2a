import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from qcherenkov.errors import InvalidTriangle, NoCherenkov
from qcherenkov.kinematics import (
    Configuration,
    ElectronPacket,
    ElectronState,
    EmissionKinematics,
    PhotonState,
    cherenkov_angle_classical,
    cherenkov_angle_recoil,
    cutoff_frequency,
    resolve_azimuths,
    triangle_decompose,
    wrap_angle,
    wrap_signed,
)
from qcherenkov.medium import ConstantMedium, TabulatedMedium


def test_classical_angles():
    assert math.degrees(cherenkov_angle_classical(0.7, 1.5)) == pytest.approx(17.75, abs=0.01)
    assert math.degrees(cherenkov_angle_classical(0.9999, 1.33)) == pytest.approx(41.2, abs=0.05)


def test_classical_angle_threshold():
    assert cherenkov_angle_classical(0.5, 2 * (1 + 1e-12)) < 1e-5
    with pytest.raises(NoCherenkov):
        cherenkov_angle_classical(0.5, 2.0)
    with pytest.raises(NoCherenkov):
        cherenkov_angle_classical(0.5, 1.5)


def test_recoil_angle_shift():
    beta, n = 0.7, 1.5
    energy = 1 / math.sqrt(1 - beta**2)
    omega = 1e-3 * energy
    shift = math.cos(cherenkov_angle_recoil(beta, n, omega, energy)) - 1 / (beta * n)
    assert shift == pytest.approx(0.5e-3 * 1.25 / 1.05, rel=1e-10)


def test_recoil_angle_smaller_at_high_speed():
    beta, n = 0.9999, 1.33
    energy = 1 / math.sqrt(1 - beta**2)
    theta_cl = cherenkov_angle_classical(beta, n)
    theta = cherenkov_angle_recoil(beta, n, 1e-4 * energy, energy)
    first_order = 0.5e-4 * (n * n - 1) / (beta * n) / math.sin(theta_cl)
    assert theta_cl - theta == pytest.approx(first_order, rel=1e-3)


@given(st.floats(0.5, 0.99), st.floats(1.1, 2.0))
def test_recoil_angle_linear_limit(beta, n):
    assume(beta * n > 1.05)
    energy = 1 / math.sqrt(1 - beta**2)
    cl = cherenkov_angle_classical(beta, n)
    d1 = cl - cherenkov_angle_recoil(beta, n, 1e-6 * energy, energy)
    d2 = cl - cherenkov_angle_recoil(beta, n, 1e-7 * energy, energy)
    assert d1 / d2 == pytest.approx(10.0, rel=1e-3)


def test_recoil_angle_above_cutoff():
    with pytest.raises(NoCherenkov):
        cherenkov_angle_recoil(0.7, 1.5, 10.0, 1.4)


def test_cutoff_frequency():
    assert cutoff_frequency(10.0, 0.7, 1.5) == pytest.approx(0.8, rel=1e-12)
    assert cutoff_frequency(10.0, 0.5, 2.0) == 0.0
    with pytest.raises(NoCherenkov):
        cutoff_frequency(10.0, 0.7, 1.0)


def test_right_triangle():
    tri = triangle_decompose(3e-5, 4e-5, 5e-5)
    assert tri.valid
    assert tri.area == pytest.approx(6e-10, rel=1e-14)
    assert tri.alpha + tri.beta + tri.gamma == pytest.approx(math.pi, rel=1e-14)
    # k_perp is the hypotenuse, so the angle between p_perp and pp_perp is 90 deg
    assert tri.alpha == pytest.approx(math.pi / 2, rel=1e-14)


def test_degenerate_and_invalid_triangles():
    tri = triangle_decompose(1.0, 2.0, 3.0)
    assert tri.valid and tri.area == 0.0
    assert tri.alpha == pytest.approx(math.pi) and tri.gamma == 0.0
    bad = triangle_decompose(1e-5, 1e-5, 3e-5)
    assert not bad.valid
    with pytest.raises(InvalidTriangle):
        resolve_azimuths(bad, 0.0)


def test_equilateral_azimuths():
    tri = triangle_decompose(1.0, 1.0, 1.0)
    phi, phi_g = resolve_azimuths(tri, 0.0, Configuration.PLUS)
    assert math.degrees(phi) == pytest.approx(60.0, abs=1e-12)
    assert math.degrees(phi_g) == pytest.approx(120.0, abs=1e-12)


sides = st.floats(1e-8, 1e-3)


@given(sides, sides, st.floats(0.01, 0.99), st.floats(0, 2 * math.pi), st.sampled_from(list(Configuration)))
def test_triangle_closure(a, b, frac, phi_prime, conf):
    c = abs(a - b) + frac * (a + b - abs(a - b))
    tri = triangle_decompose(a, b, c)
    assert tri.valid
    assert tri.alpha + tri.beta + tri.gamma == pytest.approx(math.pi, rel=1e-12)
    two_area = 2 * tri.area
    assert a * b * math.sin(tri.alpha) == pytest.approx(two_area, rel=1e-10)
    assert c * b * math.sin(tri.beta) == pytest.approx(two_area, rel=1e-10)
    assert a * c * math.sin(tri.gamma) == pytest.approx(two_area, rel=1e-10)
    phi, phi_g = resolve_azimuths(tri, phi_prime, conf)
    assert 0 <= phi < 2 * math.pi and 0 <= phi_g < 2 * math.pi
    p = a * np.array([math.cos(phi), math.sin(phi)])
    pp = b * np.array([math.cos(phi_prime), math.sin(phi_prime)])
    k = c * np.array([math.cos(phi_g), math.sin(phi_g)])
    assert np.linalg.norm(p - pp - k) <= 1e-12 * max(a, b, c)


@given(sides, sides, st.floats(0.01, 0.99), st.floats(-10, 10))
def test_minus_mirrors_plus(a, b, frac, phi_prime):
    c = abs(a - b) + frac * (a + b - abs(a - b))
    tri = triangle_decompose(a, b, c)
    plus = resolve_azimuths(tri, phi_prime, Configuration.PLUS)
    minus = resolve_azimuths(tri, phi_prime, Configuration.MINUS)
    for x, y in zip(plus, minus):
        assert abs(wrap_signed(x - phi_prime) + wrap_signed(y - phi_prime)) < 1e-9


@given(st.floats(-1e3, 1e3))
def test_wrapping_ranges(x):
    assert 0 <= wrap_angle(x) < 2 * math.pi
    assert -math.pi < wrap_signed(x) <= math.pi
    assert math.cos(wrap_angle(x)) == pytest.approx(math.cos(x), abs=1e-9)


def test_electron_state():
    e = ElectronState.from_speed(0.7)
    assert e.speed == pytest.approx(0.7, rel=1e-15)
    assert e.gamma == pytest.approx(1 / math.sqrt(0.51), rel=1e-15)
    assert np.linalg.norm(e.velocity) < 1
    with pytest.raises(ValueError):
        ElectronState((0, 0, 1), helicity=1)


def test_photon_dispersion_relation():
    med = TabulatedMedium((1e-6, 1e-5), (1.40, 1.50))
    ph = PhotonState.from_frequency(5e-6, 0.3, 0.1, med)
    again = PhotonState.from_wavevector(ph.k, med)
    assert again.omega == pytest.approx(5e-6, rel=1e-12)
    assert again.wavenumber == pytest.approx(again.n * again.omega, rel=1e-12)
    assert np.linalg.norm(again.velocity) == pytest.approx(1 / again.n, rel=1e-14)


def test_on_triangle_conserves_momentum():
    med = ConstantMedium(1.5)
    kin = EmissionKinematics.on_triangle(0.7, 1e-5, 0.99e-5, 0.3, 6e-6, med, 0.4, Configuration.MINUS)
    assert np.array_equal(kin.electron_in.p - kin.photon.k, kin.electron_out.p)
    assert kin.electron_out.p_perp == pytest.approx(0.99e-5, rel=1e-9)
    assert wrap_signed(kin.electron_out.azimuth - 0.4) == pytest.approx(0.0, abs=1e-9)
    assert kin.configuration is Configuration.MINUS
    assert kin.electron_in.speed == pytest.approx(0.7, rel=1e-14)


def test_on_triangle_forbidden():
    with pytest.raises(InvalidTriangle):
        EmissionKinematics.on_triangle(0.7, 1e-5, 0.5e-5, 0.01, 6e-6, ConstantMedium(1.5))


def test_packet_normalisation():
    sigma = 0.1
    p0 = np.array([0.0, 0.0, 1.0])
    packet = ElectronPacket(p0, sigma)
    x, w = np.polynomial.hermite.hermgauss(8)
    total = 0.0
    for xi, wi in zip(x, w):
        for xj, wj in zip(x, w):
            for xk, wk in zip(x, w):
                u = np.array([xi, xj, xk])
                total += wi * wj * wk * packet.wave_function(p0 + sigma * u) ** 2 * math.exp(u @ u)
    assert total * sigma**3 / (2 * math.pi) ** 3 == pytest.approx(1.0, rel=1e-12)
