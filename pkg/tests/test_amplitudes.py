import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from events import fig4_event, random_event
from qcherenkov.amplitudes import (
    amplitude_polar,
    channel_amplitudes,
    channels_from_angles,
    g_factor,
    modulus_sq_interference,
    polar_from_channels,
    wigner_d_half,
    wigner_d_one,
)
from qcherenkov.kinematics import Configuration, EmissionKinematics, wrap_signed
from qcherenkov.medium import ConstantMedium
from qcherenkov.units import FINE_STRUCTURE

angles = st.floats(0, math.pi)
halves = st.sampled_from([0.5, -0.5])
ones = st.sampled_from([1, -1])


def test_d_half_values():
    assert wigner_d_half(0.5, 0.5, 0.0) == 1.0
    assert wigner_d_half(0.5, -0.5, math.pi) == -1.0


def test_d_one_values():
    assert wigner_d_one(1, 1, 0.0) == 1.0
    assert wigner_d_one(0, 1, math.pi / 2) == pytest.approx(1 / math.sqrt(2), rel=1e-15)


@given(angles, halves)
def test_d_half_rows_normalised(theta, lam):
    assert sum(wigner_d_half(s, lam, theta) ** 2 for s in (0.5, -0.5)) == pytest.approx(1.0, rel=1e-14)


@given(angles, ones)
def test_d_one_rows_normalised(theta, lam):
    assert sum(wigner_d_one(s, lam, theta) ** 2 for s in (1, 0, -1)) == pytest.approx(1.0, rel=1e-14)


@given(angles)
def test_d_half_matches_rotation_matrix(theta):
    # independent route: exp(-i theta sigma_y / 2) in the (+1/2, -1/2) basis
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    mat = {(0.5, 0.5): c, (0.5, -0.5): -s, (-0.5, 0.5): s, (-0.5, -0.5): c}
    for (a, b), v in mat.items():
        assert wigner_d_half(a, b, theta) == pytest.approx(v, abs=1e-15)


def test_g_factor_cases():
    assert g_factor(0.5, 0.5, 1.0, 1.0) == 0.0
    assert g_factor(0.5, -0.5, 1.7, 1.7) == 0.0
    expected = math.sqrt(4 * math.pi * FINE_STRUCTURE) * 2 * math.sqrt(3)
    assert g_factor(0.5, 0.5, 2.0, 2.0) == pytest.approx(expected, rel=1e-15)


def test_forward_emission_vanishes():
    for ch in channels_from_angles(0.0, 0.0, 0.0, 0.3, 0.2, 0.5, 0.5, 1):
        assert ch.amplitude == 0.0


def test_channel_selection_rule():
    chans = channels_from_angles(0.1, 0.2, 0.3, 0.4, 0.5, 0.5, -0.5, -1)
    assert len(chans) == 4
    for ch in chans:
        assert ch.sigma == ch.sigma_out + ch.sigma_gamma


def test_plus_triangle_phase_is_gamma_plus_half_alpha():
    kin = fig4_event(30.0, Configuration.PLUS, phi_prime=0.7)
    tri = kin.triangle
    first = channel_amplitudes(kin)[0]
    assert (first.sigma, first.sigma_out, first.sigma_gamma) == (0.5, -0.5, 1)
    assert wrap_signed(first.phase - (tri.gamma + tri.alpha / 2)) == pytest.approx(0.0, abs=1e-12)


def test_opposite_channels_have_opposite_phases(rng):
    for _ in range(200):
        chans = channel_amplitudes(random_event(rng))
        assert chans[2].phase == -chans[0].phase
        assert chans[3].phase == -chans[1].phase


def test_single_channel_phase():
    chans = channels_from_angles(0.4, 0.5, 0.6, 0.7, 0.8, 0.5, 0.5, 1)
    for ch in chans:
        pol = polar_from_channels([ch], 1.0)
        # a negative real coefficient adds pi
        offset = 0.0 if ch.amplitude > 0 else math.pi
        assert abs(wrap_signed(pol.phase - ch.phase - offset)) == pytest.approx(0.0, abs=1e-15)


def test_zero_amplitude_flag():
    chans = channels_from_angles(0.0, 0.0, 0.0, 0.3, 0.2, 0.5, 0.5, 1)
    pol = polar_from_channels(chans, 1.0)
    assert pol.zero and math.isnan(pol.phase)


def _complex_oracle(kin):
    # direct complex sum from the lab azimuths, without the difference form
    e, f, ph = kin.electron_in, kin.electron_out, kin.photon
    phi, phi_out, phi_g = e.azimuth, f.azimuth, ph.azimuth
    z1 = -(phi + phi_out) / 2 + phi_g
    z2 = (phi + phi_out) / 2 - phi
    total = 0j
    for s, s_out, s_g, coef, z in (
        (0.5, -0.5, 1, math.sqrt(2), z1),
        (0.5, 0.5, 0, -1.0, z2),
        (-0.5, 0.5, -1, -math.sqrt(2), -z1),
        (-0.5, -0.5, 0, 1.0, -z2),
    ):
        m = (
            coef
            * wigner_d_half(s, e.helicity, e.polar)
            * wigner_d_half(s_out, f.helicity, f.polar)
            * wigner_d_one(s_g, ph.helicity, ph.polar)
        )
        total += m * np.exp(1j * z)
    g = g_factor(e.helicity, f.helicity, e.energy, f.energy)
    return abs(g * total) ** 2


def test_modulus_matches_complex_oracle(rng):
    for _ in range(500):
        kin = random_event(rng)
        pol = amplitude_polar(kin)
        assert pol.modulus**2 == pytest.approx(_complex_oracle(kin), rel=1e-12)


def test_interference_expansion_matches_modulus(rng):
    for _ in range(500):
        kin = random_event(rng)
        pol = amplitude_polar(kin)
        chans = channel_amplitudes(kin)
        assert modulus_sq_interference(chans, pol.g_factor) == pytest.approx(pol.modulus**2, rel=1e-10)


def _flip(kin):
    p, k = kin.electron_in.p.copy(), kin.photon.k.copy()
    p[1], k[1] = -p[1], -k[1]
    return EmissionKinematics(
        type(kin.electron_in)(p, kin.electron_in.helicity),
        type(kin.electron_out)(p - k, kin.electron_out.helicity),
        type(kin.photon)(k, kin.n, kin.photon.helicity),
    )


def test_configuration_flip(rng):
    for _ in range(500):
        kin = random_event(rng)
        a, b = amplitude_polar(kin), amplitude_polar(_flip(kin))
        assert b.modulus == pytest.approx(a.modulus, rel=1e-12)
        assert wrap_signed(a.phase + b.phase) == pytest.approx(0.0, abs=1e-12)


@given(st.floats(0, 2 * math.pi), st.floats(5, 80), st.sampled_from(list(Configuration)))
def test_independent_of_final_azimuth(shift, theta, conf):
    a = amplitude_polar(fig4_event(theta, conf, phi_prime=0.0))
    b = amplitude_polar(fig4_event(theta, conf, phi_prime=shift))
    assert b.modulus == pytest.approx(a.modulus, rel=1e-12)
    assert wrap_signed(a.phase - b.phase) == pytest.approx(0.0, abs=1e-12)
