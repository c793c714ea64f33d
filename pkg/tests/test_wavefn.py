import math

import numpy as np
import pytest
from scipy.special import airy

from qhj import (ConfigError, Direction, DirectionMismatch, NoTurningPoint, PotentialModel,
                 action_field, build_wave_ltr, build_wave_rtl, continue_decaying, decaying_field,
                 find_turning_points, reflection_phase, running_wave_stats, wkb_wave, zero_field)
from qhj.spectrum import well_sample
from qhj.wavefn import superposition


@pytest.fixture(scope="module")
def lin_wave(lin_q, lin_outer, lin_shell):
    rp = reflection_phase(lin_q, lin_outer, lin_shell)
    return build_wave_ltr(lin_q, lin_shell, rp.phi_invariant)


def test_trigonometric_form(lin_wave):
    np.testing.assert_array_equal(lin_wave.psi, lin_wave.envelope * np.cos(lin_wave.phase))
    assert np.all(lin_wave.envelope > 0)


def test_unit_value_at_anchor(ho, ho_ground):
    shell, q = ho_ground
    x1, x2 = shell.turning_points
    assert build_wave_ltr(q, shell, 0.0)(x1) == pytest.approx(1.0, abs=1e-14)
    r = q.with_direction(Direction.RTL)
    assert build_wave_rtl(r, shell, 0.0)(x2) == pytest.approx(1.0, abs=1e-14)


def test_direction_checked(ho_ground):
    shell, q = ho_ground
    with pytest.raises(DirectionMismatch):
        build_wave_rtl(q, shell, 0.0)
    with pytest.raises(DirectionMismatch):
        build_wave_ltr(q.with_direction("rtl"), shell, 0.0)


def test_needs_turning_point():
    c = PotentialModel.polynomial([0.0])
    s = find_turning_points(c, 1.0, (-1, 1))
    with pytest.raises(NoTurningPoint):
        build_wave_ltr(zero_field(c, 1.0, np.linspace(-1, 1, 5)), s, 0.0)


def test_airy_correlation(lin_wave):
    m = (lin_wave.grid >= 0) & (lin_wave.grid <= 8)
    corr = np.corrcoef(lin_wave.psi[m], airy(-lin_wave.grid[m])[0])[0, 1]
    assert corr >= 0.999


def test_linear_rtl_equals_ltr(lin_q, lin_shell, lin_wave):
    r = build_wave_rtl(lin_q.with_direction("rtl"), lin_shell, lin_wave.reflection_phase_used)
    assert np.max(np.abs(r.psi - lin_wave.psi)) < 1e-8


def test_ho_ground_state_ratio(ho, ho_ground):
    shell, q = ho_ground
    w = build_wave_ltr(q, shell, well_sample(ho, shell).phi_left)
    assert w(1.0) / w(0.0) == pytest.approx(math.exp(-0.5), abs=1e-3)


@pytest.mark.parametrize("case", ["ho_ground", "ho_excited"])
def test_directions_agree_at_eigenvalues(ho, case, request):
    shell, q = request.getfixturevalue(case)
    ws = well_sample(ho, shell)
    a = build_wave_ltr(q, shell, ws.phi_left)
    b = build_wave_rtl(q.with_direction("rtl"), shell, ws.phi_right)
    assert min(np.max(np.abs(a.psi - b.psi)), np.max(np.abs(a.psi + b.psi))) < 1e-4


def test_superposition_identity(ho, ho_offshell):
    shell, q = ho_offshell
    phi = 0.7
    s = superposition(q, shell, phi)
    assert np.max(np.abs(s.imag)) < 1e-10
    assert np.max(np.abs(s.real - build_wave_ltr(q, shell, phi).psi)) < 1e-10


def test_gauge_invariance(ho, ho_offshell):
    shell, q = ho_offshell
    left = decaying_field(ho, shell, "left")
    base = build_wave_ltr(q, shell, reflection_phase(q, left, shell).phi_invariant)
    for x_ref in (-0.4, 0.0, 0.9, shell.turning_points[1]):
        rp = reflection_phase(q, left, shell, x_ref=x_ref)
        moved = build_wave_ltr(q, shell, rp.phi_total, x_ref=x_ref)
        assert np.max(np.abs(moved.psi - base.psi)) < 1e-8


def test_decay_beyond_turning_point(ho, ho_ground):
    shell, q = ho_ground
    w = build_wave_ltr(q, shell, well_sample(ho, shell).phi_left)
    right = decaying_field(ho, shell, "right")
    c = continue_decaying(w, right)
    m = c.grid > shell.turning_points[1]
    assert np.all(np.diff(np.abs(c.psi[m])) < 0)
    with pytest.raises(ConfigError):
        continue_decaying(w, q)


def test_free_running_wave_stats():
    c = PotentialModel.polynomial([0.0])
    k = 1.5
    z = zero_field(c, k, np.linspace(-2, 2, 21))
    rho, j = running_wave_stats(action_field(z, -2.0), sign=-1)
    xs = np.linspace(-1.9, 1.9, 11)
    np.testing.assert_allclose(rho(xs), 1.0, atol=1e-14)
    np.testing.assert_allclose(j(xs), -k, atol=1e-14)
    with pytest.raises(ConfigError):
        running_wave_stats(action_field(z, -2.0), sign=2)


def test_current_is_conserved_and_soft(ho, ho_ground):
    shell, q = ho_ground
    x1, x2 = shell.turning_points
    rho, j = running_wave_stats(action_field(q, x1), 1)
    xs = np.linspace(x1 + 0.05, x2 - 0.05, 50)
    h = 1e-4
    assert np.max(np.abs((j(xs + h) - j(xs - h)) / (2 * h))) < 1e-6
    assert np.isfinite(j(x2)) and abs(j(x2)) > 0.1


def test_wkb_wave_diverges_at_turning_point(lin, lin_shell):
    near = wkb_wave(lin, lin_shell, 0.0, np.array([1e-14, 1e-13]))
    assert np.all(np.abs(near) > 1e3)
    far = wkb_wave(lin, lin_shell, 0.0, np.array([5.0, -2.0]))
    assert np.all(np.isfinite(far))
