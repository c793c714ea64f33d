import math

import numpy as np
import pytest

from qhj import (ConfigError, DegenerateMatch, Direction, DirectionMismatch, NoRootInGrid,
                 OutOfRange, PotentialModel, decaying_field, find_eigenvalues,
                 find_turning_points, maslov_index, quantization_curve, reflection_phase)
from qhj.spectrum import fold_phase, invariant_phase, well_sample


@pytest.fixture(scope="module")
def ho_spectrum(ho):
    return find_eigenvalues(ho, 0.5, 3.5, n_grid=200)


def test_fold_phase():
    assert fold_phase(math.pi) == pytest.approx(math.pi)
    assert fold_phase(-math.pi) == pytest.approx(math.pi)
    assert fold_phase(3 * math.pi / 2) == pytest.approx(-math.pi / 2)


def test_linear_invariant_phase(lin_q, lin_outer, lin_shell):
    rp = reflection_phase(lin_q, lin_outer, lin_shell)
    assert rp.direction is Direction.RTL
    assert rp.phi_invariant == pytest.approx(2 * math.pi / 3, abs=1e-6)
    assert rp.phi_gauge == 0.0 and rp.x_ref == lin_shell.turning_points[0]


def test_direction_mismatch(lin_q, lin_outer, lin_shell):
    with pytest.raises(DirectionMismatch):
        reflection_phase(lin_q, lin_outer, lin_shell, direction=Direction.LTR)


def test_reflection_phase_needs_decaying_field(lin_q, lin_shell):
    with pytest.raises(ConfigError):
        reflection_phase(lin_q, lin_q, lin_shell)


def test_degenerate_match():
    with pytest.raises(DegenerateMatch):
        invariant_phase(0.3j, 1.0, "right")


def test_matching_modes_agree_at_turning_point(lin_q, lin_outer, lin_shell):
    a = reflection_phase(lin_q, lin_outer, lin_shell, matching="full")
    b = reflection_phase(lin_q, lin_outer, lin_shell, matching="imag")
    assert a.phi_invariant == pytest.approx(b.phi_invariant, abs=1e-10)


def test_symmetric_well_phases_equal(ho):
    for k in np.linspace(0.8, 3.5, 20):
        s = find_turning_points(ho, k, ho.default_window(k))
        w = well_sample(ho, s)
        assert abs(w.phi_right - w.phi_left) < 1e-6


def test_phase_sum_is_gauge_independent(ho, ho_offshell):
    shell, q = ho_offshell
    right = decaying_field(ho, shell, "right")
    left = decaying_field(ho, shell, "left")
    sums = []
    for x_ref in (-0.7, 0.0, 0.4):
        r = reflection_phase(q, right, shell, x_ref=x_ref)
        l = reflection_phase(q, left, shell, x_ref=x_ref)
        sums.append(r.phi_total + l.phi_total)
    np.testing.assert_allclose(sums, sums[0], atol=1e-10)


def test_ho_eigenvalues(ho_spectrum):
    res = ho_spectrum
    assert list(res.labels) == [0, 1, 2, 3, 4, 5]
    np.testing.assert_allclose(res.eigen_k**2, 2 * np.arange(6) + 1, atol=1e-6)
    assert np.all(np.diff(res.eigen_k) > 0)


def test_maslov_at_eigenvalues(ho_spectrum):
    np.testing.assert_allclose(ho_spectrum.maslov_at_eigen, 0.5, atol=1e-3)
    assert maslov_index(ho_spectrum, ho_spectrum.eigen_k[0]) == pytest.approx(2.0, abs=4e-3)


def test_maslov_curve_oscillates(ho_spectrum):
    assert np.ptp(ho_spectrum.maslov_curve) > 1e-4


def test_maslov_deviation_shrinks_with_hbar():
    ks = np.linspace(1.8, 2.6, 60)
    dev = [np.max(np.abs(quantization_curve(PotentialModel.harmonic(hbar=h), ks).maslov_curve
                         - 0.5)) for h in (1.0, 0.5)]
    assert dev[1] < dev[0]


def test_phases_are_smooth(ho_spectrum):
    assert np.max(np.abs(np.diff(ho_spectrum.phi_right))) < 0.5
    assert np.max(np.abs(np.diff(ho_spectrum.phi_left))) < 0.5


def test_threaded_sweep_is_identical(ho):
    ks = np.linspace(1.2, 2.0, 24)
    a = quantization_curve(ho, ks)
    b = quantization_curve(ho, ks, workers=4)
    np.testing.assert_array_equal(a.quant_curve, b.quant_curve)
    np.testing.assert_array_equal(a.eigen_k, b.eigen_k)


def test_empty_window_is_valid(ho):
    res = quantization_curve(ho, np.linspace(1.2, 1.6, 10))
    assert res.eigen_k.size == 0
    with pytest.raises(NoRootInGrid):
        find_eigenvalues(ho, 1.2, 1.6, n_grid=10)


def test_anharmonic_spectrum_against_numerov():
    from qhj import numerov_eigen

    m = PotentialModel.polynomial([0.0, 0.0, 1.0, 0.0, 0.1])
    res = find_eigenvalues(m, 0.6, 2.4, n_grid=80, window=(-6.0, 6.0))
    for n, k in zip(res.labels, res.eigen_k):
        ref = numerov_eigen(m, int(n), window=(-6.0, 6.0)).eigen_k
        assert k * k == pytest.approx(ref * ref, abs=1e-3)


def test_maslov_index_out_of_range(ho_spectrum):
    with pytest.raises(OutOfRange):
        maslov_index(ho_spectrum, 10.0)


def test_bad_grids(ho):
    with pytest.raises(ConfigError):
        quantization_curve(ho, [1.0])
    with pytest.raises(ConfigError):
        quantization_curve(ho, [2.0, 1.0])
    with pytest.raises(ConfigError):
        quantization_curve(ho, [1.0, 2.0], matching="both")
