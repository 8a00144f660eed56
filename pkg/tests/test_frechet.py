import math
import warnings

import numpy as np
import pytest

from wavebranch import frechet as fr
from wavebranch import spectra as spc
from wavebranch.errors import DomainError, StagnationError, TruncationWarning


@pytest.fixture(scope="module")
def flat(sup_zero):
    n0 = spc.nu0(sup_zero)
    return fr.uniform_wave(sup_zero, 10.0), n0


def test_flat_threshold_and_second_mode(flat):
    wave, n0 = flat
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        rep = fr.physical_spectrum(wave, 2, n_x=64, n_y=64, estimate=n0)
    assert rep.eigenvalues[0] == pytest.approx(n0, rel=0.02)
    # Neumann ends: next mode adds (pi/L)^2
    assert rep.eigenvalues[1] == pytest.approx(n0 + (math.pi / 10) ** 2, rel=0.02)
    assert rep.negative_count == 0
    assert rep.extra["symmetry_defect"] < 1e-12


def test_flat_refinement_order_two(flat):
    wave, n0 = flat
    errs = []
    for n in (16, 32, 64):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", TruncationWarning)
            ev = fr.physical_spectrum(wave, 1, n_x=n, n_y=n, estimate=n0).eigenvalues[0]
        errs.append(abs(ev - n0))
    order = math.log2(errs[1] / errs[2])
    assert 1.7 < order < 2.3


def test_uniform_rho_matches_interval(sup_zero, flat):
    wave, _ = flat
    rho = fr.robin_coefficient(wave).rho
    np.testing.assert_allclose(rho, sup_zero.rho0, rtol=1e-9)


def test_validate_and_round_trip(flat):
    wave, _ = flat
    assert fr.validate_wave(wave)["ok"]
    back = fr.wave_from_json(fr.wave_to_json(wave))
    np.testing.assert_array_equal(back.psi, wave.psi)
    assert back.L == wave.L and back.omega == wave.omega


def test_foreign_length_rejected_for_waves(small_wave):
    with pytest.raises(DomainError):
        fr.assemble(small_wave, 16, 16, L=small_wave.L * 2)


def test_stagnation_guard(flat):
    wave, _ = flat
    psi = np.tile(1.0 - (1.0 - wave.eta) ** 2, (wave.X.size, 1))  # Psi_Y = 0 at the surface
    bad = fr.PhysicalWave(
        X=wave.X, eta=wave.eta, xi=wave.xi, xi_x=wave.xi_x, psi=psi,
        R=wave.R, omega=wave.omega, s=wave.s, L=wave.L,
    )
    with pytest.raises(StagnationError):
        fr.rho_at(bad, np.array([0.0]))


def test_small_wave_spectrum(small_wave):
    rep = fr.physical_spectrum(small_wave, 3, n_x=64, n_y=64)
    assert rep.negative_count == 1
    assert rep.eigenvalues[0] < 0 < rep.eigenvalues[1]
    v0 = rep.eigenvectors[1:, :, 0]
    assert v0.min() * v0.max() >= 0  # one-signed ground state
    assert rep.extra["symmetry_defect"] < 1e-12


def test_psi_x_is_near_kernel(small_wave):
    q, nrm = fr.psi_x_check(small_wave, 64, 32)
    assert nrm > 0 and abs(q) < 1e-3
