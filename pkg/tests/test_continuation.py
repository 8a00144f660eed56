import numpy as np
import pytest

from wavebranch import continuation as co
from wavebranch import expansion as ex
from wavebranch.errors import NoSolutionError


def test_uniform_field_is_a_solution(sub_zero):
    f = co.uniform_field(sub_zero)
    F, G = co.residual(np.zeros_like(f.h), f)
    assert np.max(np.abs(F)) < 1e-12 and np.max(np.abs(G)) < 1e-12
    assert co.bernoulli_residual(f) < 1e-12


def test_supercritical_has_no_branch(sup_zero):
    with pytest.raises(NoSolutionError):
        co.uniform_field(sup_zero)


def test_grid_rejects_odd_nq():
    with pytest.raises(ValueError):
        co.HodoGrid(7, 16, 1.0)


def test_linearisation_matches_residual(branch_zero):
    f = branch_zero.points[3].field
    rng = np.random.default_rng(1)
    v = np.zeros_like(f.h)
    v[1:] = rng.standard_normal(v[1:].shape) * 1e-2
    A, N = co.frechet_apply(v, f)
    w0 = np.zeros_like(f.h)
    eps = 1e-6
    Fp, Gp = co.residual(w0 + eps * v, f)
    Fm, Gm = co.residual(w0 - eps * v, f)
    np.testing.assert_allclose((Fp - Fm) / (2 * eps), A[1:-1], atol=1e-6)
    np.testing.assert_allclose((Gp - Gm) / (2 * eps), -N, atol=1e-6)


def test_kernel_at_zero_amplitude(sub_streams):
    for sol in sub_streams.values():
        f = co.uniform_field(sol)
        rep = co.hodograph_spectrum(f, 4)
        ev = rep.eigenvalues
        assert np.sum(np.abs(ev) <= 1e-4) == 1
        j = int(np.argmin(np.abs(ev)))
        v = rep.eigenvectors[..., j]
        k = co.kernel_field(f)
        k = k / np.max(np.abs(k))
        v = v * np.sign(v[-1, 0])
        assert np.max(np.abs(v - k)) < 1e-3


def test_branch_converges(branch_zero):
    assert len(branch_zero.points) == 6 and not branch_zero.flags
    for pt in branch_zero.points[1:]:
        assert pt.field.info["converged"] and pt.field.info["history"][-1] <= 1e-10
        mu = pt.spectrum_summary["mu"]
        assert mu[0] < 0 < mu[1]
        assert co.bernoulli_residual(pt.field) < 1e-8
    assert np.all(np.diff(branch_zero.amplitudes) > 0)
    assert np.all(np.diff(branch_zero.periods()) > 0)


def test_lambda2_fit_matches_expansion(branch_zero, sub_zero):
    fit, _ = co.fit_lambda2(branch_zero, 2)
    lam2, mu2 = ex.lambda2_mu2(sub_zero)
    assert fit < 0 and mu2 > 0
    assert fit == pytest.approx(lam2, rel=0.01)


def test_duplicate_step_rejected(sub_zero):
    state = co.start_branch(sub_zero)
    co.branch_extend(state, 0.0, 3)
    assert len(state.points) == 1 and state.flags == ["duplicate-point rejected"]


def test_json_round_trip(branch_zero):
    text = co.branch_to_json(branch_zero)
    back = co.branch_from_json(text)
    assert len(back.points) == len(branch_zero.points)
    np.testing.assert_array_equal(back.points[-1].field.h, branch_zero.points[-1].field.h)
    assert co.branch_to_json(back) == text


def test_flow_force(small_wave, sup_zero):
    S = co.flow_force(small_wave, np.linspace(0, small_wave.L, 8))
    assert (max(S) - min(S)) <= 1e-5 * abs(np.mean(S))
    from wavebranch.frechet import uniform_wave

    flat = uniform_wave(sup_zero, 5.0)
    lit = co.flow_force(flat, np.linspace(0, 5.0, 8), form="literal")
    inv = co.flow_force(flat, np.linspace(0, 5.0, 8))
    np.testing.assert_allclose(lit, 3.125, atol=1e-9)
    np.testing.assert_allclose(inv, 2.125, atol=1e-9)
    with pytest.raises(ValueError):
        co.flow_force(flat, [0.0], form="other")


def test_reconstruction_surface(small_wave, branch_zero):
    f = branch_zero.points[2].field
    assert small_wave.xi[0] - small_wave.xi[-1] == pytest.approx(f.amplitude, rel=1e-10)
    assert small_wave.L == pytest.approx(f.grid.half_period / f.lam)
    from wavebranch.frechet import validate_wave

    assert validate_wave(small_wave)["ok"]
