import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as hs
from scipy.optimize import brentq

from wavebranch import dispersion as dp
from wavebranch import stream as st

from conftest import SQRT2M1


def test_irrotational_sigma_closed_form(zero):
    sol = st.solve_stream(zero, SQRT2M1)
    s, d = sol.s, sol.d
    tau = np.linspace(0.01, 5, 50)
    np.testing.assert_allclose(dp.sigma(sol, tau), s * tau / np.tanh(tau * d) - 1 / s, atol=1e-9)


def test_tau_star_against_bisection(zero):
    sol = st.solve_stream(zero, SQRT2M1)
    ref = brentq(lambda t: t / math.tanh(t * sol.d) - 1 / sol.s**2, 1e-6, 50, xtol=1e-15)
    t, L = dp.tau_star(sol)
    assert t == pytest.approx(ref, abs=1e-8)
    assert L == pytest.approx(2 * math.pi / ref, rel=1e-8)


def test_no_root_when_supercritical(sup_zero):
    assert dp.sigma(sup_zero, 0.0) > 0
    assert dp.tau_star(sup_zero) is None


def test_sigma_zero_identity_defect(zero):
    # zero vorticity: sigma(0) = (F^2 - 1)/kappa, half of 3(F^2 - 1)/(2 kappa) off
    sol = st.solve_stream(zero, 0.5)
    lhs, rhs, defect = dp.sigma_zero_identity(sol)
    assert lhs == pytest.approx((sol.F**2 - 1) / sol.kappa, rel=1e-9)
    assert defect == pytest.approx(-(sol.F**2 - 1) / (2 * sol.kappa), rel=1e-8)


@pytest.mark.parametrize("name", ["zero", "linear", "ramp", "const_neg"])
def test_sigma_increasing_and_forms_agree(sub_streams, name):
    sol = sub_streams[name]
    t = dp.tau_star(sol)[0]
    grid = np.linspace(0, 2 * t, 1000)
    a, b = dp.sigma(sol, grid, both=True)
    assert np.all(np.diff(a) > 0)
    np.testing.assert_allclose(a, b, atol=1e-10)
    assert abs(dp.sigma(sol, t)) < 1e-9


def test_gamma_profile_normalisation(sub_streams):
    sol = sub_streams["linear"]
    t = dp.tau_star(sol)[0]
    g = dp.gamma_solve(sol, t)
    assert g(0.0) == pytest.approx(0.0, abs=1e-14)
    assert g(sol.d) == pytest.approx(1.0, abs=1e-14)
    a, ap = dp.alpha_profile(sol, t, np.array([1.0]))
    assert a[0] == pytest.approx(1 / sol.kappa, rel=1e-10)


def test_profile_summary(sub_zero):
    prof = dp.dispersion_profile(sub_zero, n_tau=11)
    assert prof.tau_grid[0] == 0 and prof.sigma_values[0] < 0
    assert prof.Lambda0 == pytest.approx(2 * math.pi / prof.tau_star)


@settings(max_examples=50, deadline=None)
@given(hs.sampled_from(["zero", "linear", "ramp", "const_neg"]), hs.floats(0.2, 4.0))
def test_sign_dichotomy(models, name, frac):
    m = models[name]
    s_c = st.critical_s(m)
    s = m.s0 + frac * (s_c - m.s0)
    if abs(frac - 1) < 1e-3:
        return
    sol = st.solve_stream(m, s)
    assert np.sign(dp.sigma(sol, 0.0)) == np.sign(sol.F - 1)
