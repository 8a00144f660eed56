import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as hs
from scipy.optimize import brentq

from wavebranch import dispersion as dp
from wavebranch import spectra as spc
from wavebranch import stream as st
from wavebranch.errors import NearResonanceError


def nu_oracle(s, d, branch=0):
    # sin(k y) with tan(k d) = k s^2; k in (branch pi, branch pi + pi/2) / d
    f = lambda k: math.sin(k * d) - k * s * s * math.cos(k * d)
    lo = (branch * math.pi + 1e-9) / d
    hi = (branch * math.pi + math.pi / 2 - 1e-12) / d
    return brentq(f, lo, hi, xtol=1e-15) ** 2


def test_nu0_transcendental_oracle(sup_zero):
    rep = spc.interval_spectrum(sup_zero, 3, 2048)
    for j in range(3):
        ref = nu_oracle(2.0, 0.5, j)
        assert rep.eigenvalues[j] == pytest.approx(ref, rel=1e-4)
    assert rep.negative_count == 0
    v = rep.eigenvectors[:, 0]
    assert np.all(v > 0)


def test_subcritical_has_negative_direction(sub_zero):
    assert spc.nu0(sub_zero) < 0
    assert not spc.coercivity_check(sub_zero)


@settings(max_examples=25, deadline=None)
@given(hs.sampled_from(["zero", "linear", "ramp", "const_neg"]), hs.floats(1.05, 20.0))
def test_supercritical_positive(models, name, F):
    m = models[name]
    sol = st.solve_stream(m, st.s_for_froude(m, F))
    assert spc.nu0(sol) > 0
    assert spc.coercivity_check(sol, trials=20)


def test_quadratic_form_matches_matrix(sup_zero):
    # piecewise-linear sin(pi y / 2d): form equals the Rayleigh numerator
    y = np.linspace(0, sup_zero.d, 2001)
    v = np.sin(math.pi * y / (2 * sup_zero.d))
    q = spc.quadratic_form(sup_zero, y, v)
    k = math.pi / (2 * sup_zero.d)
    exact = k * k * sup_zero.d / 2 - sup_zero.rho0 * 1.0
    assert q == pytest.approx(exact, rel=1e-5)


@pytest.mark.parametrize("name", ["zero", "linear", "ramp", "const_neg"])
def test_two_routes_agree(sub_streams, name):
    sol = sub_streams[name]
    tau = 2 * dp.tau_star(sol)[0]
    rhs = lambda p: np.cos(2 * p) + p * p
    p, u = spc.transformed_solve(sol, tau, rhs, -0.4)
    v = spc.depth_route(sol, tau, rhs, -0.4)(p)
    assert np.max(np.abs(u - v)) <= 1e-6 * max(1.0, np.max(np.abs(v)))
    pc, uc, _ = spc.spectral_solve(sol, tau, rhs, -0.4, n=96)
    vc = spc.depth_route(sol, tau, rhs, -0.4)(pc)
    assert np.max(np.abs(uc - vc)) <= 1e-8 * max(1.0, np.max(np.abs(vc)))


def test_irrotational_constant_forcing(sub_zero):
    # H_p = 1/s: -(s^3 u')' + tau^2 s u = 1, u(0) = 0, -s^3 u'(1) + u(1) = 0
    s, tau = sub_zero.s, 3.0
    k = tau / s
    A = 1 / (tau * tau * s)
    # u = A (1 - cosh(k p)) + B sinh(k p)
    B = -A * (1 - math.cosh(k) + s**3 * k * math.sinh(k)) / (math.sinh(k) - s**3 * k * math.cosh(k))
    p, u = spc.transformed_solve(sub_zero, tau, lambda p: np.ones_like(p), 0.0)
    exact = A * (1 - np.cosh(k * p)) + B * np.sinh(k * p)
    r = -s**3 * (-A * k * math.sinh(k) + B * k * math.cosh(k)) + exact[-1]
    assert abs(r) < 1e-12
    np.testing.assert_allclose(u, exact, atol=1e-9)


def test_near_resonance(sub_zero):
    t = dp.tau_star(sub_zero)[0]
    with pytest.raises(NearResonanceError):
        spc.transformed_solve(sub_zero, t, None, 1.0)
    with pytest.raises(NearResonanceError):
        spc.spectral_solve(sub_zero, t, None, 1.0)


def test_kernel_check(sub_streams):
    for sol in sub_streams.values():
        sv, p, v = spc.kernel_check(sol, 512)
        assert np.sum(sv < 1e-6 * np.median(sv)) == 1
        a, _ = dp.alpha_profile(sol, dp.tau_star(sol)[0], p)
        np.testing.assert_allclose(v, a / a[-1], atol=1e-4)


def test_report_dict(sup_zero):
    d = spc.interval_spectrum(sup_zero, 2).to_dict()
    assert d["problem_tag"] == "Interval1D" and len(d["eigenvalues"]) == 2
