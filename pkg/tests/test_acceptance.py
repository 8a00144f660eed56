"""The twelve acceptance criteria; each records one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the summary) or
``python3 tests/test_acceptance.py``.
"""
import math
import time
import warnings

import numpy as np
import pytest
from scipy.optimize import brentq

from wavebranch import continuation as co
from wavebranch import dispersion as dp
from wavebranch import expansion as ex
from wavebranch import frechet as fr
from wavebranch import spectra as spc
from wavebranch import stream as st
from wavebranch.errors import AccuracyWarning, TruncationWarning
from wavebranch.vorticity import VorticityModel, builtin_models

RESULTS = {}
ZERO = VorticityModel((0.0,))


def record(n, ok, detail):
    RESULTS[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    assert ok, RESULTS[n]


def _quiet():
    warnings.simplefilter("ignore", AccuracyWarning)
    warnings.simplefilter("ignore", TruncationWarning)


def _grid_s(m, n):
    s_c = st.critical_s(m)
    return m.s0 + (s_c - m.s0) * np.linspace(0.3, 3.0, n)


_branch = {}


def branch():
    if not _branch:
        s_plus, _ = st.invert_bernoulli(ZERO, 1.5 + 0.01)
        sol = st.solve_stream(ZERO, s_plus)
        state = co.start_branch(sol)
        co.branch_extend(state, 0.005 * sol.d, 5)
        _branch.update(sol=sol, state=state)
    return _branch["sol"], _branch["state"]


def test_01_irrotational_criticality():
    t0 = time.perf_counter()
    s_c, R_c, _ = st.bernoulli_curve(ZERO)
    dt = time.perf_counter() - t0
    ok = abs(s_c - 1) <= 1e-8 and abs(R_c - 1.5) <= 1e-8 and dt < 1.0
    record(1, ok, f"s_c = {s_c:.12f}, R_c = {R_c:.12f}, {dt:.3f} s")


def test_02_bernoulli_inversion():
    s_plus, s_minus = st.invert_bernoulli(ZERO, 2.5)
    ok = abs(s_minus - 2) <= 1e-8 and abs(s_plus - (math.sqrt(2) - 1)) <= 1e-8
    record(2, ok, f"s- = {s_minus:.12f}, s+ = {s_plus:.12f}")


def test_03_froude_triple():
    _quiet()
    worst, n = 0.0, 0
    exp2 = []
    for m in builtin_models().values():
        for s in _grid_s(m, 5):
            _, c = st.froude(st.solve_stream(m, float(s)))
            worst = max(worst, c["res_Y_dprime"], c["res_Y_Hp3"], c["res_dprime_Hp3"])
            exp2.append(c["res_exp_minus2"])
            n += 1
    ok = n == 20 and worst <= 1e-5
    record(3, ok, f"{n} pairs, max pairwise 1/F^2 gap {worst:.2e}; exponent -2 variant misses by >= {min(exp2):.2f}")


def test_04_froude_asymptotics():
    rows = st.r_asymptotic_check(ZERO, [8.0, 64.0, 512.0])
    err = max(abs(rem - F ** (-2 / 3)) for F, _, rem in rows)
    record(4, err <= 1e-6, f"max |R - F^(4/3)/2 - F^(-2/3)| = {err:.2e}")


def test_05_derivative_identity():
    _quiet()
    worst = 0.0
    for m in builtin_models().values():
        for s in _grid_s(m, 20):
            s = float(s)
            F = st.froude_of_s(m, s)
            dR = (st.bernoulli_R(m, s + 1e-5) - st.bernoulli_R(m, s - 1e-5)) / 2e-5
            worst = max(worst, abs(dR - s * (1 - F**-2)))
    record(5, worst <= 1e-5, f"80 samples, max |R'(s) - s(1 - F^-2)| = {worst:.2e}")


def test_06_dispersion():
    _quiet()
    sol = st.solve_stream(ZERO, math.sqrt(2) - 1)
    ref = brentq(lambda t: t / math.tanh(t * sol.d) - 1 / sol.s**2, 1e-6, 50, xtol=1e-15)
    t = dp.tau_star(sol)[0]
    grid = np.linspace(0, 2 * t, 1000)
    inc = bool(np.all(np.diff(dp.sigma(sol, grid)) > 0))
    rng = np.random.default_rng(2024)
    models = list(builtin_models().values())
    agree = 0
    for _ in range(50):
        m = models[rng.integers(len(models))]
        s_c = st.critical_s(m)
        s = m.s0 + (s_c - m.s0) * rng.uniform(0.2, 3.0)
        ss = st.solve_stream(m, s)
        agree += np.sign(dp.sigma(ss, 0.0)) == np.sign(ss.F - 1)
    ok = abs(t - ref) <= 1e-8 and inc and agree == 50
    record(6, ok, f"|tau* - bisection| = {abs(t - ref):.1e}, increasing = {inc}, sign agreement {agree}/50")


def test_07_interval_spectrum():
    sol = st.solve_stream(ZERO, 2.0)
    f = lambda k: math.sin(k * sol.d) - k * 4.0 * math.cos(k * sol.d)
    ref = brentq(f, 1e-9, (math.pi / 2 - 1e-12) / sol.d, xtol=1e-15) ** 2
    n0 = spc.nu0(sol, 2048)
    rel = abs(n0 - ref) / ref
    pos = all(spc.nu0(st.solve_stream(m, st.s_for_froude(m, F))) > 0
              for m in builtin_models().values() for F in (1.1, 2.0, 8.0))
    record(7, rel <= 1e-4 and pos, f"nu0 = {n0:.8f} vs oracle {ref:.8f} (rel {rel:.1e}); nu0 > 0 on 12 supercritical streams: {pos}")


def test_08_flat_threshold():
    _quiet()
    sol = st.solve_stream(ZERO, 2.0)
    n0 = spc.nu0(sol)
    wave = fr.uniform_wave(sol, 10.0)
    t0 = time.perf_counter()
    errs = {}
    for n in (32, 64, 128):
        ev = fr.physical_spectrum(wave, 1, n_x=n, n_y=n, estimate=n0).eigenvalues[0]
        errs[n] = abs(ev - n0) / abs(n0)
    dt = time.perf_counter() - t0
    order = math.log2(errs[64] / errs[128])
    ok = errs[128] <= 0.02 and errs[128] < errs[64] < errs[32] and 1.7 <= order <= 2.3 and dt < 60
    record(8, ok, f"rel error at 128^2 {errs[128]:.1e}, observed order {order:.2f}, {dt:.1f} s")


def test_09_small_amplitude_branch():
    sol, state = branch()
    conv = len(state.points) == 6 and all(p.field.info["converged"] for p in state.points[1:])
    fit, _ = co.fit_lambda2(state, 2)
    lam2, mu2 = ex.lambda2_mu2(sol)
    rel = abs(fit - lam2) / abs(lam2)
    mus = [p.spectrum_summary["mu"] for p in state.points[1:]]
    signs = all(m[0] < 0 < m[1] for m in mus)
    ok = conv and fit < 0 and rel <= 0.05 and mu2 > 0 and signs
    record(9, ok, f"5 steps converged = {conv}, fit lambda2 = {fit:.4f}, expansion {lam2:.4f} (rel {rel:.1e}), "
                  f"mu2 = {mu2:.3f}, mu~0 < 0 < mu~1 at all points = {signs}")


def test_10_flow_force():
    _, state = branch()
    spread = 0.0
    for pt in state.points[1:]:
        w = co.reconstruct_physical(pt.field)
        S = co.flow_force(w, np.linspace(0, w.L, 8))
        spread = max(spread, (max(S) - min(S)) / abs(np.mean(S)))
    flat = fr.uniform_wave(st.solve_stream(ZERO, 2.0), 5.0)
    lit = co.flow_force(flat, np.linspace(0, 5.0, 8), form="literal")
    err = max(abs(v - 3.125) for v in lit)
    record(10, spread <= 1e-5 and err <= 1e-9,
           f"max relative spread {spread:.1e} over 5 waves; uniform value error {err:.1e} (literal form)")


def test_11_kernel_structure():
    sol, _ = branch()
    f = co.uniform_field(sol)
    rep = co.hodograph_spectrum(f, 6)
    ev = rep.eigenvalues
    near = int(np.sum(np.abs(ev) <= 1e-4))
    j = int(np.argmin(np.abs(ev)))
    v = rep.eigenvectors[..., j]
    k = co.kernel_field(f)
    k = k / np.max(np.abs(k))
    err = float(np.max(np.abs(v * np.sign(v[-1, 0]) - k)))
    record(11, near == 1 and err <= 1e-3, f"{near} eigenvalue(s) with |mu| <= 1e-4 (|mu| = {abs(ev[j]):.1e}), vector error {err:.1e}")


def test_12_sign_ledger():
    _quiet()
    bad = []
    n = 0
    for name, m in builtin_models().items():
        curve = st.bernoulli_curve(m)
        for dR in (0.001, 0.005, 0.01, 0.02, 0.05):
            s_plus, _ = st.invert_bernoulli(m, curve[1] + dR, curve)
            r = ex.expand(st.solve_stream(m, s_plus), plug_back=False)
            n += 1
            if not (r.c1 < 0 and r.lambda2 < 0 and r.mu2 > 0):
                bad.append(f"{name}@{dR}")
    record(12, not bad, f"{n} streams, violations: {', '.join(bad) or 'none'}")


if __name__ == "__main__":
    import sys

    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    failed = 0
    for fn in tests:
        try:
            fn()
        except AssertionError:
            failed += 1
        except Exception as exc:  # surface unexpected errors as failures
            n = int(fn.__name__.split("_")[1])
            RESULTS[n] = f"criterion {n:2d}: FAIL  {type(exc).__name__}: {exc}"
            failed += 1
    for n in sorted(RESULTS):
        print(RESULTS[n])
    sys.exit(1 if failed else 0)
