"""Linearised vertical problem gamma(y; tau), the dispersion function sigma and its root."""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from . import _kernels as K
from .errors import BracketError, DiscretizationError, ShootingDegeneracyError

N_BASE = 2048
RICH_TOL = 1e-10
TAU_START = 1e-3
TAU_MAX = 1e3


def _n_steps(stream, tau):
    # keep tau*h below ~1/256 so that RK4 stays well inside its accuracy range
    n = N_BASE
    while abs(tau) * stream.d / n > 1.0 / 256 and n < 2**22:
        n *= 2
    return n


def _coef(stream, n):
    """omega'(U(y)) at the half steps y = j*d/(2n)."""
    key = ("dw_half", n)
    c = stream._cache.get(key)
    if c is None:
        y = np.linspace(0.0, stream.d, 2 * n + 1)
        c = stream.model.dw(stream.U_of(y))
        stream._cache[key] = c
    return c


def _end_slope(stream, tau2, n):
    g, gp, ls = K.shoot_end(_coef(stream, n), stream.d / n, tau2)
    with np.errstate(over="ignore", under="ignore"):
        mag = np.abs(g) * np.exp(np.minimum(ls, 700.0))
    if np.any(mag < 1e-13):
        raise ShootingDegeneracyError("gamma(d) vanishes: resonant vertical mode")
    return gp / g


def end_slope(stream, tau):
    """gamma'(d; tau) with a step-halving check; vectorised over tau."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    out = np.empty_like(tau)
    ns = np.array([_n_steps(stream, t) for t in tau])
    for n in np.unique(ns):
        sel = ns == n
        t2 = tau[sel] ** 2
        a = _end_slope(stream, t2, n)
        b = _end_slope(stream, t2, 2 * n)
        bad = np.abs(a - b) > RICH_TOL * np.maximum(1.0, np.abs(b))
        if np.any(bad):
            c = _end_slope(stream, t2, 4 * n)
            if np.any(np.abs(b - c) > RICH_TOL * np.maximum(1.0, np.abs(c))):
                raise DiscretizationError("gamma'(d) not converged under step halving")
            b = c
        out[sel] = b
    return out


@dataclass
class GammaProfile:
    """gamma(y; tau) normalised by gamma(0) = 0, gamma(d) = 1."""

    tau: float
    y: np.ndarray
    g: np.ndarray
    gp: np.ndarray
    slope_d: float
    _spl: object = field(repr=False)

    def __call__(self, y):
        return self._spl(y)

    def deriv(self, y):
        return self._spl(y, 1)


def gamma_solve(stream, tau, n=None):
    """Shoot gamma'' = (tau^2 - omega'(U)) gamma from y = 0 and rescale by gamma(d)."""
    tau = float(tau)
    n = _n_steps(stream, tau) if n is None else n
    h = stream.d / n
    g, gp, ls = K.shoot_profile(_coef(stream, n), h, tau * tau)
    if abs(g[-1]) * math.exp(min(ls, 700.0)) < 1e-13:
        raise ShootingDegeneracyError("gamma(d) vanishes: resonant vertical mode")
    end = g[-1]
    g = g / end
    gp = gp / end
    y = np.linspace(0.0, stream.d, n + 1)
    return GammaProfile(tau, y, g, gp, float(gp[-1]), CubicHermiteSpline(y, g, gp))


def sigma(stream, tau, both=False):
    """sigma(tau) = kappa gamma'(d) - 1/kappa + omega(1).

    With ``both`` also returns kappa gamma'(d) - kappa rho0.
    """
    k = stream.kappa
    slope = end_slope(stream, tau)
    s1 = k * slope - 1.0 / k + float(stream.model.w(1.0))
    s1 = s1 if np.ndim(tau) else float(s1[0])
    if not both:
        return s1
    s2 = k * slope - k * stream.rho0
    return s1, (s2 if np.ndim(tau) else float(s2[0]))


def tau_star(stream):
    """(tau*, Lambda0) or None when sigma(0) >= 0."""
    key = "tau_star"
    if key in stream._cache:
        return stream._cache[key]
    f = lambda t: sigma(stream, t)
    out = None
    if f(0.0) < 0:
        lo, hi = 0.0, TAU_START
        while f(hi) <= 0:
            lo, hi = hi, 2.0 * hi
            if hi > TAU_MAX:
                raise BracketError("sigma has no sign change below tau = %g" % TAU_MAX)
        t = brentq(f, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
        out = (t, 2.0 * math.pi / t)
    stream._cache[key] = out
    return out


def sigma_zero_identity(stream):
    """(lhs, rhs, defect): sigma(0) against 3(F^2 - 1)/(2 kappa)."""
    lhs = sigma(stream, 0.0)
    rhs = 3.0 * (stream.F**2 - 1.0) / (2.0 * stream.kappa)
    return lhs, rhs, lhs - rhs


@dataclass
class DispersionProfile:
    stream: object
    tau_grid: np.ndarray
    sigma_values: np.ndarray
    tau_star: float | None
    Lambda0: float | None
    gamma_cache: dict = field(default_factory=dict, repr=False)

    def gamma(self, tau):
        g = self.gamma_cache.get(tau)
        if g is None:
            g = self.gamma_cache[tau] = gamma_solve(self.stream, tau)
        return g


def dispersion_profile(stream, tau_max=None, n_tau=201):
    """sigma sampled on a uniform grid of [0, tau_max] plus the root."""
    root = tau_star(stream)
    if tau_max is None:
        tau_max = 2.0 * root[0] if root else 5.0 / stream.d
    grid = np.linspace(0.0, tau_max, n_tau)
    vals = sigma(stream, grid)
    return DispersionProfile(
        stream=stream,
        tau_grid=grid,
        sigma_values=vals,
        tau_star=root[0] if root else None,
        Lambda0=root[1] if root else None,
    )


def alpha_profile(stream, tau, p, gamma=None):
    """alpha(p) = gamma(H(p); tau) H_p and its p-derivative."""
    g = gamma_solve(stream, tau) if gamma is None else gamma
    p = np.asarray(p, dtype=float)
    Y = stream.H_of(p)
    hp = stream.Hp_of(p)
    a = g(Y) * hp
    ap = g.deriv(Y) * hp**2 + g(Y) * hp**3 * stream.model.w(p)
    return a, ap
