"""Uniform streams U(Y), their Bernoulli and Froude maps, and the hodograph profile H(p)."""
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from . import _kernels as K
from .errors import (
    AccuracyWarning,
    BracketError,
    DomainError,
    NoSolutionError,
    SingularInputError,
)
from .vorticity import Case, VorticityModel, _maximizers

TOL_QUAD = 1e-12
REL_QUAD = 1e-13
NEAR_S0 = 1e-3
XTOL = 1e-15

_GX, _GW = np.polynomial.legendre.leggauss(15)


def _breakpoints(model):
    """Points where s0**2 - 2*Omega may vanish: the endpoints and interior maximizers."""
    _, arg = _maximizers(model.Omega_coeffs)
    pts = {0.0, 1.0}
    pts.update(float(a) for a in arg if 1e-9 < a < 1 - 1e-9)
    return sorted(pts)


def power_integral(model, s, expo, a=0.0, b=1.0, abs_tol=TOL_QUAD, rel_tol=REL_QUAD):
    """int_a^b (s^2 - 2*Omega(t))**expo dt with endpoint substitutions at each breakpoint."""
    s2 = s * s
    pts = [a] + [t for t in _breakpoints(model) if a < t < b] + [b]
    total = 0.0
    for lo, hi in zip(pts[:-1], pts[1:]):
        m = 0.5 * (lo + hi)
        total += K.quad_power(model.Omega_coeffs, s2, expo, lo, m, 1, abs_tol, rel_tol)[0]
        total += K.quad_power(model.Omega_coeffs, s2, expo, m, hi, 2, abs_tol, rel_tol)[0]
    return total


def _check_s(model, s, warn=True):
    if not np.isfinite(s) or s <= model.s0:
        raise SingularInputError(f"s = {s!r} must exceed s0 = {model.s0!r}")
    if warn and s - model.s0 < NEAR_S0:
        warnings.warn(
            f"s - s0 = {s - model.s0:.3e} < {NEAR_S0}; quadrature near its singular limit",
            AccuracyWarning,
            stacklevel=3,
        )


def depth(model, s, tol=TOL_QUAD):
    """Depth d(s) = int_0^1 dt / sqrt(s^2 - 2 Omega(t))."""
    _check_s(model, s)
    return power_integral(model, s, -0.5, abs_tol=tol)


def inv_froude2(model, s, tol=TOL_QUAD):
    """1/F^2 = int_0^1 (s^2 - 2 Omega)^(-3/2) dp (the integral of H_p^3)."""
    _check_s(model, s, warn=False)
    return power_integral(model, s, -1.5, abs_tol=tol)


def froude_of_s(model, s):
    return 1.0 / math.sqrt(inv_froude2(model, s))


def bernoulli_R(model, s):
    """Bernoulli constant of the uniform stream: s^2/2 + d(s) - Omega(1)."""
    return 0.5 * s * s + depth(model, s) - float(model.Om(1.0))


def bernoulli_dR(model, s):
    """Analytic derivative s (1 - F^-2)."""
    return s * (1.0 - inv_froude2(model, s))


@dataclass
class StreamSolution:
    """One uniform stream, sampled in Y and in the hodograph variable p."""

    model: VorticityModel
    s: float
    d: float
    Y: np.ndarray
    U: np.ndarray
    Up: np.ndarray
    kappa: float
    rho0: float
    R: float
    F: float
    p: np.ndarray
    H: np.ndarray
    Hp: np.ndarray
    _u_nodes: np.ndarray = field(repr=False)
    _y_nodes: np.ndarray = field(repr=False)
    _spline: object = field(repr=False)
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def samples_Y(self):
        return np.column_stack([self.Y, self.U, self.Up])

    @property
    def H_samples(self):
        return np.column_stack([self.p, self.H, self.Hp])

    def speed(self, u):
        """sqrt(s^2 - 2 Omega(u)) = U'(Y) at U = u."""
        return np.sqrt(np.maximum(self.s**2 - 2.0 * self.model.Om(u), 0.0))

    def Hp_of(self, p):
        return 1.0 / self.speed(p)

    def Hpp_of(self, p):
        return self.Hp_of(p) ** 3 * self.model.w(p)

    def H_of(self, p):
        """H(p) = Y at which U = p; table lookup plus a local Gauss correction."""
        p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
        un = self._u_nodes
        i = np.clip(np.searchsorted(un, p, side="right") - 1, 0, un.size - 2)
        a = un[i]
        half = 0.5 * (p - a)
        t = a[..., None] + half[..., None] * (_GX + 1.0)
        loc = half * np.sum(_GW / self.speed(t), axis=-1)
        return self._y_nodes[i] + loc

    def U_of(self, Y, polish=2):
        """U(Y) from the Hermite interpolant, polished by Newton on H(U) = Y."""
        Y = np.clip(np.asarray(Y, dtype=float), 0.0, self.d)
        u = np.clip(self._spline(Y), 0.0, 1.0)
        for _ in range(polish):
            u = np.clip(u - (self.H_of(u) - Y) * self.speed(u), 0.0, 1.0)
        return u

    def Up_of(self, Y):
        return self.speed(self.U_of(Y))


def _y_table(model, s, n_nodes):
    """Y(u) = int_0^u dt/sqrt(s^2 - 2 Omega) on a uniform u-grid."""
    u = np.linspace(0.0, 1.0, n_nodes)
    bps = _breakpoints(model)
    s2 = s * s
    inc = np.empty(n_nodes - 1)
    for j in range(n_nodes - 1):
        a, b = u[j], u[j + 1]
        mode = 0
        if any(abs(a - t) < 1e-14 for t in bps):
            mode = 1
        elif any(abs(b - t) < 1e-14 for t in bps):
            mode = 2
        inc[j] = K.quad_power(model.Omega_coeffs, s2, -0.5, a, b, mode, 1e-15, REL_QUAD)[0]
    y = np.concatenate([[0.0], np.cumsum(inc)])
    return u, y


def solve_stream(model, s, n_samples=256, n_nodes=512, tol=TOL_QUAD):
    """Uniform stream with surface shear s: depth, profiles, kappa, rho0, R and F."""
    if n_samples < 16:
        raise DomainError("n_samples must be at least 16")
    _check_s(model, s)
    d = depth(model, s, tol)
    un, yn = _y_table(model, s, n_nodes)
    # pin the table end to the adaptive depth so that U(d) = 1 exactly
    yn = yn * (d / yn[-1])
    slopes = np.sqrt(np.maximum(s * s - 2.0 * model.Om(un), 0.0))
    spline = CubicHermiteSpline(yn, un, slopes)
    kappa = math.sqrt(s * s - 2.0 * float(model.Om(1.0)))
    rho0 = 1.0 / kappa**2 - float(model.w(1.0)) / kappa
    R = 0.5 * s * s + d - float(model.Om(1.0))
    F = 1.0 / math.sqrt(power_integral(model, s, -1.5))
    sol = StreamSolution(
        model=model, s=float(s), d=d, Y=np.empty(0), U=np.empty(0), Up=np.empty(0),
        kappa=kappa, rho0=rho0, R=R, F=F, p=np.empty(0), H=np.empty(0), Hp=np.empty(0),
        _u_nodes=un, _y_nodes=yn, _spline=spline,
    )
    sol.Y = np.linspace(0.0, d, n_samples)
    sol.U = sol.U_of(sol.Y)
    sol.U[0], sol.U[-1] = 0.0, 1.0
    sol.Up = sol.speed(sol.U)
    sol.p = np.linspace(0.0, 1.0, n_samples)
    sol.H = sol.H_of(sol.p)
    sol.Hp = sol.Hp_of(sol.p)
    return sol


def froude(sol, log=None):
    """F from 1/F^2 = int_0^d dY / U'(Y)^2, plus cross-check residuals.

    Returns ``(F, checks)`` where ``checks`` holds the two alternative forms
    (-d'(s)/s by central differences and int H_p^3 dp) and their residuals.
    The variant with exponent -2 is evaluated too and reported as inconsistent.
    """
    # Y-space Gauss quadrature on panels
    edges = np.linspace(0.0, sol.d, 65)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * np.diff(edges)
    Yq = (mid[:, None] + half[:, None] * _GX).ravel()
    wq = (half[:, None] * _GW).ravel()
    iF2_y = float(np.sum(wq / sol.Up_of(Yq) ** 2))
    F = 1.0 / math.sqrt(iF2_y)
    h = 1e-5
    model, s = sol.model, sol.s
    dprime = (depth(model, s + h) - depth(model, s - h)) / (2 * h) if s - h > model.s0 else float("nan")
    iF2_d = -dprime / s
    iF2_h = power_integral(model, s, -1.5)
    checks = {
        "F_Y": F,
        "F_dprime": 1.0 / math.sqrt(iF2_d) if iF2_d > 0 else float("nan"),
        "F_Hp3": 1.0 / math.sqrt(iF2_h),
        "res_Y_dprime": abs(iF2_y - iF2_d),
        "res_Y_Hp3": abs(iF2_y - iF2_h),
        "res_dprime_Hp3": abs(iF2_d - iF2_h),
        # exponent -2 reading of the same integral, kept only for the record
        "F_exp_minus2": iF2_y ** (-2),
        "res_exp_minus2": abs(iF2_y ** (-2) - F),
    }
    if log is not None:
        log(checks)
    return F, checks


def _grow_up(fun, s_lo, target_sign, factor=2.0, limit=1e8):
    """Geometric growth of the upper end until ``fun`` has ``target_sign``."""
    s_hi = s_lo * factor if s_lo > 0 else 1.0
    while np.sign(fun(s_hi)) != target_sign:
        s_lo, s_hi = s_hi, s_hi * factor
        if s_hi > limit:
            raise BracketError("no sign change below s = %g" % limit)
    return s_lo, s_hi


def _shrink_down(fun, s0, s_top, target_sign, min_gap=1e-14):
    """Move towards s0 from s_top until ``fun`` has ``target_sign``; None if impossible."""
    gap = s_top - s0
    while True:
        gap *= 0.5
        s = s0 + gap
        if gap < min_gap * max(1.0, s0):
            return None
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", AccuracyWarning)
            if np.sign(fun(s)) == target_sign:
                return s


def critical_s(model, xtol=XTOL):
    """s_c: root of F(s) = 1, from log(1/F^2)."""
    fun = lambda s: math.log(inv_froude2(model, s))
    s_top = model.s0 + 1.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        if fun(s_top) > 0:
            lo, hi = _grow_up(fun, s_top, -1.0)
        else:
            lo = _shrink_down(fun, model.s0, s_top, 1.0)
            if lo is None:
                raise BracketError("F exceeds 1 arbitrarily close to s0")
            hi = s_top
        return brentq(fun, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)


def R0_value(model):
    """R_0 = R(s0) as a limit; infinite in CaseI."""
    if model.case_tag == Case.CaseI:
        return math.inf
    d0 = power_integral(model, model.s0, -0.5)
    return 0.5 * model.s0**2 + d0 - float(model.Om(1.0))


def bernoulli_curve(model, xtol=XTOL):
    """(s_c, R_c, R_0) of the uniform-stream Bernoulli curve."""
    s_c = critical_s(model, xtol)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        R_c = bernoulli_R(model, s_c)
    return s_c, R_c, R0_value(model)


def invert_bernoulli(model, R, curve=None, xtol=XTOL):
    """(s_plus, s_minus) with R(s) = R; s_plus < s_c < s_minus, either may be None."""
    s_c, R_c, R0 = curve if curve is not None else bernoulli_curve(model)
    if R < R_c - 1e-12:
        raise NoSolutionError(f"R = {R!r} below R_c = {R_c!r}")
    if R <= R_c:
        return s_c, s_c
    fun = lambda s: bernoulli_R(model, s) - R
    lo, hi = _grow_up(fun, s_c, 1.0)
    s_minus = brentq(fun, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
    s_plus = None
    if R < R0:
        lo = _shrink_down(fun, model.s0, s_c, 1.0)
        if lo is not None:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", AccuracyWarning)
                s_plus = brentq(fun, lo, s_c, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)
    return s_plus, s_minus


def s_for_froude(model, F_target, s_c=None, xtol=XTOL):
    """The supercritical s > s_c with F(s) = F_target (F_target > 1)."""
    if F_target <= 1:
        raise DomainError("F_target must exceed 1")
    s_c = critical_s(model) if s_c is None else s_c
    g = -2.0 * math.log(F_target)
    fun = lambda s: math.log(inv_froude2(model, s)) - g
    lo, hi = _grow_up(fun, s_c, -1.0)
    return brentq(fun, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)


def r_asymptotic_check(model, F_list):
    """Rows (F, R(F), R - F^(4/3)/2) along the supercritical branch."""
    s_c = critical_s(model)
    rows = []
    for F in F_list:
        s = s_for_froude(model, F, s_c)
        R = bernoulli_R(model, s)
        rows.append((float(F), R, R - 0.5 * F ** (4.0 / 3.0)))
    return rows


def r_upper_bound(model, R, curve=None):
    """Right side B of the a-priori bound on R/2 built from the two conjugate depths."""
    s_plus, s_minus = invert_bernoulli(model, R, curve)
    if s_plus is None:
        raise DomainError("R has no subcritical conjugate stream")
    d = depth(model, s_minus)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AccuracyWarning)
        d_plus = depth(model, s_plus)
    gap = d_plus - d
    if gap <= 1e-9:
        raise DomainError(f"conjugate depths too close: d+ - d = {gap:.3e}")
    # int_0^d U_Y^2 dY = int_0^1 U_Y dp
    energy = power_integral(model, s_minus, 0.5)
    return (
        0.5 * d
        + (energy - 1.0 / d) / gap
        + 1.0 / (d * d_plus)
        + (1.0 + d / gap) * model.omega0
    )
