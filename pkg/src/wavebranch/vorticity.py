"""Polynomial vorticity functions and the scalars derived from them."""
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import DomainError

_SLACK = 1e-12
MAX_DEGREE = 8


class Case(str, Enum):
    CaseI = "CaseI"
    CaseII = "CaseII"
    CaseIII = "CaseIII"


def _check_unit(x, what="p"):
    x = np.asarray(x, dtype=float)
    if np.any(x < -_SLACK) or np.any(x > 1 + _SLACK):
        raise DomainError(f"{what} outside [0, 1]: {x}")
    return np.clip(x, 0.0, 1.0)


def _maximizers(coefs, n_grid=4001):
    """Global maximum of a polynomial on [0, 1] and the set of maximizers.

    Critical points come from sign changes of the derivative on a dense grid,
    refined by bisection; the endpoints are always candidates.
    """
    dc = P.polyder(coefs) if len(coefs) > 1 else np.zeros(1)
    cands = [0.0, 1.0]
    if np.any(dc != 0):
        grid = np.linspace(0.0, 1.0, n_grid)
        v = P.polyval(grid, dc)
        for i in np.nonzero(v[:-1] * v[1:] < 0)[0]:
            a, b = grid[i], grid[i + 1]
            fa = v[i]
            for _ in range(80):
                m = 0.5 * (a + b)
                fm = P.polyval(m, dc)
                if fa * fm <= 0:
                    b = m
                else:
                    a, fa = m, fm
            cands.append(0.5 * (a + b))
        cands.extend(grid[1:-1][v[1:-1] == 0.0])
    cands = np.array(cands)
    vals = P.polyval(cands, coefs)
    vmax = float(np.max(vals))
    scale = max(1.0, abs(vmax))
    arg = cands[vals >= vmax - 1e-13 * scale]
    return vmax, arg


@dataclass(frozen=True)
class VorticityModel:
    """Vorticity omega(p) = sum coeffs[k] p**k on [0, 1].

    ``Omega`` is the antiderivative vanishing at 0, ``s0 = sqrt(2 max Omega)``
    and ``omega0 = max omega``; ``case_tag`` is set by :func:`classify`.
    """

    coeffs: tuple
    s0: float = field(init=False)
    omega0: float = field(init=False)
    case_tag: Case = field(init=False)
    Omega_coeffs: np.ndarray = field(init=False, repr=False, compare=False)
    domega_coeffs: np.ndarray = field(init=False, repr=False, compare=False)
    Omega_max: float = field(init=False, repr=False)
    Omega_min: float = field(init=False, repr=False)

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=float))
        if c.ndim != 1 or c.size == 0:
            raise DomainError("omega needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise DomainError("omega coefficients must be finite")
        c = np.trim_zeros(c, "b")
        if c.size == 0:
            c = np.zeros(1)
        if c.size - 1 > MAX_DEGREE:
            raise DomainError(f"degree {c.size - 1} exceeds {MAX_DEGREE}")
        object.__setattr__(self, "coeffs", tuple(float(x) for x in c))
        Om = P.polyint(c)
        object.__setattr__(self, "Omega_coeffs", Om)
        object.__setattr__(self, "domega_coeffs", P.polyder(c) if c.size > 1 else np.zeros(1))
        tag, s0, w0, omax, omin = _classify(c, Om)
        object.__setattr__(self, "case_tag", tag)
        object.__setattr__(self, "s0", s0)
        object.__setattr__(self, "omega0", w0)
        object.__setattr__(self, "Omega_max", omax)
        object.__setattr__(self, "Omega_min", omin)

    # evaluation without domain checks; used internally on validated grids
    def w(self, p):
        return P.polyval(p, np.asarray(self.coeffs))

    def dw(self, p):
        return P.polyval(p, self.domega_coeffs)

    def Om(self, t):
        return P.polyval(t, self.Omega_coeffs)

    @property
    def degree(self):
        return len(self.coeffs) - 1


def _classify(c, Om):
    omax, arg = _maximizers(Om)
    omin = -_maximizers(-Om)[0]
    w0 = _maximizers(c)[0]
    s0 = float(np.sqrt(max(2.0 * omax, 0.0)))
    interior = np.any((arg > 1e-9) & (arg < 1 - 1e-9))
    at0 = np.any(arg <= 1e-9)
    at1 = np.any(arg >= 1 - 1e-9)
    w_0 = P.polyval(0.0, c)
    w_1 = P.polyval(1.0, c)
    if interior:
        tag = Case.CaseI
    elif at0 and at1:
        # both ends tie; the strict slopes decide, zero slope at an end is CaseI
        tag = Case.CaseII if (w_0 < 0 and w_1 > 0) else Case.CaseI
    elif at0:
        tag = Case.CaseII if w_0 < 0 else Case.CaseI
    else:
        tag = Case.CaseIII if w_1 > 0 else Case.CaseI
    return tag, s0, float(w0), float(omax), float(omin)


def omega_eval(model, p):
    """omega(p) for p in [0, 1]."""
    p = _check_unit(p)
    out = model.w(p)
    return float(out) if np.ndim(out) == 0 else out


def capital_omega(model, tau):
    """Omega(tau) = int_0^tau omega, from the antiderivative polynomial."""
    tau = _check_unit(tau, "tau")
    out = model.Om(tau)
    return float(out) if np.ndim(out) == 0 else out


def classify(model):
    """(case_tag, s0, omega0) recomputed from the coefficients."""
    c = np.asarray(model.coeffs)
    tag, s0, w0, _, _ = _classify(c, P.polyint(c))
    return tag, s0, w0


BUILTIN = {
    "zero": (0.0,),
    "linear": (1.0, -2.0),
    "ramp": (0.0, 0.3),
    "const_neg": (-0.5,),
}


def builtin_models():
    """The verification matrix {0, 1-2p, 0.3p, -0.5}."""
    return {k: VorticityModel(v) for k, v in BUILTIN.items()}
