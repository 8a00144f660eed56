"""Periodic Stokes waves in hodograph variables.

The unknown is the height function h(q, p) on one half period of an even,
Lambda0-periodic wave. q is discretised by cosine collocation, p by
Chebyshev-Lobatto collocation. The period is held fixed and the physical
period enters through the scaling parameter lam = Lambda0 / Lambda.
"""
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import _spectral as sp
from .dispersion import alpha_profile, tau_star
from .report import dumps
from .errors import (
    HodographBreakdownError,
    NoSolutionError,
    NonConvergenceError,
)
from .frechet import PhysicalWave
from .spectra import SpectrumReport

BREAKDOWN = 1e-8
NEWTON_TOL = 1e-10


@dataclass
class HodoGrid:
    n_q: int
    n_p: int
    tau: float
    M: int = field(init=False)
    q: np.ndarray = field(init=False, repr=False)
    p: np.ndarray = field(init=False, repr=False)
    Dq_e: np.ndarray = field(init=False, repr=False)
    Dq_o: np.ndarray = field(init=False, repr=False)
    Dp: np.ndarray = field(init=False, repr=False)
    wp: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_q % 2 or self.n_q < 4:
            raise ValueError("n_q must be even and at least 4")
        self.M = self.n_q // 2
        theta = np.pi * np.arange(self.M + 1) / self.M
        self.q = theta / self.tau
        De, Do = sp.cosine_diff(self.M)
        self.Dq_e = De * self.tau
        self.Dq_o = Do * self.tau
        self.p, self.Dp = sp.unit_cheb(self.n_p)
        self.wp = sp.cheb_weights(self.n_p)

    @property
    def shape(self):
        return (self.n_p + 1, self.M + 1)

    @property
    def half_period(self):
        return math.pi / self.tau


@dataclass
class WaveField:
    """h on the (p, q) grid; rows are p-nodes (p = 0 first), columns q-nodes."""

    h: np.ndarray
    lam: float
    R: float
    stream: object
    grid: HodoGrid
    info: dict = field(default_factory=dict)

    @property
    def amplitude(self):
        return float(self.h[-1, 0] - self.h[-1, -1])

    @property
    def H(self):
        return self.stream.H_of(self.grid.p)[:, None] * np.ones(self.grid.M + 1)

    @property
    def w(self):
        return self.h - self.H

    def with_h(self, h, lam):
        return WaveField(h=h, lam=lam, R=self.R, stream=self.stream, grid=self.grid)


def default_np(stream, tau):
    # the kernel mode grows like exp(tau* H); deep streams need more nodes
    return 32 if tau * stream.d <= 4.0 else 64


def make_grid(stream, n_q=32, n_p=None):
    root = tau_star(stream)
    if root is None:
        raise NoSolutionError("supercritical stream: no dispersion root, no Stokes branch")
    tau = root[0]
    return HodoGrid(n_q, default_np(stream, tau) if n_p is None else n_p, tau)


def uniform_field(stream, n_q=32, n_p=None, R=None):
    g = make_grid(stream, n_q, n_p)
    H = stream.H_of(g.p)[:, None] * np.ones(g.M + 1)
    return WaveField(h=H, lam=1.0, R=stream.R if R is None else R, stream=stream, grid=g)


def _dp(g, f):
    return g.Dp @ f


def _dq(g, f, odd=False):
    return f @ (g.Dq_o if odd else g.Dq_e).T


def _residual(hb, w, lam, g):
    hp, hq = _dp(g, hb), _dq(g, hb)
    wp, wq = _dp(g, w), _dq(g, w)
    den = hp + wp
    if np.any(den <= BREAKDOWN):
        raise HodographBreakdownError(f"h_p + w_p = {den.min():.3e} <= {BREAKDOWN}")
    l2 = lam * lam
    J = (l2 * hp**2 * (2 * hq + wq) * wq - (2 * hp + wp) * (1 + l2 * hq**2) * wp) / (
        2 * hp**2 * den**2
    )
    I = -l2 * (hp * wq - hq * wp) / (hp * den)
    F = _dp(g, J) + _dq(g, I, odd=True)
    G = J[-1] + w[-1]
    return F[1:-1], G


def residual(w, field):
    """Interior residual F = J_p + I_q and surface residual G = J + w for h -> h + w."""
    return _residual(field.h, w, field.lam, field.grid)


def _linear(ht, lam, g, V):
    """Linearisation at ht applied to a batch V[b, i, j]; returns (A V, dG V)."""
    hp, hq = _dp(g, ht), _dq(g, ht)
    l2 = lam * lam
    Vp = np.einsum("ik,bkj->bij", g.Dp, V)
    Vq = np.einsum("bik,jk->bij", V, g.Dq_e)
    flux = (l2 * hq / hp**2) * Vq - ((1 + l2 * hq**2) / hp**3) * Vp
    Il = -l2 * (Vq / hp - (hq / hp**2) * Vp)
    AV = np.einsum("ik,bkj->bij", g.Dp, flux) + np.einsum("bik,jk->bij", Il, g.Dq_o)
    dG = flux[:, -1, :] + V[:, -1, :]
    return AV, dG


def frechet_apply(w, field):
    """(A w, N w): the interior operator and the surface operator (N w - w) at p = 1.

    N w equals minus the derivative of G, so ``residual`` and this pair are tied by
    dF = A w and dG = -(N w).
    """
    AV, dG = _linear(field.h, field.lam, field.grid, w[None])
    return AV[0], -dG[0]


def _lam_column(ht, lam, g):
    hp, hq = _dp(g, ht), _dq(g, ht)
    a = lam * hq**2 / hp**2
    dF = _dp(g, a) - 2 * lam * _dq(g, hq / hp, odd=True)
    return dF[1:-1], a[-1]


def _basis(g):
    n, m = g.n_p, g.M + 1
    nu = n * m
    V = np.zeros((nu, n + 1, m))
    idx = np.arange(nu)
    V[idx, 1 + idx // m, idx % m] = 1.0
    return V


def _jacobian(ht, lam, g):
    V = _basis(g)
    AV, dG = _linear(ht, lam, g, V)
    nu = V.shape[0]
    m = g.M + 1
    Jw = np.concatenate([AV[:, 1:-1, :].reshape(nu, -1), dG], axis=1).T
    fl, gl = _lam_column(ht, lam, g)
    jl = np.concatenate([fl.ravel(), gl])
    c = np.zeros(nu + 1)
    c[nu - m] = 1.0
    c[nu - 1] = -1.0
    J = np.zeros((nu + 1, nu + 1))
    J[:nu, :nu] = Jw
    J[:nu, nu] = jl
    J[nu] = c
    return J


def newton_solve(field, amplitude_target, tol=NEWTON_TOL, maxit=25):
    """Newton iteration for (w, lam) at fixed crest-to-trough amplitude.

    ``field`` supplies the base stream and the starting guess (predictor).
    Returns a new WaveField whose ``info`` holds the residual history.
    """
    g = field.grid
    H = field.H
    if amplitude_target == 0.0:
        out = field.with_h(H.copy(), 1.0)
        out.info = {"iterations": 0, "history": [0.0], "converged": True}
        return out
    W = field.h - H
    lam = float(field.lam)
    hist = []
    for it in range(maxit + 1):
        F, G = _residual(H, W, lam, g)
        c = W[-1, 0] - W[-1, -1] - amplitude_target
        r = np.concatenate([F.ravel(), G, [c]])
        hist.append(float(np.max(np.abs(r))))
        if hist[-1] <= tol:
            out = field.with_h(H + W, lam)
            out.info = {"iterations": it, "history": hist, "converged": True}
            return out
        if it == maxit:
            break
        J = _jacobian(H + W, lam, g)
        dx = np.linalg.solve(J, -r)
        W[1:] += dx[:-1].reshape(g.n_p, g.M + 1)
        lam += dx[-1]
    raise NonConvergenceError(
        f"Newton did not converge in {maxit} iterations (residual {hist[-1]:.3e})"
    )


def bernoulli_residual(field):
    """max |(1 + lam^2 h_q^2)/(2 h_p^2) + h - R| on the surface."""
    g = field.grid
    hp, hq = _dp(g, field.h)[-1], _dq(g, field.h)[-1]
    return float(np.max(np.abs((1 + field.lam**2 * hq**2) / (2 * hp**2) + field.h[-1] - field.R)))


def kernel_field(field):
    """alpha0(p) cos(tau* q) on the grid, alpha0 = gamma(H(p); tau*) H_p."""
    g = field.grid
    a, _ = alpha_profile(field.stream, g.tau, g.p)
    return a[:, None] * np.cos(g.tau * g.q)[None, :]


@dataclass
class BranchPoint:
    amplitude: float
    field: WaveField
    lam: float
    spectrum_summary: dict = field(default_factory=dict)
    status: str = "converged"


@dataclass
class BranchState:
    points: list
    flags: list = field(default_factory=list)

    @property
    def amplitudes(self):
        return np.array([pt.amplitude for pt in self.points])

    @property
    def lams(self):
        return np.array([pt.lam for pt in self.points])

    def periods(self):
        L0 = 2 * math.pi / self.points[0].field.grid.tau
        return L0 / self.lams


def start_branch(stream, n_q=32, n_p=None, R=None):
    f = uniform_field(stream, n_q, n_p, R)
    return BranchState(points=[BranchPoint(0.0, f, 1.0)])


def _summary(f, k=4):
    try:
        rep = hodograph_spectrum(f, k)
    except Exception as exc:  # spectrum is diagnostic only
        return {"error": type(exc).__name__}
    ev = rep.eigenvalues
    return {"mu": [float(x) for x in ev], "negative_count": rep.negative_count}


def branch_extend(state, d_amplitude, n_steps, spectra=True):
    """Amplitude continuation with a secant predictor and a Newton corrector.

    Stops at the first failure and records a flag instead of raising.
    """
    if not state.points:
        raise ValueError("empty branch")
    if d_amplitude == 0.0:
        state.flags.append("duplicate-point rejected")
        return state
    for _ in range(n_steps):
        last = state.points[-1]
        target = last.amplitude + d_amplitude
        f0 = last.field
        if len(state.points) == 1 or last.amplitude == 0.0:
            v0 = kernel_field(f0)
            scale = target / (v0[-1, 0] - v0[-1, -1])
            guess = f0.with_h(f0.H + scale * v0, 1.0)
        else:
            prev = state.points[-2]
            t = (target - last.amplitude) / (last.amplitude - prev.amplitude)
            h = last.field.h + t * (last.field.h - prev.field.h)
            lam = last.lam + t * (last.lam - prev.lam)
            guess = f0.with_h(h, lam)
        try:
            f = newton_solve(guess, target)
        except (NonConvergenceError, HodographBreakdownError, np.linalg.LinAlgError) as exc:
            state.flags.append(f"stopped at amplitude {target:.6g}: {type(exc).__name__}")
            break
        pt = BranchPoint(f.amplitude, f, f.lam)
        if spectra:
            pt.spectrum_summary = _summary(f)
        state.points.append(pt)
    return state


def fit_lambda2(state, degree=2):
    """Fit lam - 1 = c2 A^2 + c4 A^4 (+ ...) over the nonzero amplitudes.

    Returns (lambda2, coefficients) where lambda2 = 4 alpha0(1)^2 c2 refers to the
    kernel normalisation gamma(d) = 1 (A = 2 alpha0(1) t).
    """
    A = state.amplitudes[1:]
    y = state.lams[1:] - 1.0
    V = np.column_stack([A ** (2 * (k + 1)) for k in range(degree)])
    coef = np.linalg.lstsq(V, y, rcond=None)[0]
    a1 = 1.0 / state.points[0].field.stream.kappa
    return 4.0 * a1 * a1 * coef[0], coef


def _operator_blocks(field):
    g = field.grid
    V = _basis(g)
    AV, dG = _linear(field.h, field.lam, g, V)
    nu = V.shape[0]
    m = g.M + 1
    A = AV[:, 1:-1, :].reshape(nu, -1).T  # rows: interior nodes
    Nb = -dG.T  # rows: surface nodes
    ni = nu - m
    return A[:, :ni], A[:, ni:], Nb[:, :ni], Nb[:, ni:]


def hodograph_spectrum(field, k=4):
    """Lowest k eigenvalues of A w = mu w with N w = 0 at p = 1 and w = 0 at p = 0."""
    A_ii, A_ib, N_bi, N_bb = _operator_blocks(field)
    elim = -np.linalg.solve(N_bb, N_bi)
    A = A_ii + A_ib @ elim
    # work in cosine modes 0..M-1: the Nyquist mode has a vanishing discrete
    # q-derivative and would duplicate the q-independent eigenvalue
    g = field.grid
    m = g.M + 1
    C = np.cos(np.outer(np.arange(m), np.arange(m)) * np.pi / g.M)
    T = np.kron(np.eye(g.n_p - 1), C)
    keep = np.tile(np.arange(m) < g.M, g.n_p - 1)
    A = np.linalg.solve(T, A @ T)[np.ix_(keep, keep)]
    vals, vecs = np.linalg.eig(A)
    order = np.argsort(vals.real)
    vals, vecs = vals[order], vecs[:, order]
    k = min(k, vals.size)
    full = np.zeros((g.n_p + 1, g.M + 1, k))
    for j in range(k):
        coef = np.zeros(keep.size)
        coef[keep] = vecs[:, j].real
        vi = T @ coef
        vb = elim @ vi
        full[1:-1, :, j] = vi.reshape(g.n_p - 1, g.M + 1)
        full[-1, :, j] = vb
        s = np.max(np.abs(full[..., j]))
        full[..., j] /= s if s > 0 else 1.0
    neg = int(np.sum(vals.real < -1e-9))
    return SpectrumReport(
        eigenvalues=vals.real[:k],
        eigenvectors=full,
        negative_count=neg,
        nu0_reference=None,
        problem_tag="Hodograph2D",
        grid=(g.p, g.q),
        extra={"max_imag": float(np.max(np.abs(vals.imag[:k])))},
    )


def _h_coeffs(field):
    """Chebyshev (axis 0) by cosine (axis 1) coefficients of h."""
    return sp.cosine_coeffs(sp.cheb_coeffs(field.h, axis=0), axis=1)


def eval_h(field, q, p, dq=0, dp=0):
    """Spectral interpolant of h and its derivatives at scattered (q, p)."""
    g = field.grid
    c = _h_coeffs(field)
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    col = sp.cosine_eval(c, g.tau * q, deriv=dq) * g.tau**dq  # (..., n_p+1)
    col = np.moveaxis(col, -1, 0)
    return sp.cheb_eval(col, p, deriv=dp)


def reconstruct_physical(field, n_x=64, n_y=32, newton_iters=30):
    """Surface xi(X) = h(lam X, 1) and Psi on the grid Y = eta xi(X), eta Chebyshev."""
    g = field.grid
    lam = field.lam
    L = g.half_period / lam
    X = np.linspace(0.0, L, n_x + 1)
    q = lam * X
    c = _h_coeffs(field)
    cols = sp.cosine_eval(c, g.tau * q).T  # Chebyshev coefficients per X column
    cols_q = (sp.cosine_eval(c, g.tau * q, deriv=1) * g.tau).T
    xi = sp.cheb_eval(cols, np.ones(n_x + 1))
    xi_x = lam * sp.cheb_eval(cols_q, np.ones(n_x + 1))
    # monotonicity of each column on a fine p-sample
    pf = np.linspace(0.0, 1.0, 4 * g.n_p + 1)[:, None] * np.ones(n_x + 1)
    if np.any(sp.cheb_eval(cols, pf, deriv=1) <= BREAKDOWN):
        raise HodographBreakdownError("non-monotone hodograph column")
    eta = sp.unit_cheb(n_y)[0]
    Y = eta[None, :] * xi[:, None]  # (n_x+1, n_y+1)
    P = np.clip(field.stream.U_of(Y), 0.0, 1.0).T  # initial guess, (n_y+1, n_x+1)
    Yt = Y.T
    for _ in range(newton_iters):
        r = sp.cheb_eval(cols, P) - Yt
        P = np.clip(P - r / sp.cheb_eval(cols, P, deriv=1), 0.0, 1.0)
        if np.max(np.abs(r)) < 1e-14:
            break
    P[0], P[-1] = 0.0, 1.0
    return PhysicalWave(
        X=X,
        eta=eta,
        xi=xi,
        xi_x=xi_x,
        psi=P.T.copy(),
        R=field.R,
        omega=list(field.stream.model.coeffs),
        s=field.stream.s,
        L=L,
        periodic=True,
    )


def flow_force(wave, x_positions, form="invariant"):
    """Flow force S(X) at each X by Clenshaw-Curtis quadrature in eta.

    ``form="invariant"`` integrates (Psi_Y^2 - Psi_X^2)/2 + R - Y + int_Psi^1 omega,
    the momentum flux, which is independent of X for every solution.
    ``form="literal"`` drops the factor 1/2 on the kinetic terms; it agrees
    with the invariant form only up to the X-dependent term int (Psi_Y^2 - Psi_X^2)/2.
    """
    if form not in ("invariant", "literal"):
        raise ValueError("form must be 'invariant' or 'literal'")
    kin = 0.5 if form == "invariant" else 1.0
    model = wave.model
    x_positions = np.atleast_1d(np.asarray(x_positions, dtype=float))
    P, Pe, Px = wave.fields_at(x_positions)
    xi = wave.xi_at(x_positions)
    xi_x = wave.xi_at(x_positions, deriv=1)
    eta = wave.eta
    Y = eta[None, :] * xi[:, None]
    PsiY = Pe / xi[:, None]
    PsiX = Px - eta[None, :] * (xi_x / xi)[:, None] * Pe
    om1 = float(model.Om(1.0))
    integrand = kin * (PsiY**2 - PsiX**2) + wave.R - Y + om1 - model.Om(P)
    wts = sp.cheb_weights(eta.size - 1)
    return [float(v) for v in (integrand @ wts) * xi]


# ---------------------------------------------------------------- persistence


def _arr(a):
    return np.asarray(a).tolist()


def field_to_dict(f):
    g = f.grid
    return {
        "n_q": g.n_q,
        "n_p": g.n_p,
        "tau_star": g.tau,
        "lambda": f.lam,
        "R": f.R,
        "amplitude": f.amplitude,
        "omega": list(f.stream.model.coeffs),
        "s": f.stream.s,
        "p": _arr(g.p),
        "q": _arr(g.q),
        "h": _arr(f.h),
    }


def field_from_dict(d, stream=None):
    from .stream import solve_stream
    from .vorticity import VorticityModel

    if stream is None:
        stream = solve_stream(VorticityModel(tuple(d["omega"])), d["s"])
    g = HodoGrid(d["n_q"], d["n_p"], d["tau_star"])
    return WaveField(h=np.array(d["h"]), lam=d["lambda"], R=d["R"], stream=stream, grid=g)


def branch_to_json(state):
    return dumps(
        {
            "points": [
                {
                    "amplitude": pt.amplitude,
                    "lambda": pt.lam,
                    "status": pt.status,
                    "spectrum_summary": pt.spectrum_summary,
                    "field": field_to_dict(pt.field),
                }
                for pt in state.points
            ],
            "flags": state.flags,
        },
    )


def branch_from_json(text):
    d = json.loads(text)
    stream = None
    pts = []
    for item in d["points"]:
        f = field_from_dict(item["field"], stream)
        stream = f.stream
        pts.append(
            BranchPoint(item["amplitude"], f, item["lambda"], item.get("spectrum_summary", {}), item.get("status", "converged"))
        )
    return BranchState(points=pts, flags=list(d.get("flags", [])))
