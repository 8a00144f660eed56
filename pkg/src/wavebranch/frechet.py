"""Frechet-derivative spectrum of a steady wave in the physical plane.

The wave domain {0 < Y < xi(X), 0 < X < L} is mapped to the rectangle
(X, eta = Y / xi(X)) and -Laplace - omega'(Psi) with the surface Robin
condition is discretised by bilinear finite elements in the weighted form.
Neumann conditions at X = 0 and X = L select the even class.
"""
import json
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sps
from scipy.sparse.linalg import eigsh

from . import _spectral as sp
from .report import dumps
from .errors import DomainError, StagnationError, TruncationWarning
from .spectra import SpectrumReport, nu0
from .vorticity import VorticityModel

STAGNATION = 1e-8


@dataclass
class PhysicalWave:
    """Even wave on 0 <= X <= L; eta runs over Chebyshev-Lobatto nodes of [0, 1].

    X-dependence is represented by cosine series of period 2L, which is exact
    for half-period Stokes waves and consistent with the Neumann truncation of
    solitary-like waves.
    """

    X: np.ndarray
    eta: np.ndarray
    xi: np.ndarray
    xi_x: np.ndarray
    psi: np.ndarray  # (len(X), len(eta))
    R: float
    omega: list
    s: float
    L: float
    periodic: bool = False
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def model(self):
        m = self._cache.get("model")
        if m is None:
            m = self._cache["model"] = VorticityModel(tuple(self.omega))
        return m

    @property
    def stream_limit(self):
        st = self._cache.get("stream")
        if st is None:
            from .stream import solve_stream

            st = self._cache["stream"] = solve_stream(self.model, self.s)
        return st

    def _coef(self):
        c = self._cache.get("coef")
        if c is None:
            c = self._cache["coef"] = (
                sp.cosine_coeffs(self.xi),
                sp.cosine_coeffs(self.psi.T, axis=-1),
            )
        return c

    def xi_at(self, x, deriv=0):
        a, _ = self._coef()
        k = math.pi / self.L
        return sp.cosine_eval(a, k * np.asarray(x, dtype=float), deriv) * k**deriv

    def fields_at(self, x):
        """(Psi, Psi_eta, Psi_X at fixed eta) at X = x on the eta nodes."""
        _, b = self._coef()
        k = math.pi / self.L
        x = np.asarray(x, dtype=float)
        P = sp.cosine_eval(b, k * x)
        Px = sp.cosine_eval(b, k * x, 1) * k
        De = sp.unit_cheb(self.eta.size - 1)[1]
        return P, P @ De.T, Px

    def psi_at(self, x, eta):
        """Spectral interpolant of Psi at scattered points (x, eta)."""
        P, _, _ = self.fields_at(np.ravel(x))
        c = sp.cheb_coeffs(P, axis=1).T  # (n_eta, npts)
        return sp.cheb_eval(c, np.ravel(eta)).reshape(np.shape(x))


def uniform_wave(stream, L, n_x=64, n_y=32):
    """The flat wave xi = d, Psi = U(Y) on [0, L]."""
    X = np.linspace(0.0, L, n_x + 1)
    eta = sp.unit_cheb(n_y)[0]
    psi = np.tile(stream.U_of(eta * stream.d), (n_x + 1, 1))
    psi[:, 0], psi[:, -1] = 0.0, 1.0
    w = PhysicalWave(
        X=X, eta=eta, xi=np.full(n_x + 1, stream.d), xi_x=np.zeros(n_x + 1), psi=psi,
        R=stream.R, omega=list(stream.model.coeffs), s=stream.s, L=float(L), periodic=False,
    )
    w._cache["stream"] = stream
    return w


def validate_wave(wave, tol=1e-8):
    """Boundary values and unidirectionality; returns a dict of defects."""
    _, Pe, _ = wave.fields_at(wave.X)
    return {
        "bottom": float(np.max(np.abs(wave.psi[:, 0]))),
        "surface": float(np.max(np.abs(wave.psi[:, -1] - 1.0))),
        "min_psi_Y": float(np.min(Pe / wave.xi[:, None])),
        "ok": bool(
            np.max(np.abs(wave.psi[:, 0])) <= tol
            and np.max(np.abs(wave.psi[:, -1] - 1.0)) <= tol
            and np.min(Pe) > 0
        ),
    }


@dataclass
class RobinCoefficient:
    X: np.ndarray
    rho: np.ndarray


def _surface_derivs(wave, x):
    k = math.pi / wave.L
    _, b = wave._coef()
    De = sp.unit_cheb(wave.eta.size - 1)[1]
    d1 = De[-1]
    d2 = (De @ De)[-1]
    P = sp.cosine_eval(b, k * x)
    PX = sp.cosine_eval(b, k * x, 1) * k
    return P @ d1, P @ d2, PX @ d1


def rho_at(wave, x):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    Pe, Pee, PeX = _surface_derivs(wave, x)
    xi = wave.xi_at(x)
    xp = wave.xi_at(x, 1)
    PsiY = Pe / xi
    if np.any(PsiY < STAGNATION):
        raise StagnationError(f"surface Psi_Y = {PsiY.min():.3e} below {STAGNATION}")
    PsiX = -xp * PsiY
    PsiYY = Pee / xi**2
    PsiXY = (PeX - (xp / xi) * Pee) / xi - xp * Pe / xi**2
    return (1.0 + PsiX * PsiXY + PsiY * PsiYY) / (PsiY * np.sqrt(PsiX**2 + PsiY**2))


def robin_coefficient(wave):
    """rho(X) on the surface from spectral surface derivatives of Psi."""
    return RobinCoefficient(X=wave.X.copy(), rho=rho_at(wave, wave.X))


_G2 = np.array([-1.0, 1.0]) / math.sqrt(3.0)


def assemble(wave, n_x, n_y, L=None):
    """Stiffness and mass matrices on the mapped rectangle (bottom row removed).

    Returns (K, M, X, eta) with node (ix, iy) stored at (iy - 1)*(n_x + 1) + ix.
    """
    L = wave.L if L is None else float(L)
    flat = np.allclose(wave.xi, wave.xi[0]) and np.allclose(wave.xi_x, 0.0)
    if abs(L - wave.L) > 1e-12 and not flat:
        raise DomainError("L may differ from the wave's own length only for flat waves")
    X = np.linspace(0.0, L, n_x + 1)
    eta = np.linspace(0.0, 1.0, n_y + 1)
    hx, he = L / n_x, 1.0 / n_y
    gx = (0.5 * (X[:-1] + X[1:]))[:, None] + 0.5 * hx * _G2[None, :]  # (n_x, 2)
    ge = (0.5 * (eta[:-1] + eta[1:]))[:, None] + 0.5 * he * _G2[None, :]  # (n_y, 2)
    gxf, gef = gx.ravel(), ge.ravel()
    if flat:
        xi = np.full(gxf.size, wave.xi[0])
        xp = np.zeros(gxf.size)
        st = wave.stream_limit
        Psi = np.tile(st.U_of(gef * wave.xi[0]), (gxf.size, 1))
        rho_top = np.full(gxf.size, float(rho_at(wave, np.array([0.0]))[0]))
    else:
        xi = wave.xi_at(gxf)
        xp = wave.xi_at(gxf, 1)
        P, _, _ = wave.fields_at(gxf)
        c = sp.cheb_coeffs(P, axis=1).T
        Psi = sp.cheb_eval(c, np.tile(gef, (gxf.size, 1)).T).T  # (x pts, eta pts)
        rho_top = rho_at(wave, gxf)
    pot = wave.model.dw(Psi)  # (2 n_x, 2 n_y)
    # reshape to (ex, gx, ey, gy)
    xi4 = xi.reshape(n_x, 2)[:, :, None, None]
    xp4 = xp.reshape(n_x, 2)[:, :, None, None]
    et4 = ge[None, None, :, :]
    pot4 = pot.reshape(n_x, 2, n_y, 2)
    G11 = xi4 * np.ones_like(et4)
    G12 = -et4 * xp4
    G22 = (1.0 + et4**2 * xp4**2) / xi4
    # bilinear shape functions on the reference square; local order (0,0),(1,0),(0,1),(1,1)
    t = 0.5 * (1.0 + _G2)
    Nx = np.stack([1 - t, t])  # (2 local, 2 gauss)
    dNx = np.array([[-1.0, -1.0], [1.0, 1.0]]) / hx
    dNe = np.array([[-1.0, -1.0], [1.0, 1.0]]) / he
    loc = [(0, 0), (1, 0), (0, 1), (1, 1)]
    N = np.array([Nx[a, :, None] * Nx[b, None, :] for (a, b) in loc])  # (4, gx, gy)
    NX = np.array([dNx[a, :, None] * Nx[b, None, :] for (a, b) in loc])
    NE = np.array([Nx[a, :, None] * dNe[b, None, :] for (a, b) in loc])
    wq = 0.25 * hx * he  # 2x2 Gauss weights are 1 on [-1, 1]^2
    # element matrices (ex, ey, a, b)
    def form(c, A, B):
        return wq * np.einsum("xgyh,agh,bgh->xyab", c, A, B)

    Ke = (
        form(G11, NX, NX)
        + form(G12, NX, NE)
        + form(G12, NE, NX)
        + form(G22, NE, NE)
        - form(pot4 * xi4, N, N)
    )
    Me = form(xi4 * np.ones_like(et4), N, N)
    ix = np.arange(n_x)[:, None]
    iy = np.arange(n_y)[None, :]
    nodes = np.stack(
        [iy * (n_x + 1) + ix, iy * (n_x + 1) + ix + 1, (iy + 1) * (n_x + 1) + ix, (iy + 1) * (n_x + 1) + ix + 1],
        axis=-1,
    )  # (ex, ey, 4)
    rows = np.broadcast_to(nodes[..., :, None], Ke.shape).ravel()
    cols = np.broadcast_to(nodes[..., None, :], Ke.shape).ravel()
    ntot = (n_x + 1) * (n_y + 1)
    K = sps.coo_matrix((Ke.ravel(), (rows, cols)), shape=(ntot, ntot)).tocsr()
    M = sps.coo_matrix((Me.ravel(), (rows, cols)), shape=(ntot, ntot)).tocsr()
    # surface term: -int rho w^2 sqrt(1 + xi'^2) dX along eta = 1
    sfac = (rho_top * np.sqrt(1.0 + xp**2)).reshape(n_x, 2)
    Se = 0.5 * hx * np.einsum("xg,ag,bg->xab", sfac, Nx, Nx)
    top = n_y * (n_x + 1) + np.stack([np.arange(n_x), np.arange(n_x) + 1], axis=-1)
    r = np.broadcast_to(top[:, :, None], Se.shape).ravel()
    c = np.broadcast_to(top[:, None, :], Se.shape).ravel()
    K = K - sps.coo_matrix((Se.ravel(), (r, c)), shape=(ntot, ntot)).tocsr()
    keep = np.arange(n_x + 1, ntot)
    K = K[keep][:, keep].tocsc()
    M = M[keep][:, keep].tocsc()
    return K, M, X, eta


def _lowest_eigs(K, M, k, estimate):
    shift = min(0.0, estimate) - 1.0
    for _ in range(30):
        vals, vecs = eigsh(K, k=k, M=M, sigma=shift, which="LM")
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        if vals[0] > shift:
            return vals, vecs, shift
        shift = vals[0] - 1.0 - abs(vals[0])
    return vals, vecs, shift


def physical_spectrum(wave, k=4, L=None, n_x=128, n_y=128, estimate=None):
    """Lowest k eigenvalues of -Laplace w - omega'(Psi) w = mu w, d_n w = rho w on the surface."""
    K, M, X, eta = assemble(wave, n_x, n_y, L)
    if estimate is None:
        estimate = nu0(wave.stream_limit, 1024)
    kk = k
    while True:
        vals, vecs, shift = _lowest_eigs(K, M, kk, estimate)
        if vals[-1] >= -1e-9 or kk >= K.shape[0] - 2:
            break
        kk *= 2  # every computed eigenvalue is negative: widen the window
    full = np.zeros((n_y + 1, n_x + 1, kk))
    full[1:] = vecs.reshape(n_y, n_x + 1, kk)
    for j in range(kk):
        v = full[..., j]
        i = np.argmax(np.abs(v))
        full[..., j] = v / v.flat[i]
    neg = int(np.sum(vals < -1e-9))
    # truncation diagnostic on the lowest mode
    m0 = full[..., 0] ** 2
    tail = float(m0[:, X >= 0.9 * X[-1]].sum() / m0.sum())
    if not wave.periodic and tail > 1e-3:
        warnings.warn(
            f"lowest mode keeps {tail:.2e} of its mass in the last 10% of [0, L]",
            TruncationWarning,
            stacklevel=2,
        )
    return SpectrumReport(
        eigenvalues=vals[:k],
        eigenvectors=full[..., :k],
        negative_count=neg,
        nu0_reference=float(estimate),
        problem_tag="Physical2D",
        grid=(X, eta),
        extra={"shift": shift, "tail_mass": tail, "symmetry_defect": sym_defect(K)},
    )


def sym_defect(K):
    D = K - K.T
    return float(abs(D).max() / max(abs(K).max(), 1e-300))


def negative_count_series(waves, k=4, **kw):
    return [physical_spectrum(w, k, **kw).negative_count for w in waves]


def psi_x_check(wave, n_x=128, n_y=64):
    """Rayleigh quotient of the discrete operator on the odd function Psi_X.

    Psi_X solves the homogeneous linearised problem exactly, so the quotient
    is a discretisation-size number; it is compared with the even spectrum by the caller.
    """
    K, M, X, eta = assemble(wave, n_x, n_y)
    xs = X
    P, Pe, Px = wave.fields_at(xs)
    xi = wave.xi_at(xs)
    xp = wave.xi_at(xs, 1)
    cE = sp.cheb_coeffs(Px - wave.eta[None, :] * (xp / xi)[:, None] * Pe, axis=1).T
    v = sp.cheb_eval(cE, np.tile(eta, (xs.size, 1)).T)  # (n_y+1, n_x+1)
    v[:, 0] = v[:, -1] = 0.0  # odd: vanishes at X = 0 and X = L
    v = v[1:].ravel()
    nrm = float(v @ (M @ v))
    if nrm == 0:
        return 0.0, 0.0
    return float(v @ (K @ v)) / nrm, math.sqrt(nrm)


def tail_decay_rate(wave):
    """Slope of log|xi - d| over the tail half of [0, L]."""
    d = wave.stream_limit.d
    sel = wave.X >= 0.5 * wave.L
    y = np.log(np.maximum(np.abs(wave.xi[sel] - d), 1e-300))
    return float(np.polyfit(wave.X[sel], y, 1)[0])


def wave_to_json(wave):
    return dumps(
        {
            "X": wave.X.tolist(),
            "eta": wave.eta.tolist(),
            "xi": wave.xi.tolist(),
            "xi_x": wave.xi_x.tolist(),
            "psi": wave.psi.tolist(),
            "R": wave.R,
            "omega": list(wave.omega),
            "s": wave.s,
            "L": wave.L,
            "periodic": wave.periodic,
        },
    )


def wave_from_json(text):
    d = json.loads(text)
    return PhysicalWave(
        X=np.array(d["X"]), eta=np.array(d["eta"]), xi=np.array(d["xi"]),
        xi_x=np.array(d["xi_x"]), psi=np.array(d["psi"]), R=d["R"], omega=d["omega"],
        s=d["s"], L=d["L"], periodic=d["periodic"],
    )
