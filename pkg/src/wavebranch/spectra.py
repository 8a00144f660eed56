"""One-dimensional spectral problems on the uniform stream.

The interval Sturm-Liouville problem in Y with the surface Robin condition, a
quadratic-form coercivity probe, and the two-point problem in the hodograph
variable p used by the expansion module.
"""
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_bvp
from scipy.linalg import solve_banded

from . import _kernels as K
from .dispersion import gamma_solve, tau_star
from .errors import DiscretizationError, NearResonanceError

NEG_TOL = 1e-9


@dataclass
class SpectrumReport:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns
    negative_count: int
    nu0_reference: float | None
    problem_tag: str
    grid: object = None
    extra: dict = field(default_factory=dict)

    def to_dict(self, with_vectors=False):
        out = {
            "problem_tag": self.problem_tag,
            "eigenvalues": [float(x) for x in self.eigenvalues],
            "negative_count": int(self.negative_count),
            "nu0_reference": None if self.nu0_reference is None else float(self.nu0_reference),
        }
        out.update({k: v for k, v in self.extra.items() if np.isscalar(v)})
        if with_vectors:
            out["eigenvectors"] = np.asarray(self.eigenvectors).T.tolist()
        return out


def interval_matrix(stream, n):
    """Symmetric tridiagonal form of -v'' - omega'(U) v on y_j = j d/n, j = 1..n.

    The Robin condition enters through a ghost node; the last row is halved and
    the unknown there rescaled by 1/sqrt(2) to restore symmetry.
    """
    h = stream.d / n
    y = np.linspace(h, stream.d, n)
    c = stream.model.dw(stream.U_of(y))
    diag = 2.0 / h**2 - c
    off = np.full(n - 1, -1.0 / h**2)
    diag[-1] = 2.0 * (1.0 - h * stream.rho0) / h**2 - c[-1]
    off[-1] *= math.sqrt(2.0)
    return y, diag, off


def _inverse_iteration(diag, off, lam, iters=3):
    n = diag.size
    ab = np.zeros((3, n))
    ab[0, 1:] = off
    ab[1] = diag - lam - 1e-10 * max(1.0, abs(lam))
    ab[2, :-1] = off
    x = np.random.default_rng(0).standard_normal(n)
    for _ in range(iters):
        x = solve_banded((1, 1), ab, x)
        x /= np.linalg.norm(x)
    return x


def _lowest(stream, n, k):
    y, diag, off = interval_matrix(stream, n)
    scale = max(abs(diag).max(), 1.0)
    vals = K.tridiag_lowest(diag, off, k, 1e-13 * scale)
    return y, diag, off, vals


def interval_spectrum(stream, k=1, n=2048, check=True):
    """Lowest k eigenvalues of -v'' - omega'(U) v = nu v, v(0) = 0, v'(d) = rho0 v(d)."""
    y, diag, off, vals = _lowest(stream, n, k)
    if check:
        vals2 = _lowest(stream, 2 * n, k)[3]
        rel = np.abs(vals - vals2) / np.maximum(1.0, np.abs(vals2))
        if np.any(rel > 1e-5):
            raise DiscretizationError(f"Richardson check failed: {rel.max():.2e}")
    h = stream.d / n
    vecs = np.empty((n, k))
    for j, lam in enumerate(vals):
        x = _inverse_iteration(diag, off, lam)
        v = x.copy()
        v[-1] *= math.sqrt(2.0)  # undo the symmetrising scale
        wts = np.full(n, h)
        wts[-1] = 0.5 * h
        v /= math.sqrt(np.sum(wts * v * v))
        if v[0] < 0:
            v = -v
        vecs[:, j] = v
    neg = int(K.sturm_count(diag, off, -NEG_TOL))
    return SpectrumReport(
        eigenvalues=vals,
        eigenvectors=vecs,
        negative_count=neg,
        nu0_reference=float(vals[0]),
        problem_tag="Interval1D",
        grid=y,
    )


def nu0(stream, n=2048):
    return float(interval_spectrum(stream, 1, n, check=False).eigenvalues[0])


def quadratic_form(stream, y_nodes, v_nodes, n_gauss=8):
    """int_0^d (v'^2 - omega'(U) v^2) dY - rho0 v(d)^2 for piecewise-linear v."""
    gx, gw = np.polynomial.legendre.leggauss(n_gauss)
    a, b = y_nodes[:-1], y_nodes[1:]
    va, vb = v_nodes[:-1], v_nodes[1:]
    h = b - a
    slope = (vb - va) / h
    t = 0.5 * (gx + 1.0)
    yq = a[:, None] + h[:, None] * t
    vq = va[:, None] + (vb - va)[:, None] * t
    c = stream.model.dw(stream.U_of(yq))
    pot = np.sum(0.5 * h[:, None] * gw * c * vq**2)
    return float(np.sum(h * slope**2) - pot - stream.rho0 * v_nodes[-1] ** 2)


def coercivity_values(stream, trials=100, seed=0, n_nodes=24):
    rng = np.random.default_rng(seed)
    d = stream.d
    vals = []
    for _ in range(trials):
        m = int(rng.integers(3, n_nodes))
        y = np.concatenate([[0.0], np.sort(rng.uniform(0.0, d, m - 2)), [d]])
        y = np.unique(y)
        v = rng.standard_normal(y.size)
        v[0] = 0.0
        nrm = math.sqrt(np.sum(np.diff(y) * (v[:-1] ** 2 + v[:-1] * v[1:] + v[1:] ** 2) / 3.0))
        if nrm == 0:
            continue
        vals.append(quadratic_form(stream, y, v / nrm))
    root = tau_star(stream)
    if root is not None:
        g = gamma_solve(stream, root[0])
        yy = np.linspace(0.0, d, 4097)
        gg = g(yy)
        nrm = math.sqrt(np.trapezoid(gg * gg, yy))
        vals.append(quadratic_form(stream, yy, gg / nrm))
    return np.array(vals)


def coercivity_check(stream, trials=100, seed=0):
    """True iff the surface-corrected Dirichlet form is positive on all trial functions."""
    return bool(np.all(coercivity_values(stream, trials, seed) > 0))


def _as_nodes(f, p):
    if f is None:
        return np.zeros_like(p)
    if callable(f):
        return np.asarray(f(p), dtype=float) * np.ones_like(p)
    f = np.asarray(f, dtype=float)
    if f.size != p.size:
        raise ValueError("sampled data must live on the solver grid")
    return f


def _conservative_system(stream, tau, n):
    h = 1.0 / n
    p = np.linspace(0.0, 1.0, n + 1)
    pm = 0.5 * (p[:-1] + p[1:])
    a = 1.0 / stream.Hp_of(pm) ** 3
    inv_hp = 1.0 / stream.Hp_of(p)
    # unknowns u_1..u_n, equations multiplied by h
    diag = (a[:-1] + a[1:]) / h + h * tau**2 * inv_hp[1:-1]
    diag = np.append(diag, a[-1] / h + 0.5 * h * tau**2 * inv_hp[-1] - 1.0)
    off = -a[1:] / h
    return p, pm, a, diag, off


def _conservative_solve(stream, tau, rhs, c, flux, n):
    p, pm, a, diag, off = _conservative_system(stream, tau, n)
    h = 1.0 / n
    f = _as_nodes(rhs, p)
    b = h * f[1:]
    b[-1] = 0.5 * h * f[-1] - c
    if flux is not None:
        # -(u_p/H_p^3 + phi)_p with natural boundary -(u_p/H_p^3 + phi) + u = c
        phm = _as_nodes(flux, pm)
        b[:-1] += phm[1:] - phm[:-1]
        b[-1] -= phm[-1]
    ab = np.zeros((3, n))
    ab[0, 1:] = off
    ab[1] = diag
    ab[2, :-1] = off
    u = np.concatenate([[0.0], solve_banded((1, 1), ab, b)])
    return p, u


def transformed_solve(stream, tau, F_rhs=None, c=0.0, n=2048, flux=None, richardson=True):
    """Solve -(u_p/H_p^3 + phi)_p + tau^2 u/H_p = F on (0,1), u(0) = 0,
    -(u_p/H_p^3 + phi) + u = c at p = 1.

    ``F_rhs`` and ``flux`` (phi) are callables of p or None. Second-order
    conservative differences; with ``richardson`` the n and 2n solutions are
    combined on the coarse nodes. Returns ``(p, u)``.
    """
    root = tau_star(stream)
    if root is not None and abs(abs(tau) - root[0]) < 1e-6:
        raise NearResonanceError(f"tau = {tau!r} within 1e-6 of tau* = {root[0]!r}")
    if flux is not None and not callable(flux):
        raise ValueError("flux must be callable")
    if F_rhs is not None and not callable(F_rhs) and richardson:
        raise ValueError("sampled right-hand sides require richardson=False")
    p, u = _conservative_solve(stream, tau, F_rhs, c, flux, n)
    if richardson:
        _, u2 = _conservative_solve(stream, tau, F_rhs, c, flux, 2 * n)
        u = (4.0 * u2[::2] - u) / 3.0
    return p, u


def conservative_residual(stream, tau, p, u, F_rhs=None, c=0.0):
    """Max-norm residual of the discrete conservative scheme on the given grid."""
    n = p.size - 1
    _, _, _, diag, off = _conservative_system(stream, tau, n)
    h = 1.0 / n
    f = _as_nodes(F_rhs, p)
    b = h * f[1:]
    b[-1] = 0.5 * h * f[-1] - c
    x = u[1:]
    Ax = diag * x
    Ax[:-1] += off * x[1:]
    Ax[1:] += off * x[:-1]
    return float(np.max(np.abs(Ax - b)))


def depth_route(stream, tau, F_rhs=None, c=0.0, tol=1e-10):
    """Same problem through v'' + omega'(U) v - tau^2 v = f in Y, v(0) = 0,
    v'(d) - rho0 v(d) = g, with f = -F(U(Y)), g = -c/kappa and u = v(H(p)) H_p.
    """
    model = stream.model
    Fc = (lambda q: np.zeros_like(q)) if F_rhs is None else F_rhs

    def rhs(y, z):
        U = stream.U_of(y)
        return np.vstack([z[1], (tau**2 - model.dw(U)) * z[0] - Fc(U)])

    def bc(za, zb):
        return np.array([za[0], zb[1] - stream.rho0 * zb[0] + c / stream.kappa])

    y = np.linspace(0.0, stream.d, 801)
    z0 = np.zeros((2, y.size))
    sol = solve_bvp(rhs, bc, y, z0, tol=tol, max_nodes=200000)
    if not sol.success:
        raise DiscretizationError("boundary-value collocation failed: " + sol.message)
    return lambda p: sol.sol(stream.H_of(p))[0] * stream.Hp_of(p)


def kernel_check(stream, n=1024):
    """Singular values of the homogeneous two-point system at tau* and the kernel vector.

    Returns ``(singular_values, p, kernel_vector)``; the vector is scaled to 1 at p = 1.
    """
    root = tau_star(stream)
    if root is None:
        raise NearResonanceError("no dispersion root: the operator has no kernel")
    p, _, _, diag, off = _conservative_system(stream, root[0], n)
    A = np.diag(diag) + np.diag(off, 1) + np.diag(off, -1)
    _, sv, vt = np.linalg.svd(A)
    v = np.concatenate([[0.0], vt[-1]])
    return sv, p, v / v[-1]


def spectral_solve(stream, tau, F_rhs=None, c=0.0, n=128, flux=None):
    """Chebyshev collocation for the same two-point problem.

    Returns ``(p, u, flux_total)`` on the unit_cheb nodes, where flux_total is
    u_p/H_p^3 + phi. Used where the profile is differentiated again downstream.
    """
    from ._spectral import unit_cheb

    root = tau_star(stream)
    if root is not None and abs(abs(tau) - root[0]) < 1e-6:
        raise NearResonanceError(f"tau = {tau!r} within 1e-6 of tau* = {root[0]!r}")
    p, D = unit_cheb(n)
    hp = stream.Hp_of(p)
    phi = _as_nodes(flux, p)
    f = _as_nodes(F_rhs, p)
    Q = D / hp[:, None] ** 3  # u -> u_p/H_p^3
    A = -D @ Q + np.diag(tau**2 / hp)
    b = f + D @ phi
    A[0] = 0.0
    A[0, 0] = 1.0
    b[0] = 0.0
    A[-1] = -Q[-1]
    A[-1, -1] += 1.0
    b[-1] = c + phi[-1]
    u = np.linalg.solve(A, b)
    return p, u, Q @ u + phi
