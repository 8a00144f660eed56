"""Pure numpy implementations of the hot loops.

Same signatures as the compiled ``_ckernels`` module; ``wavebranch._kernels``
picks one of the two at import time.
"""
import numpy as np

GL_NODES, GL_WEIGHTS = np.polynomial.legendre.leggauss(15)

_RESCALE = 1e100
_MAX_PANELS = 20000


def horner(coefs, x):
    """Evaluate ``sum coefs[k] x**k`` (increasing order)."""
    r = 0.0
    for c in coefs[::-1]:
        r = r * x + c
    return r


def _power_integrand(omega_int, s2, expo, t):
    return (s2 - 2.0 * np.polynomial.polynomial.polyval(t, omega_int)) ** expo


def _panel(omega_int, s2, expo, mode, a, b, lo, hi):
    # mode 0: plain, 1: tau = a + u^2, 2: tau = b - u^2
    half = 0.5 * (hi - lo)
    u = lo + half * (GL_NODES + 1.0)
    if mode == 0:
        f = _power_integrand(omega_int, s2, expo, u)
    elif mode == 1:
        f = _power_integrand(omega_int, s2, expo, a + u * u) * 2.0 * u
    else:
        f = _power_integrand(omega_int, s2, expo, b - u * u) * 2.0 * u
    return half * np.dot(GL_WEIGHTS, f)


def quad_power(omega_int, s2, expo, a, b, mode, abs_tol, rel_tol):
    """Adaptive Gauss-Legendre integral of ``(s2 - 2*Omega(t))**expo`` on [a, b].

    ``omega_int`` holds the coefficients of Omega. ``mode`` selects an endpoint
    substitution (0 none, 1 left, 2 right) that removes inverse square-root
    singularities. Returns ``(value, error_estimate)``.
    """
    omega_int = np.asarray(omega_int, dtype=float)
    if b <= a:
        return 0.0, 0.0
    if mode == 0:
        lo, hi = a, b
    else:
        lo, hi = 0.0, np.sqrt(b - a)
    whole = _panel(omega_int, s2, expo, mode, a, b, lo, hi)
    stack = [(lo, hi, whole)]
    total = 0.0
    err = 0.0
    panels = 0
    while stack:
        l, h, val = stack.pop()
        m = 0.5 * (l + h)
        left = _panel(omega_int, s2, expo, mode, a, b, l, m)
        right = _panel(omega_int, s2, expo, mode, a, b, m, h)
        est = abs(left + right - val)
        panels += 1
        width = (h - l) / (hi - lo)
        tol = max(abs_tol, rel_tol * abs(whole)) * width
        if est <= tol or panels > _MAX_PANELS or (h - l) < 1e-15 * (hi - lo):
            total += left + right
            err += est
        else:
            stack.append((m, h, right))
            stack.append((l, m, left))
    return float(total), float(err)


def shoot_profile(c_half, h, tau2):
    """RK4 for g'' = (tau2 - c(y)) g, g(0) = 0, g'(0) = 1.

    ``c_half`` samples the coefficient at y = j*h/2, j = 0..2N. Returns
    ``(g, gp, log_scale)`` at the N+1 full-step nodes; the true solution is
    ``exp(log_scale) * (g, gp)`` (the arrays are renormalised against
    overflow).
    """
    c_half = np.asarray(c_half, dtype=float)
    n = (c_half.size - 1) // 2
    g = np.empty(n + 1)
    gp = np.empty(n + 1)
    y0, y1 = 0.0, 1.0
    g[0], gp[0] = y0, y1
    log_scale = 0.0
    for k in range(n):
        ca, cm, cb = c_half[2 * k], c_half[2 * k + 1], c_half[2 * k + 2]
        k1a = y1
        k1b = (tau2 - ca) * y0
        k2a = y1 + 0.5 * h * k1b
        k2b = (tau2 - cm) * (y0 + 0.5 * h * k1a)
        k3a = y1 + 0.5 * h * k2b
        k3b = (tau2 - cm) * (y0 + 0.5 * h * k2a)
        k4a = y1 + h * k3b
        k4b = (tau2 - cb) * (y0 + h * k3a)
        y0 = y0 + h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        y1 = y1 + h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        if abs(y0) > _RESCALE or abs(y1) > _RESCALE:
            y0 /= _RESCALE
            y1 /= _RESCALE
            g[: k + 1] /= _RESCALE
            gp[: k + 1] /= _RESCALE
            log_scale += np.log(_RESCALE)
        g[k + 1] = y0
        gp[k + 1] = y1
    return g, gp, log_scale


def shoot_end(c_half, h, tau2):
    """Vectorised RK4 over an array of ``tau2``; end values only.

    Returns ``(g_end, gp_end, log_scale)`` arrays with the same convention as
    :func:`shoot_profile`.
    """
    c_half = np.asarray(c_half, dtype=float)
    t2 = np.atleast_1d(np.asarray(tau2, dtype=float))
    n = (c_half.size - 1) // 2
    y0 = np.zeros_like(t2)
    y1 = np.ones_like(t2)
    log_scale = np.zeros_like(t2)
    half = 0.5 * h
    for k in range(n):
        ca, cm, cb = c_half[2 * k], c_half[2 * k + 1], c_half[2 * k + 2]
        k1a = y1
        k1b = (t2 - ca) * y0
        k2a = y1 + half * k1b
        k2b = (t2 - cm) * (y0 + half * k1a)
        k3a = y1 + half * k2b
        k3b = (t2 - cm) * (y0 + half * k2a)
        k4a = y1 + h * k3b
        k4b = (t2 - cb) * (y0 + h * k3a)
        y0 = y0 + h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        y1 = y1 + h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        big = (np.abs(y0) > _RESCALE) | (np.abs(y1) > _RESCALE)
        if big.any():
            y0[big] /= _RESCALE
            y1[big] /= _RESCALE
            log_scale[big] += np.log(_RESCALE)
    return y0, y1, log_scale


def sturm_count(diag, off, x):
    """Number of eigenvalues of the symmetric tridiagonal matrix below ``x``."""
    diag = np.asarray(diag, dtype=float)
    off2 = np.asarray(off, dtype=float) ** 2
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    count = np.zeros(xs.shape, dtype=np.int64)
    q = diag[0] - xs
    count += q < 0
    tiny = 1e-300
    for i in range(1, diag.size):
        q = np.where(q == 0.0, tiny, q)
        q = diag[i] - xs - off2[i - 1] / q
        count += q < 0
    return count if np.ndim(x) else int(count[0])


def tridiag_lowest(diag, off, k, tol):
    """Lowest ``k`` eigenvalues of a symmetric tridiagonal matrix by bisection.

    ``tol`` is an absolute tolerance on each eigenvalue.
    """
    diag = np.asarray(diag, dtype=float)
    off = np.asarray(off, dtype=float)
    a = np.abs(off)
    radius = np.zeros_like(diag)
    radius[:-1] += a
    radius[1:] += a
    lo0 = float(np.min(diag - radius))
    hi0 = float(np.max(diag + radius))
    lo = np.full(k, lo0)
    hi = np.full(k, hi0)
    idx = np.arange(k)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        cnt = sturm_count(diag, off, mid)
        below = cnt > idx
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
        if np.all(hi - lo <= tol + 4e-16 * np.abs(mid)):
            break
    return 0.5 * (lo + hi)
