# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the hot loops in ``_pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow, sqrt, log

cnp.import_array()

cdef double[15] _X
cdef double[15] _W
_nodes, _weights = np.polynomial.legendre.leggauss(15)
for _i in range(15):
    _X[_i] = _nodes[_i]
    _W[_i] = _weights[_i]

cdef double _RESCALE = 1e100
cdef int _MAX_PANELS = 20000


cdef inline double _horner(const double[:] c, double x) noexcept nogil:
    cdef Py_ssize_t k
    cdef double r = 0.0
    for k in range(c.shape[0] - 1, -1, -1):
        r = r * x + c[k]
    return r


def horner(coefs, double x):
    """Evaluate ``sum coefs[k] x**k`` (increasing order)."""
    cdef double[:] c = np.ascontiguousarray(coefs, dtype=np.float64)
    return _horner(c, x)


cdef double _panel(const double[:] om, double s2, double expo, int mode,
                   double a, double b, double lo, double hi) noexcept nogil:
    cdef double half = 0.5 * (hi - lo)
    cdef double acc = 0.0
    cdef double u, t, f, jac
    cdef int i
    for i in range(15):
        u = lo + half * (_X[i] + 1.0)
        jac = 1.0
        if mode == 0:
            t = u
        elif mode == 1:
            t = a + u * u
            jac = 2.0 * u
        else:
            t = b - u * u
            jac = 2.0 * u
        f = pow(s2 - 2.0 * _horner(om, t), expo)
        acc += _W[i] * f * jac
    return half * acc


def quad_power(omega_int, double s2, double expo, double a, double b, int mode,
               double abs_tol, double rel_tol):
    """Adaptive Gauss-Legendre integral of ``(s2 - 2*Omega(t))**expo`` on [a, b]."""
    cdef double[:] om = np.ascontiguousarray(omega_int, dtype=np.float64)
    if b <= a:
        return 0.0, 0.0
    cdef double lo, hi
    if mode == 0:
        lo, hi = a, b
    else:
        lo, hi = 0.0, sqrt(b - a)
    cdef double whole = _panel(om, s2, expo, mode, a, b, lo, hi)
    # explicit stack of (l, h, value)
    cdef Py_ssize_t cap = 256
    cdef double[:, :] stack = np.empty((cap, 3))
    cdef Py_ssize_t top = 0
    stack[0, 0] = lo
    stack[0, 1] = hi
    stack[0, 2] = whole
    top = 1
    cdef double total = 0.0, err = 0.0
    cdef double l, h, val, m, left, right, est, tol, width
    cdef int panels = 0
    cdef double base = abs_tol
    if rel_tol * fabs(whole) > base:
        base = rel_tol * fabs(whole)
    while top > 0:
        top -= 1
        l = stack[top, 0]
        h = stack[top, 1]
        val = stack[top, 2]
        m = 0.5 * (l + h)
        left = _panel(om, s2, expo, mode, a, b, l, m)
        right = _panel(om, s2, expo, mode, a, b, m, h)
        est = fabs(left + right - val)
        panels += 1
        width = (h - l) / (hi - lo)
        tol = base * width
        if est <= tol or panels > _MAX_PANELS or (h - l) < 1e-15 * (hi - lo):
            total += left + right
            err += est
        else:
            if top + 2 > cap:
                new = np.empty((2 * cap, 3))
                new[:cap] = stack
                stack = new
                cap *= 2
            stack[top, 0] = m
            stack[top, 1] = h
            stack[top, 2] = right
            stack[top + 1, 0] = l
            stack[top + 1, 1] = m
            stack[top + 1, 2] = left
            top += 2
    return total, err


def shoot_profile(c_half, double h, double tau2):
    """RK4 for g'' = (tau2 - c(y)) g, g(0) = 0, g'(0) = 1 (full profile)."""
    cdef double[:] c = np.ascontiguousarray(c_half, dtype=np.float64)
    cdef Py_ssize_t n = (c.shape[0] - 1) // 2
    g_arr = np.empty(n + 1)
    gp_arr = np.empty(n + 1)
    cdef double[:] g = g_arr
    cdef double[:] gp = gp_arr
    cdef double y0 = 0.0, y1 = 1.0, log_scale = 0.0
    cdef double ca, cm, cb, k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b
    cdef double hh = 0.5 * h
    cdef Py_ssize_t k, j
    g[0] = y0
    gp[0] = y1
    with nogil:
        for k in range(n):
            ca = c[2 * k]
            cm = c[2 * k + 1]
            cb = c[2 * k + 2]
            k1a = y1
            k1b = (tau2 - ca) * y0
            k2a = y1 + hh * k1b
            k2b = (tau2 - cm) * (y0 + hh * k1a)
            k3a = y1 + hh * k2b
            k3b = (tau2 - cm) * (y0 + hh * k2a)
            k4a = y1 + h * k3b
            k4b = (tau2 - cb) * (y0 + h * k3a)
            y0 = y0 + h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
            y1 = y1 + h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
            if fabs(y0) > _RESCALE or fabs(y1) > _RESCALE:
                y0 = y0 / _RESCALE
                y1 = y1 / _RESCALE
                for j in range(k + 1):
                    g[j] = g[j] / _RESCALE
                    gp[j] = gp[j] / _RESCALE
                log_scale += log(_RESCALE)
            g[k + 1] = y0
            gp[k + 1] = y1
    return g_arr, gp_arr, log_scale


def shoot_end(c_half, double h, tau2):
    """RK4 end values for each entry of ``tau2``."""
    cdef double[:] c = np.ascontiguousarray(c_half, dtype=np.float64)
    cdef double[:] t2 = np.ascontiguousarray(np.atleast_1d(tau2), dtype=np.float64)
    cdef Py_ssize_t m = t2.shape[0]
    cdef Py_ssize_t n = (c.shape[0] - 1) // 2
    ge_arr = np.empty(m)
    gpe_arr = np.empty(m)
    ls_arr = np.zeros(m)
    cdef double[:] ge = ge_arr
    cdef double[:] gpe = gpe_arr
    cdef double[:] ls = ls_arr
    cdef double y0, y1, tt, ca, cm, cb, k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b
    cdef double hh = 0.5 * h
    cdef double lr = log(_RESCALE)
    cdef Py_ssize_t i, k
    with nogil:
        for i in range(m):
            y0 = 0.0
            y1 = 1.0
            tt = t2[i]
            for k in range(n):
                ca = c[2 * k]
                cm = c[2 * k + 1]
                cb = c[2 * k + 2]
                k1a = y1
                k1b = (tt - ca) * y0
                k2a = y1 + hh * k1b
                k2b = (tt - cm) * (y0 + hh * k1a)
                k3a = y1 + hh * k2b
                k3b = (tt - cm) * (y0 + hh * k2a)
                k4a = y1 + h * k3b
                k4b = (tt - cb) * (y0 + h * k3a)
                y0 = y0 + h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
                y1 = y1 + h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
                if fabs(y0) > _RESCALE or fabs(y1) > _RESCALE:
                    y0 = y0 / _RESCALE
                    y1 = y1 / _RESCALE
                    ls[i] += lr
            ge[i] = y0
            gpe[i] = y1
    return ge_arr, gpe_arr, ls_arr


cdef long _sturm(const double[:] d, const double[:] off2, double x) noexcept nogil:
    cdef long count = 0
    cdef double q = d[0] - x
    cdef Py_ssize_t i
    if q < 0:
        count += 1
    for i in range(1, d.shape[0]):
        if q == 0.0:
            q = 1e-300
        q = d[i] - x - off2[i - 1] / q
        if q < 0:
            count += 1
    return count


def sturm_count(diag, off, x):
    """Number of eigenvalues of the symmetric tridiagonal matrix below ``x``."""
    cdef double[:] d = np.ascontiguousarray(diag, dtype=np.float64)
    cdef double[:] o2 = np.ascontiguousarray(np.asarray(off, dtype=np.float64) ** 2)
    if np.ndim(x):
        xs = np.asarray(x, dtype=np.float64)
        out = np.empty(xs.shape, dtype=np.int64)
        flat = xs.ravel()
        res = out.ravel()
        for i in range(flat.shape[0]):
            res[i] = _sturm(d, o2, flat[i])
        return out
    return int(_sturm(d, o2, float(x)))


def tridiag_lowest(diag, off, int k, double tol):
    """Lowest ``k`` eigenvalues of a symmetric tridiagonal matrix by bisection."""
    cdef double[:] d = np.ascontiguousarray(diag, dtype=np.float64)
    offa = np.asarray(off, dtype=np.float64)
    cdef double[:] o2 = np.ascontiguousarray(offa ** 2)
    a = np.abs(offa)
    radius = np.zeros(d.shape[0])
    radius[:-1] += a
    radius[1:] += a
    dn = np.asarray(d)
    cdef double lo0 = float(np.min(dn - radius))
    cdef double hi0 = float(np.max(dn + radius))
    out_arr = np.empty(k)
    cdef double[:] out = out_arr
    cdef double lo, hi, mid
    cdef int j, it
    with nogil:
        for j in range(k):
            lo = lo0
            hi = hi0
            for it in range(200):
                mid = 0.5 * (lo + hi)
                if _sturm(d, o2, mid) > j:
                    hi = mid
                else:
                    lo = mid
                if hi - lo <= tol + 4e-16 * fabs(mid):
                    break
            out[j] = 0.5 * (lo + hi)
    return out_arr
