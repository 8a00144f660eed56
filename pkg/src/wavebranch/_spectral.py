"""Chebyshev and even-cosine collocation helpers shared by the 2D modules."""
import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.fft import dct


def cheb(n):
    """Chebyshev-Lobatto nodes x_i = cos(i pi/n) and the differentiation matrix."""
    if n == 0:
        return np.array([1.0]), np.zeros((1, 1))
    x = np.cos(np.pi * np.arange(n + 1) / n)
    c = np.ones(n + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(n + 1)
    X = np.tile(x, (n + 1, 1)).T
    dX = X - X.T
    D = np.outer(c, 1.0 / c) / (dX + np.eye(n + 1))
    D -= np.diag(D.sum(axis=1))
    return x, D


def unit_cheb(n):
    """Nodes p = (1 - cos(i pi/n))/2 on [0, 1] (ascending) and d/dp."""
    x, D = cheb(n)
    return 0.5 * (1.0 - x), -2.0 * D


def cheb_coeffs(vals, axis=0):
    """Chebyshev coefficients from values at the unit_cheb nodes (along ``axis``)."""
    n = vals.shape[axis] - 1
    c = dct(vals, type=1, axis=axis) / n
    c = np.moveaxis(c, axis, 0)
    c[0] *= 0.5
    c[-1] *= 0.5
    return np.moveaxis(c, 0, axis)


def cheb_eval(coefs, p, deriv=0):
    """Evaluate series (coefficients along axis 0) at p in [0, 1], broadcasting over columns."""
    c = coefs
    for _ in range(deriv):
        c = C.chebder(c, axis=0) * -2.0
    return C.chebval(1.0 - 2.0 * np.asarray(p), c, tensor=False)


def cheb_weights(n):
    """Clenshaw-Curtis weights for the unit_cheb nodes on [0, 1]."""
    k = np.arange(n + 1)
    mom = np.where(k % 2 == 0, 2.0 / (1.0 - k.astype(float) ** 2 + (k == 1)), 0.0)
    # weights w with sum w f = sum_k c_k mom_k / 2
    eye = np.eye(n + 1)
    return 0.5 * mom @ cheb_coeffs(eye, axis=0)


def periodic_diff(N):
    """Spectral first-derivative matrix on theta_l = 2 pi l / N (N even)."""
    l = np.arange(N)
    diff = l[:, None] - l[None, :]
    with np.errstate(divide="ignore"):
        D = 0.5 * (-1.0) ** diff / np.tan(np.pi * diff / N)
    D[diff == 0] = 0.0
    return D


def cosine_diff(M):
    """d/dtheta on theta_j = j pi / M, j = 0..M, folded for even and odd data.

    ``De`` maps values of an even 2 pi-periodic function to its (odd)
    derivative; ``Do`` maps odd values (zero at both ends) to the even
    derivative.
    """
    N = 2 * M
    D = periodic_diff(N)
    De = np.zeros((M + 1, M + 1))
    Do = np.zeros((M + 1, M + 1))
    De[:, 0] = D[: M + 1, 0]
    De[:, M] = D[: M + 1, M]
    for m in range(1, M):
        De[:, m] = D[: M + 1, m] + D[: M + 1, N - m]
        Do[:, m] = D[: M + 1, m] - D[: M + 1, N - m]
    return De, Do


def cosine_coeffs(vals, axis=-1):
    """a_k with f(theta) = sum a_k cos(k theta) from samples at theta_j = j pi / M."""
    M = vals.shape[axis] - 1
    a = dct(vals, type=1, axis=axis) / M
    a = np.moveaxis(a, axis, 0)
    a[0] *= 0.5
    a[-1] *= 0.5
    return np.moveaxis(a, 0, axis)


def cosine_eval(a, theta, deriv=0):
    """Evaluate sum a_k cos(k theta) (coefficients along the last axis)."""
    theta = np.asarray(theta, dtype=float)
    k = np.arange(a.shape[-1])
    arg = np.multiply.outer(theta, k)
    if deriv == 0:
        basis = np.cos(arg)
    elif deriv == 1:
        basis = -k * np.sin(arg)
    elif deriv == 2:
        basis = -(k**2) * np.cos(arg)
    else:
        raise ValueError("deriv must be 0, 1 or 2")
    return basis @ a.T if a.ndim > 1 else basis @ a
