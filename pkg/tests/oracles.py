"""Independent reference computations used by the tests.

None of these share code paths with the package implementations they check.
"""

import numpy as np
from scipy.integrate import quad
from scipy.special import ive


def marcum_q1_quadrature(a, b):
    """Q1(a, b) by adaptive quadrature of its defining integral.

    The integrand ``x exp(-(x^2+a^2)/2) I0(ax)`` is evaluated as
    ``x exp(-(x-a)^2/2) ive(0, ax)``; beyond ``max(a, b) + 40`` it is below 1e-300.
    """
    a, b = float(a), float(b)
    upper = max(a, b) + 40.0
    f = lambda x: x * np.exp(-0.5 * (x - a) ** 2) * ive(0, a * x)
    pts = [a] if b < a < upper else None
    val, _ = quad(f, b, upper, points=pts, limit=500, epsabs=1e-14, epsrel=1e-13)
    return val


def covariance_entry(i, j, p1, p2, rho, phi, coupling):
    """Entry (i, j) of the structured covariance, written out case by case."""
    c, s = np.cos(phi), np.sin(phi)
    k = rho * np.sqrt(p1 * p2)
    if coupling == "rotation":
        cross = {(0, 2): c, (0, 3): s, (1, 2): -s, (1, 3): c}
    else:
        cross = {(0, 2): c, (0, 3): s, (1, 2): s, (1, 3): -c}
    if i == j:
        return p1 if i < 2 else p2
    if (i, j) in cross:
        return k * cross[(i, j)]
    if (j, i) in cross:
        return k * cross[(j, i)]
    return 0.0


def covariance_by_entries(p1, p2, rho, phi, coupling):
    return np.array([
        [covariance_entry(i, j, p1, p2, rho, phi, coupling) for j in range(4)]
        for i in range(4)
    ])


def grid_search_fit(s_hat, coupling, p1, p2, step=1e-3, chunk=100):
    """Brute-force (rho, phi) grid search at fixed powers.

    Returns ``(best_residual, rho, phi)``. ``s_hat`` must be symmetric, so the
    lower-left block contributes the same as the upper-right one.
    """
    assert np.allclose(s_hat, s_hat.T, rtol=0, atol=1e-12)
    rho = np.arange(0.0, 1.0 + step / 2, step)
    phi = np.arange(0.0, 2 * np.pi, step)
    diag = s_hat.copy()
    diag[0:2, 2:4] = 0.0
    diag[2:4, 0:2] = 0.0
    diag[[0, 1], [0, 1]] -= p1
    diag[[2, 3], [2, 3]] -= p2
    d2 = np.sum(diag**2)
    M = s_hat[0:2, 2:4]
    c, s = np.cos(phi)[None, :], np.sin(phi)[None, :]
    best = (np.inf, None, None)
    for lo in range(0, rho.size, chunk):
        k = rho[lo:lo + chunk, None] * np.sqrt(p1 * p2)
        if coupling == "rotation":
            entries = (k * c, k * s, -k * s, k * c)
        else:
            entries = (k * c, k * s, k * s, -k * c)
        off = sum((e - m) ** 2 for e, m in zip(entries, M.ravel()))
        total = d2 + 2.0 * off
        idx = np.unravel_index(np.argmin(total), total.shape)
        if total[idx] < best[0]:
            best = (float(total[idx]), float(rho[lo + idx[0]]), float(phi[idx[1]]))
    return float(np.sqrt(best[0])), best[1], best[2]


def frobenius_residual(s_hat, p1, p2, rho, phi, coupling):
    return float(np.linalg.norm(covariance_by_entries(p1, p2, rho, phi, coupling) - s_hat))
