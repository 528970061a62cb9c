"""Independent numerical oracles used only by the tests.

These deliberately avoid the code paths they check: the normal CDF
oracle is a Taylor series in 60-digit arithmetic rather than erfc, and
the distance oracle is a brute scan rather than the closed form.
"""

import mpmath as mp
import numpy as np

from steinperm.analysis import normal_cdf


def phi_taylor(x: float) -> float:
    """Standard normal CDF by the odd-double-factorial Taylor series.

    Phi(x) = 1/2 + exp(-x^2/2)/sqrt(2 pi) * sum_k x^(2k+1) / (2k+1)!!,
    summed in 60-digit precision until terms fall below 1e-50.
    """
    with mp.workdps(60):
        xm = mp.mpf(x)
        term = xm
        total = term
        k = 0
        while abs(term) > mp.mpf(10) ** -50 * (abs(total) + 1):
            k += 1
            term = term * xm * xm / (2 * k + 1)
            total += term
        val = mp.mpf(1) / 2 + mp.e ** (-xm * xm / 2) / mp.sqrt(2 * mp.pi) * total
        return float(val)


def kolmogorov_scan(atoms, probs) -> float:
    """Brute-force sup |F - Phi|: every atom, every left limit, and a
    10^4-point grid across and beyond the support."""
    atoms = np.asarray(atoms, dtype=float)
    cdf = np.cumsum(np.asarray(probs, dtype=float))
    best = 0.0
    prev = 0.0
    for w, f in zip(atoms, cdf):
        phi_w = normal_cdf(float(w))
        best = max(best, abs(f - phi_w), abs(phi_w - prev))
        prev = f
    grid = np.linspace(float(atoms[0]) - 1.0, float(atoms[-1]) + 1.0, 10_001)
    idx = np.searchsorted(atoms, grid, side="right")
    f_grid = np.concatenate([[0.0], cdf])[idx]
    for x, f in zip(grid, f_grid):
        best = max(best, abs(f - normal_cdf(float(x))))
    return best
