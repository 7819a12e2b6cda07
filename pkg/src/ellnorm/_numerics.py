"""Small numerical kernels: log-gamma ratios, bisection and adaptive quadrature."""

from __future__ import annotations

import math
import warnings
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import gammaln

GL_NODES = 200
MAX_PANELS = 30


def log_gamma(x: float) -> float:
    return float(gammaln(x))


def gamma_ratio(num: tuple[float, ...], den: tuple[float, ...]) -> float:
    """``prod Gamma(num) / prod Gamma(den)`` evaluated in log space."""
    return math.exp(sum(log_gamma(a) for a in num) - sum(log_gamma(b) for b in den))


def bisect(f: Callable[[float], float], lo: float, hi: float, max_iter: int = 400) -> float:
    """Root of ``f`` on ``[lo, hi]`` assuming a sign change; runs until the bracket stops shrinking."""
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError("bisect: no sign change on the bracket")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@lru_cache(maxsize=8)
def _legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _panel(f, a: float, b: float, n: int) -> float:
    x, w = _legendre(n)
    half = 0.5 * (b - a)
    return half * float(np.dot(w, f(half * x + 0.5 * (a + b))))


def gauss_legendre(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rtol: float = 1e-3,
    atol: float = 0.0,
    n: int = GL_NODES,
    max_panels: int = MAX_PANELS,
) -> float:
    """Adaptive composite Gauss-Legendre integral of a vectorised ``f`` over ``[a, b]``.

    Each panel is integrated with ``n`` nodes and compared against the sum over
    its two halves; the panel with the largest discrepancy is bisected until the
    summed discrepancy is below ``max(atol, rtol * |integral|)`` or ``max_panels``
    panels exist.
    """
    if b <= a:
        return 0.0
    panels = [(a, b, _panel(f, a, b, n))]

    def refine(p):
        lo, hi, whole = p
        mid = 0.5 * (lo + hi)
        left, right = _panel(f, lo, mid, n), _panel(f, mid, hi, n)
        return (lo, hi, whole, left, right, abs(whole - left - right))

    work = [refine(p) for p in panels]
    while True:
        total = sum(p[3] + p[4] for p in work)
        err = sum(p[5] for p in work)
        if err <= max(atol, rtol * abs(total)):
            return total
        if len(work) >= max_panels:
            warnings.warn(
                f"gauss_legendre: panel limit {max_panels} reached, error estimate {err:.3g}",
                RuntimeWarning,
                stacklevel=2,
            )
            return total
        k = max(range(len(work)), key=lambda i: work[i][5])
        lo, hi, _, left, right, _ = work.pop(k)
        mid = 0.5 * (lo + hi)
        work.append(refine((lo, mid, left)))
        work.append(refine((mid, hi, right)))


def beta_expectation(
    g: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    w_lo: float = 0.0,
    rtol: float = 1e-3,
    atol: float = 0.0,
) -> float:
    """``E[g(W) 1{W > w_lo}]`` for ``W ~ Beta(a, b)``.

    Substituting ``w = sin^2(theta)`` turns the Beta weight into
    ``2 sin^(2a-1) cos^(2b-1) / B(a, b)``, which is bounded for ``a, b >= 1/2``
    and removes the endpoint singularities of half-integer shapes.
    """
    log_norm = log_gamma(a + b) - log_gamma(a) - log_gamma(b)
    theta_lo = math.asin(math.sqrt(min(max(w_lo, 0.0), 1.0)))

    def integrand(theta):
        s = np.sin(theta)
        c = np.cos(theta)
        with np.errstate(divide="ignore", invalid="ignore"):
            weight = 2.0 * np.exp(log_norm) * s ** (2 * a - 1) * c ** (2 * b - 1)
            vals = weight * g(s * s)
        return np.where(np.isfinite(vals), vals, 0.0)

    return gauss_legendre(integrand, theta_lo, 0.5 * math.pi, rtol=rtol, atol=atol)
