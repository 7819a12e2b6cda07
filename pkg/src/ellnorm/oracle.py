"""Ground truth for the expansions: simulation and deterministic quadrature.

Both routes rest on the decomposition

    ||X||^2 / lambda_top = R^2 (W + (1 - W) sum_i rho_i V_i^2),

with ``W ~ Beta(m/2, (d-m)/2)``, ``V`` uniform on the ``(d-m)``-sphere,
``rho_i = lambda_{m+i} / lambda_top`` and ``R, W, V`` independent. The full
``d``-vector sampler :func:`sample_elliptical` is kept as an independent
cross-check of that decomposition.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import _rng
from ._numerics import GL_NODES, _legendre, beta_expectation
from .asymptotics import EllipticalModel, gumbel_norm_tail, weibull_norm_tail
from .spectrum import symmetric_sqrt

STREAM_RADIAL, STREAM_W, STREAM_V, STREAM_U = 0, 1, 2, 3
RARE_EVENT = 1e-4


@dataclass(frozen=True)
class MCEstimate:
    p_hat: float
    std_err: float
    n: int
    seed: int | None = None


def _sphere_draw(k: int):
    def draw(rng: np.random.Generator, size: int) -> np.ndarray:
        z = rng.standard_normal((size, k))
        return z / np.linalg.norm(z, axis=1, keepdims=True)

    return draw


def sample_sphere(k: int, n: int, seed: int, stream: int = STREAM_U) -> np.ndarray:
    """``n`` points uniform on the unit sphere of ``R^k`` (rows)."""
    if k < 1:
        raise ValueError("sphere dimension must be >= 1")
    if n <= 0:
        return np.empty((0, k))
    return _rng.chunked(n, seed, stream, _sphere_draw(k))


def sample_bracket(model: EllipticalModel, n: int, seed: int) -> np.ndarray:
    """Draws of ``W + (1 - W) sum_i rho_i V_i^2``, which lies in ``(0, 1]``."""
    d, m = model.d, model.m
    if m == d:
        return np.ones(max(n, 0))
    rho = np.asarray(model.spectrum.ratios)
    w = _rng.chunked(n, seed, STREAM_W, lambda rng, k: rng.beta(0.5 * m, 0.5 * (d - m), k))
    if d - m == 1:
        mix = np.full(n, rho[0])
    else:
        v = sample_sphere(d - m, n, seed, stream=STREAM_V)
        mix = (v * v) @ rho
    return w + (1.0 - w) * mix


def sample_norm(model: EllipticalModel, n: int, seed: int) -> np.ndarray:
    """``n`` draws of ``||X|| / sqrt(lambda_top)`` without forming ``d``-vectors.

    For ``m = d`` these are exactly ``model.radial.sample(n, seed)``.
    """
    r = model.radial.sample(n, seed)
    if model.m == model.d:
        return r
    return r * np.sqrt(sample_bracket(model, n, seed))


def sample_elliptical(model: EllipticalModel, n: int, seed: int) -> np.ndarray:
    """``n`` draws of ``X = A R U`` (rows) with ``A`` the symmetric root of ``Sigma``."""
    d = model.d
    if n <= 0:
        return np.empty((0, d))
    A = symmetric_sqrt(model.sigma)
    r = model.radial.sample(n, seed)
    u = sample_sphere(d, n, seed, stream=STREAM_U)
    return r[:, None] * (u @ A.T)


def tail_estimate(draws, u: float, seed: int | None = None) -> MCEstimate:
    """Fraction of ``draws`` above ``u`` with its binomial standard error."""
    draws = np.asarray(draws, dtype=float)
    n = draws.size
    if n == 0:
        raise ValueError("tail_estimate needs at least one draw")
    p = float(np.count_nonzero(draws > u)) / n
    return MCEstimate(p, math.sqrt(p * (1.0 - p) / n), n, seed)


def quadrature_tail(model: EllipticalModel, u: float, rtol: float = 1e-3) -> float:
    """``P(||X|| > u sqrt(lambda_top))`` by deterministic quadrature (``d - m <= 2``).

    Outer integral over ``W`` (adaptive Gauss-Legendre after ``w = sin^2``);
    for ``d - m = 2`` an inner average over ``V_1^2 = cos^2(phi)``, ``phi``
    uniform on ``(0, pi/2)``.
    """
    law = model.radial
    d, m = model.d, model.m
    if m == d:
        return law.survival(u)
    k = d - m
    if k > 2:
        raise ValueError(f"quadrature oracle handles d - m <= 2, got {k}; use sample_norm")
    rho = model.spectrum.ratios
    xf = law.upper_endpoint
    finite = math.isfinite(xf)
    t2 = (u / xf) ** 2 if finite else 0.0
    if finite and t2 >= 1.0:
        return 0.0
    rho1 = max(rho)
    # outside this W-range the integrand vanishes (finite endpoint only)
    w_lo = max(0.0, 1.0 - (1.0 - t2) / (1.0 - rho1)) if finite else 0.0

    if k == 1:

        def g(w):
            return law.survival(u / np.sqrt(w + (1.0 - w) * rho[0]))

    else:
        r1, r2 = max(rho), min(rho)
        x, wts = _legendre(GL_NODES)

        def g(w):
            w = np.atleast_1d(w)
            phi_hi = np.full_like(w, 0.5 * math.pi)
            if finite and r1 > r2:
                t = (t2 - w) / np.maximum(1.0 - w, 1e-300)
                c0 = np.clip((t - r2) / (r1 - r2), 0.0, 1.0)
                phi_hi = np.arccos(np.sqrt(c0))
            half = 0.5 * phi_hi
            phi = half[:, None] * (x[None, :] + 1.0)
            mix = r2 + (r1 - r2) * np.cos(phi) ** 2
            bracket = w[:, None] + (1.0 - w[:, None]) * mix
            inner = law.survival(u / np.sqrt(bracket)) @ wts
            return inner * half / (0.5 * math.pi)

    return beta_expectation(g, 0.5 * m, 0.5 * k, w_lo=w_lo, rtol=rtol)


def quadrature_cdf(model: EllipticalModel, u: float, rtol: float = 1e-3) -> float:
    return 1.0 - quadrature_tail(model, u, rtol)


@dataclass(frozen=True)
class RatioRow:
    u: float
    approx: float
    oracle: float
    ratio: float
    method: str
    std_err: float = 0.0


def ratio_table(
    model: EllipticalModel, thresholds, samples: int = 0, seed: int = 0, rtol: float = 1e-3
) -> list[RatioRow]:
    """Oracle versus expansion at each threshold.

    Gumbel-domain radii take thresholds ``u``; Weibull-domain radii take gaps
    ``u_gap`` (the tail is then evaluated at ``1 - u_gap``). The oracle is
    :func:`quadrature_tail` when ``d - m <= 2`` and a Monte Carlo tail
    estimate from ``samples`` draws of :func:`sample_norm` otherwise.
    """
    thresholds = [float(t) for t in thresholds]
    if not thresholds:
        return []
    weibull = model.radial.mda().tag == "weibull"
    use_quad = model.d - model.m <= 2
    if not use_quad and samples <= 0:
        raise ValueError("d - m > 2 needs Monte Carlo samples (samples > 0)")
    draws = None if use_quad else sample_norm(model, samples, seed)
    rows = []
    for t in thresholds:
        if weibull:
            approx = weibull_norm_tail(model, t).value
            level = 1.0 - t
        else:
            approx = gumbel_norm_tail(model, t).value
            level = t
        if use_quad:
            oracle, se, method = quadrature_tail(model, level, rtol), 0.0, "quadrature"
        else:
            est = tail_estimate(draws, level, seed)
            oracle, se, method = est.p_hat, est.std_err, "mc"
        ratio = oracle / approx if approx > 0 else math.nan
        rows.append(RatioRow(t, approx, oracle, ratio, method, se))
    return rows


def ratio_table_csv(rows: list[RatioRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["u", "approx", "oracle", "ratio"])
    for r in rows:
        writer.writerow([f"{x:.17g}" for x in (r.u, r.approx, r.oracle, r.ratio)])
    return buf.getvalue()


def ratio_rows_json(rows: list[RatioRow]) -> list[dict]:
    return [asdict(r) for r in rows]
