"""Sample maxima of ``||X||``: norming constants, limit laws and the a.s. boundary.

Gumbel radius, ``lambda_top = 1``::

    (max_j ||X_j|| - b_n) * w(b_n)  ->  Lambda,      b_n = H^{-1}(1 - 1/n)

Weibull radius with endpoint 1 and ``lambda_top = 1``::

    (max_j ||X_j|| - 1) / (1 - H^{-1}(1 - 1/n))  ->  Psi_{gamma + (d-m)/2}

``H`` is the law of ``||X||``; its quantile is obtained by inverting the
first-order tail expansion. For Kotz III radii with ``delta * tau = 1`` the
boundary ``b*_n = [tau (ln n + s ln ln n)]^(1/tau)`` is crossed infinitely
often iff ``s <= (m - d)/2 + N/tau + 1``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _rng
from ._numerics import bisect
from .asymptotics import (
    EllipticalModel,
    _require_unit_top,
    gumbel_norm_tail,
    kotz_tail_constants,
    weibull_norm_tail,
)
from .errors import AsymptoticWarning, MDAMismatchError, PreconditionError
from .oracle import sample_norm
from .radial import Kotz3

DELTA_TAU_TOL = 1e-12
MAX_GROUP_DRAWS = 1 << 21
BC_CHUNK = 1 << 20


@dataclass(frozen=True)
class NormingConstants:
    """``(max - location) / scale`` converges to ``limit``.

    ``limit`` is ``"gumbel"`` or ``"weibull"``; ``index`` is the Weibull index.
    """

    location: float
    scale: float
    limit: str
    index: float | None = None

    def normalize(self, maxima):
        return (np.asarray(maxima, dtype=float) - self.location) / self.scale

    def to_dict(self) -> dict:
        return {"location": self.location, "scale": self.scale, "limit": self.limit, "index": self.index}


def _solve_log(f, target: float, lo: float, hi: float) -> float:
    """Root of ``log f(x) = log target`` for ``f`` decreasing on ``[lo, hi]``."""
    log_t = math.log(target)

    def g(x):
        v = f(x)
        return (math.log(v) if v > 0 else -math.inf) - log_t

    return bisect(g, lo, hi)


def norming_gumbel(model: EllipticalModel, n: int) -> NormingConstants:
    """Location ``H^{-1}(1 - 1/n)`` from the tail expansion, scale ``1/w(location)``."""
    _require_unit_top(model)
    law = model.radial
    if law.mda().tag != "gumbel":
        raise MDAMismatchError(f"{law.family} is not in the Gumbel domain")
    if n < 2:
        raise ValueError("block size n must be >= 2")
    target = 1.0 / n
    xf = law.upper_endpoint

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AsymptoticWarning)

        def tail(u):
            return gumbel_norm_tail(model, u).value

        lo = min(1.0, 0.5 * xf)
        while tail(lo) < target:
            lo *= 0.5
            if lo < 1e-300:
                raise ValueError(f"tail expansion never reaches 1/n = {target:g}")
        if math.isfinite(xf):
            hi = lo
            while tail(hi) > target:
                hi = 0.5 * (hi + xf)
                if hi >= xf:
                    raise ValueError("could not bracket the quantile below the endpoint")
        else:
            hi = max(2.0 * lo, 1.0)
            while tail(hi) > target:
                hi *= 2.0
        loc = _solve_log(tail, target, lo, hi)
    approx = gumbel_norm_tail(model, loc)
    if model.m < model.d and approx.power_part >= 1.0:
        raise ValueError(
            f"1/n = {target:g} is outside the validity region (power term {approx.power_part:.3g} >= 1)"
        )
    return NormingConstants(loc, 1.0 / float(law.scaling(loc)), "gumbel")


def norming_kotz(model: EllipticalModel, n: int) -> NormingConstants:
    """Closed-form Kotz III constants, ``scale = a_n`` and ``location = b_n``::

        a_n = (ln n / delta)^(1/tau - 1) / (delta tau)
        b_n = (ln n / delta)^(1/tau) + a_n (alpha ln(ln n / delta) / tau + ln K)
    """
    _require_unit_top(model)
    law = model.radial
    if not isinstance(law, Kotz3):
        raise MDAMismatchError(f"Kotz norming needs a kotz3 radius, got {law.family}")
    if n < 3:
        raise ValueError("block size n must be >= 3")
    K, alpha = kotz_tail_constants(model)
    L = math.log(n) / law.delta
    a_n = L ** (1.0 / law.tau - 1.0) / (law.delta * law.tau)
    b_n = L ** (1.0 / law.tau) + a_n * (alpha * math.log(L) / law.tau + math.log(K))
    return NormingConstants(b_n, a_n, "gumbel")


def norming_weibull(model: EllipticalModel, n: int) -> NormingConstants:
    """Location 1, scale ``1 - H^{-1}(1 - 1/n)`` from the tail expansion."""
    _require_unit_top(model)
    law = model.radial
    cls = law.mda()
    if cls.tag != "weibull" or law.upper_endpoint != 1.0:
        raise MDAMismatchError(f"{law.family} is not a Weibull-domain law with endpoint 1")
    if n < 2:
        raise ValueError("block size n must be >= 2")
    target = 1.0 / n
    index = cls.gamma + 0.5 * (model.d - model.m)

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", AsymptoticWarning)

        def tail(gap):
            return weibull_norm_tail(model, gap).value

        hi = 0.5
        while tail(hi) < target:
            hi = 0.5 * (1.0 + hi)
            if hi >= 1.0 - 1e-15:
                raise ValueError(f"tail expansion never reaches 1/n = {target:g}")
        lo = hi
        while tail(lo) > target:
            lo *= 0.5
        # tail is increasing in the gap; negate the orientation for _solve_log
        gap = _solve_log(lambda g: 1.0 / tail(g), 1.0 / target, lo, hi)
    approx = weibull_norm_tail(model, gap)
    if model.m < model.d and approx.power_part >= 1.0:
        raise ValueError(
            f"1/n = {target:g} is outside the validity region (power term {approx.power_part:.3g} >= 1)"
        )
    return NormingConstants(1.0, gap, "weibull", index)


def norming_for(model: EllipticalModel, n: int) -> NormingConstants:
    """Norming constants matching the radius' domain of attraction."""
    tag = model.radial.mda().tag
    if tag == "gumbel":
        return norming_gumbel(model, n)
    if tag == "weibull":
        return norming_weibull(model, n)
    raise MDAMismatchError(f"no norming constants for the {tag} domain")


def norming_empirical(model: EllipticalModel, n: int, samples: int, seed: int) -> NormingConstants:
    """Same normalisation as :func:`norming_for`, with the quantile taken from simulated norms."""
    _require_unit_top(model)
    draws = sample_norm(model, samples, seed)
    q = float(np.quantile(draws, 1.0 - 1.0 / n))
    reference = norming_for(model, n)
    if reference.limit == "gumbel":
        return NormingConstants(q, 1.0 / float(model.radial.scaling(q)), "gumbel")
    return NormingConstants(1.0, 1.0 - q, "weibull", reference.index)


def maxima_simulate(
    model: EllipticalModel,
    block: int,
    reps: int,
    seed: int,
    norming: NormingConstants | None = None,
) -> np.ndarray:
    """``reps`` normalised maxima of ``block`` i.i.d. norms each."""
    if reps <= 0:
        return np.empty(0)
    if norming is None:
        norming = norming_for(model, block)
    per_group = max(1, MAX_GROUP_DRAWS // block)
    maxima = []
    for j, start in enumerate(range(0, reps, per_group)):
        k = min(per_group, reps - start)
        draws = sample_norm(model, k * block, _rng.derive_seed(seed, 4, j))
        maxima.append(draws.reshape(k, block).max(axis=1))
    return norming.normalize(np.concatenate(maxima))


def limit_cdf(x, limit: str, index: float | None = None):
    """``Lambda(x) = exp(-exp(-x))`` or ``Psi_index(x) = exp(-|x|^index)`` for ``x < 0``."""
    x = np.asarray(x, dtype=float)
    if limit == "gumbel":
        return np.exp(-np.exp(-x))
    if limit == "weibull":
        if index is None or index <= 0:
            raise ValueError("Weibull limit needs a positive index")
        return np.where(x < 0, np.exp(-np.abs(np.minimum(x, 0.0)) ** index), 1.0)
    raise ValueError(f"unknown limit {limit!r}")


def ks_distance(sample, limit: str, index: float | None = None) -> float:
    """Kolmogorov-Smirnov distance between the empirical law of ``sample`` and the limit."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("ks_distance needs a nonempty sample")
    cdf = limit_cdf(x, limit, index)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - cdf), np.max(cdf - (i - 1) / n)))


@dataclass(frozen=True)
class BCBoundary:
    """Almost-sure boundary ``b*_n = [tau (ln n + s ln ln n)]^(1/tau)``."""

    s: float
    s_critical: float
    tau: float

    @property
    def verdict(self) -> str:
        """``"io_one"`` if the boundary is crossed infinitely often a.s., else ``"io_zero"``."""
        return "io_one" if self.s <= self.s_critical else "io_zero"

    def b_star(self, n):
        n = np.asarray(n, dtype=float)
        ln = np.log(n)
        return (self.tau * (ln + self.s * np.log(ln))) ** (1.0 / self.tau)

    def to_dict(self) -> dict:
        return {"s": self.s, "s_critical": self.s_critical, "tau": self.tau, "verdict": self.verdict}


def bc_boundary(model: EllipticalModel, s: float) -> BCBoundary:
    """Boundary for a Kotz III model with ``delta * tau = 1``.

    The critical coefficient is ``alpha/tau + 1 = (m - d)/2 + N/tau + 1``,
    where the series ``sum_n P(||X|| > b*_n)`` switches from divergent to
    convergent; ``s`` equal to it counts as divergent.
    """
    law = model.radial
    if not isinstance(law, Kotz3):
        raise PreconditionError(f"boundary test needs a kotz3 radius, got {law.family}")
    if abs(law.delta * law.tau - 1.0) > DELTA_TAU_TOL:
        raise PreconditionError(f"boundary test needs delta * tau = 1, got {law.delta * law.tau:g}")
    _require_unit_top(model)
    _, alpha = kotz_tail_constants(model)
    return BCBoundary(float(s), alpha / law.tau + 1.0, law.tau)


@dataclass(frozen=True)
class BCRun:
    """Crossings ``||X_n|| > b*_n`` of one simulated sequence (n >= ``n_start``)."""

    boundary: BCBoundary
    n_max: int
    seed: int
    n: np.ndarray = field(repr=False)
    value: np.ndarray = field(repr=False)
    bound: np.ndarray = field(repr=False)
    running_max: float = math.nan

    @property
    def count(self) -> int:
        return int(self.n.size)

    def count_beyond(self, n0: int) -> int:
        return int(np.count_nonzero(self.n > n0))

    def to_csv(self) -> str:
        lines = ["n,value,boundary"]
        lines += [f"{int(k)},{v:.17g},{b:.17g}" for k, v, b in zip(self.n, self.value, self.bound)]
        return "\n".join(lines) + "\n"


def bc_simulate(model: EllipticalModel, s: float, n_max: int, seed: int, n_start: int = 3) -> BCRun:
    """Stream ``n_max`` norms and record each index where the new draw exceeds ``b*_n``."""
    boundary = bc_boundary(model, s)
    hits_n, hits_v, hits_b = [], [], []
    running = -math.inf
    for j, start in enumerate(range(0, max(n_max, 0), BC_CHUNK)):
        k = min(BC_CHUNK, n_max - start)
        draws = sample_norm(model, k, _rng.derive_seed(seed, 5, j))
        running = max(running, float(draws.max()))
        idx = np.arange(start + 1, start + k + 1)
        keep = idx >= n_start
        idx, draws = idx[keep], draws[keep]
        if idx.size == 0:
            continue
        b = boundary.b_star(idx)
        hit = draws > b
        hits_n.append(idx[hit])
        hits_v.append(draws[hit])
        hits_b.append(b[hit])
    cat = lambda parts, dt: np.concatenate(parts) if parts else np.empty(0, dtype=dt)
    return BCRun(
        boundary,
        n_max,
        seed,
        cat(hits_n, np.int64),
        cat(hits_v, float),
        cat(hits_b, float),
        running,
    )
