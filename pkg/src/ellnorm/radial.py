"""Radial laws ``F`` of the radius ``R`` and their max-domain of attraction.

Five families are supported:

``chi(df)``
    ``R^2`` chi-squared with ``df`` degrees of freedom; Gumbel, ``w(u) = u``.
``kotz3(c, N, delta, tau)``
    Tail ``c u^N exp(-delta u^tau)``; Gumbel, ``w(u) = delta tau u^(tau-1)``.
``exp_endpoint(c1, c2)``
    Endpoint 1, tail ``c1 exp(-c2/(1-u))``; Gumbel, ``w(u) = c2/(1-u)^2``.
``beta(a, b)``
    ``Beta(a, b)``; Weibull with index ``b``.
``uniform``
    Uniform on ``(0, 1)``; Weibull with index 1.

``kotz3`` and ``exp_endpoint`` only prescribe a tail. They are completed to a
proper law with ``F(0) = 0``: the survival function is 1 below the point
``u0`` where the tail formula reaches 1 on its decreasing branch. When the
tail formula stays below 1 there, a linear ramp from ``(0, 1)`` to the
junction ``(u_j, tail(u_j))`` fills the gap. Either way the tail is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, ClassVar

import numpy as np
from scipy.special import betainc, betaincinv, gammaincc, gammainccinv

from . import _rng
from ._numerics import bisect
from .errors import MDAMismatchError

MIN_EXCEEDANCES = 50
_TWO53 = float(2**53)


def _open_uniform(rng: np.random.Generator, n: int) -> np.ndarray:
    """Uniforms strictly inside ``(0, 1)``."""
    return (rng.integers(0, 2**53, size=n, dtype=np.int64) + 0.5) / _TWO53


def _as_output(values: np.ndarray, scalar: bool):
    return float(values) if scalar else values


@dataclass(frozen=True)
class MDAClass:
    """Max-domain of attraction of a radial law.

    ``tag`` is ``"gumbel"``, ``"weibull"`` or ``"frechet"``. Gumbel carries the
    scaling function ``w``; Weibull and Frechet carry the index ``gamma``.
    """

    tag: str
    gamma: float | None = None
    w: Callable[[float], float] | None = field(default=None, compare=False, repr=False)

    def __str__(self) -> str:
        if self.tag == "gumbel":
            return "Gumbel"
        return f"{self.tag.capitalize()}({self.gamma:g})"


class RadialLaw:
    """Common interface; see the concrete families below."""

    family: ClassVar[str]
    upper_endpoint: ClassVar[float]

    def survival(self, u):
        """``P(R > u)``; accepts scalars or arrays."""
        scalar = np.ndim(u) == 0
        u = np.asarray(u, dtype=float)
        out = np.where(u <= 0.0, 1.0, 0.0)
        inside = (u > 0.0) & (u < self.upper_endpoint)
        if np.any(inside):
            out = np.where(inside, self._survival(np.where(inside, u, 0.5)), out)
        return _as_output(out, scalar)

    def _survival(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _inverse_survival(self, p: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def mda(self) -> MDAClass:
        raise NotImplementedError

    def scaling(self, u):
        """Gumbel scaling function ``w(u)``."""
        raise MDAMismatchError(f"{self.family} is not in the Gumbel max-domain of attraction")

    @property
    def params(self) -> dict:
        raise NotImplementedError

    def sample(self, n: int, seed: int, workers: int = 1) -> np.ndarray:
        """``n`` i.i.d. draws by inversion of the survival function.

        Draws are generated in fixed chunks, each from its own substream of
        ``seed``, so the result is identical for any ``workers``.
        """
        return _rng.chunked(
            n, seed, 0, lambda rng, k: self._inverse_survival(_open_uniform(rng, k)), workers
        )

    def to_dict(self) -> dict:
        return {"family": self.family, "params": self.params}


@dataclass(frozen=True)
class Chi(RadialLaw):
    df: int

    family: ClassVar[str] = "chi"
    upper_endpoint: ClassVar[float] = math.inf

    def __post_init__(self):
        if int(self.df) != self.df or self.df < 1:
            raise ValueError(f"chi degrees of freedom must be a positive integer, got {self.df!r}")

    def _survival(self, u):
        return gammaincc(0.5 * self.df, 0.5 * u * u)

    def _inverse_survival(self, p):
        return np.sqrt(2.0 * gammainccinv(0.5 * self.df, p))

    def mda(self):
        return MDAClass("gumbel", w=self.scaling)

    def scaling(self, u):
        return u

    @property
    def params(self):
        return {"df": int(self.df)}


@dataclass(frozen=True)
class Kotz3(RadialLaw):
    """Kotz type III radius with survival ``c u^N exp(-delta u^tau)`` beyond ``u0``."""

    c: float
    N: float
    delta: float
    tau: float

    family: ClassVar[str] = "kotz3"
    upper_endpoint: ClassVar[float] = math.inf

    def __post_init__(self):
        if not (self.c > 0 and self.delta > 0 and self.tau > 0):
            raise ValueError("kotz3 requires c, delta, tau > 0")
        # the tail formula is strictly decreasing beyond u_mono
        u_mono = (max(self.N, 0.0) / (self.delta * self.tau)) ** (1.0 / self.tau)
        ramp = False
        if self.N == 0:
            if self.c >= 1.0:
                junction = (math.log(self.c) / self.delta) ** (1.0 / self.tau)
            else:
                junction, ramp = self.delta ** (-1.0 / self.tau), True
        elif self.N > 0 and self._log_peak() < 0.0:
            # any point past the mode works; delta^(-1/tau) keeps u_mono ~ 0 harmless
            junction, ramp = max(u_mono, self.delta ** (-1.0 / self.tau)), True
        else:
            lo = max(u_mono, 1e-300) if self.N > 0 else 1.0
            while self._log_tail(lo) <= 0.0:
                lo *= 0.5
            hi = max(lo, 1.0)
            while self._log_tail(hi) > 0.0:
                hi *= 2.0
            junction = bisect(self._log_tail, lo, hi)
        object.__setattr__(self, "u0", junction)
        object.__setattr__(self, "ramp", ramp)
        object.__setattr__(
            self, "_tail_at_junction", math.exp(self._log_tail(junction)) if ramp else 1.0
        )

    def _log_peak(self) -> float:
        """``log`` of the tail formula at its mode (``N > 0``), in closed form."""
        r = self.N / self.tau
        return math.log(self.c) + r * math.log(self.N / (self.delta * self.tau)) - r

    def _log_tail(self, u):
        u = np.asarray(u, dtype=float)
        out = math.log(self.c) - self.delta * u**self.tau
        if self.N != 0:
            with np.errstate(divide="ignore"):
                out = out + self.N * np.log(u)
        return out if out.ndim else float(out)

    def _survival(self, u):
        tail = np.exp(self._log_tail(np.maximum(u, self.u0)))
        if self.ramp:
            below = 1.0 - (1.0 - self._tail_at_junction) * u / self.u0
        else:
            below = np.ones_like(u)
        return np.where(u >= self.u0, tail, below)

    def _inverse_survival(self, p):
        out = np.empty_like(p)
        in_tail = p < self._tail_at_junction
        if self.ramp:
            q = p[~in_tail]
            out[~in_tail] = self.u0 * (1.0 - q) / (1.0 - self._tail_at_junction)
        else:
            out[~in_tail] = self.u0
        logp = np.log(p[in_tail])
        if self.N == 0:
            out[in_tail] = ((math.log(self.c) - logp) / self.delta) ** (1.0 / self.tau)
        else:
            out[in_tail] = self._solve_tail(logp)
        return out

    def _solve_tail(self, logp: np.ndarray) -> np.ndarray:
        lo = np.full_like(logp, self.u0)
        hi = np.full_like(logp, max(2.0 * self.u0, 1.0))
        while True:
            short = self._log_tail(hi) > logp
            if not np.any(short):
                break
            lo = np.where(short, hi, lo)
            hi = np.where(short, 2.0 * hi, hi)
        for _ in range(200):
            if np.all(hi - lo <= 1e-12):
                break
            mid = 0.5 * (lo + hi)
            above = self._log_tail(mid) > logp
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
        return 0.5 * (lo + hi)

    def mda(self):
        return MDAClass("gumbel", w=self.scaling)

    def scaling(self, u):
        return self.delta * self.tau * np.power(u, self.tau - 1.0)

    @property
    def params(self):
        return {"c": self.c, "N": self.N, "delta": self.delta, "tau": self.tau}


@dataclass(frozen=True)
class ExpEndpoint(RadialLaw):
    """Endpoint-1 law with survival ``c1 exp(-c2/(1-u))`` near the endpoint."""

    c1: float
    c2: float

    family: ClassVar[str] = "exp_endpoint"
    upper_endpoint: ClassVar[float] = 1.0
    RAMP_JUNCTION: ClassVar[float] = 0.5

    def __post_init__(self):
        if not (self.c1 > 0 and self.c2 > 0):
            raise ValueError("exp_endpoint requires c1, c2 > 0")
        log_c1 = math.log(self.c1)
        u0 = 1.0 - self.c2 / log_c1 if log_c1 > 0 else -math.inf
        if u0 >= 0.9:
            raise ValueError(
                f"exp_endpoint({self.c1}, {self.c2}): survival stays at 1 up to u={u0:.4f} >= 0.9"
            )
        ramp = u0 < 0.0
        junction = self.RAMP_JUNCTION if ramp else u0
        object.__setattr__(self, "u0", junction)
        object.__setattr__(self, "ramp", ramp)
        object.__setattr__(
            self, "_tail_at_junction", self.c1 * math.exp(-self.c2 / (1.0 - junction)) if ramp else 1.0
        )

    def _survival(self, u):
        tail = self.c1 * np.exp(-self.c2 / (1.0 - np.maximum(u, self.u0)))
        if self.ramp:
            below = 1.0 - (1.0 - self._tail_at_junction) * u / self.u0
        else:
            below = np.ones_like(u)
        return np.where(u >= self.u0, tail, below)

    def _inverse_survival(self, p):
        in_tail = p < self._tail_at_junction
        if self.ramp:
            below = self.u0 * (1.0 - p) / (1.0 - self._tail_at_junction)
        else:
            below = np.full_like(p, self.u0)
        with np.errstate(divide="ignore"):
            tail = 1.0 - self.c2 / (math.log(self.c1) - np.log(np.where(in_tail, p, 1e-300)))
        return np.where(in_tail, tail, below)

    def mda(self):
        return MDAClass("gumbel", w=self.scaling)

    def scaling(self, u):
        return self.c2 / (1.0 - u) ** 2

    @property
    def params(self):
        return {"c1": self.c1, "c2": self.c2}


@dataclass(frozen=True)
class Beta(RadialLaw):
    a: float
    b: float

    family: ClassVar[str] = "beta"
    upper_endpoint: ClassVar[float] = 1.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("beta requires a, b > 0")

    def _survival(self, u):
        return betainc(self.b, self.a, 1.0 - u)

    def _inverse_survival(self, p):
        return 1.0 - betaincinv(self.b, self.a, p)

    def mda(self):
        return MDAClass("weibull", gamma=float(self.b))

    @property
    def params(self):
        return {"a": self.a, "b": self.b}


@dataclass(frozen=True)
class Uniform(Beta):
    a: float = field(default=1.0, init=False)
    b: float = field(default=1.0, init=False)

    family: ClassVar[str] = "uniform"

    def _survival(self, u):
        return 1.0 - u

    def _inverse_survival(self, p):
        return 1.0 - p

    @property
    def params(self):
        return {}


def chi(df: int) -> Chi:
    return Chi(df)


def kotz3(c: float, N: float, delta: float, tau: float) -> Kotz3:
    return Kotz3(float(c), float(N), float(delta), float(tau))


def gaussian_kotz3(d: int) -> Kotz3:
    """Kotz III parameters whose tail is the chi(d) tail ``u^(d-2) e^(-u^2/2) / (2^(d/2-1) Gamma(d/2))``."""
    c = math.exp(-(0.5 * d - 1.0) * math.log(2.0) - math.lgamma(0.5 * d))
    return Kotz3(c, float(d - 2), 0.5, 2.0)


def exp_endpoint(c1: float, c2: float) -> ExpEndpoint:
    return ExpEndpoint(float(c1), float(c2))


def beta(a: float, b: float) -> Beta:
    return Beta(float(a), float(b))


def uniform() -> Uniform:
    return Uniform()


_FAMILIES = {
    "chi": (chi, ("df",)),
    "kotz3": (kotz3, ("c", "N", "delta", "tau")),
    "exp_endpoint": (exp_endpoint, ("c1", "c2")),
    "beta": (beta, ("a", "b")),
    "uniform": (uniform, ()),
}


def law_from_dict(cfg: dict) -> RadialLaw:
    """Build a law from ``{"family": ..., "params": {...}}``.

    Raises ``KeyError``/``ValueError`` with the offending field named.
    """
    if not isinstance(cfg, dict):
        raise ValueError("radial: expected an object with 'family' and 'params'")
    family = cfg.get("family")
    if family not in _FAMILIES:
        raise ValueError(f"radial.family: unknown family {family!r}; expected one of {sorted(_FAMILIES)}")
    params = cfg.get("params", {}) or {}
    if not isinstance(params, dict):
        raise ValueError("radial.params: expected an object")
    make, names = _FAMILIES[family]
    missing = [k for k in names if k not in params]
    extra = [k for k in params if k not in names]
    if missing:
        raise ValueError(f"radial.params: missing {missing} for family {family!r}")
    if extra:
        raise ValueError(f"radial.params: unexpected {extra} for family {family!r}")
    for k in names:
        if not isinstance(params[k], (int, float)) or isinstance(params[k], bool):
            raise ValueError(f"radial.params.{k}: expected a number, got {params[k]!r}")
    return make(*(params[k] for k in names))


def mean_excess_scaling(samples, u: float) -> float:
    """Empirical scaling function ``1 / mean(R - u | R > u)``."""
    samples = np.asarray(samples, dtype=float)
    excess = samples[samples > u] - u
    if excess.size < MIN_EXCEEDANCES:
        raise ValueError(
            f"only {excess.size} samples exceed u={u}; need at least {MIN_EXCEEDANCES}"
        )
    return 1.0 / float(np.mean(excess))


def _require_gumbel(law: RadialLaw) -> None:
    if law.mda().tag != "gumbel":
        raise MDAMismatchError(f"{law.family} is not in the Gumbel max-domain of attraction")


def gumbel_mda_check(law: RadialLaw, u: float, x: float) -> float:
    """``F(u + x/w(u)) / F(u)`` (survival ratio); tends to ``exp(-x)``."""
    _require_gumbel(law)
    return law.survival(u + x / law.scaling(u)) / law.survival(u)


def self_neglecting_check(law: RadialLaw, u: float, x: float) -> float:
    """``w(u + x/w(u)) / w(u)``; tends to 1."""
    _require_gumbel(law)
    w = law.scaling(u)
    return law.scaling(u + x / w) / w


def weibull_ratio_check(law: RadialLaw, u: float, x: float) -> float:
    """``F(1 - x/u) / F(1 - 1/u)`` (survival ratio); tends to ``x**gamma`` as ``u -> inf``."""
    if law.mda().tag != "weibull":
        raise MDAMismatchError(f"{law.family} is not in the Weibull max-domain of attraction")
    xf = law.upper_endpoint
    return law.survival(xf - x / u) / law.survival(xf - 1.0 / u)
