"""First-order tail and density expansions for ``||X||`` and for Beta products.

All norm-tail functions work on the normalised scale: ``u`` is the threshold in
``P(||X|| > u sqrt(lambda_top))``. Density functions require ``lambda_top = 1``
(see :meth:`EllipticalModel.normalized`).

Gumbel radius (``F in MDA(Lambda, w)``)::

    P(||X|| > u sqrt(lambda_top)) ~ C* G(d/2)/G(m/2) (2/(u w(u)))^((d-m)/2) F(u)
    h(u) ~ w(u) P(||X|| > u)

Weibull radius with endpoint 1 and index ``gamma``::

    P(||X|| > (1-u) sqrt(lambda_top))
        ~ C* G(gamma+1)/G(gamma+(d-m+2)/2) G(d/2)/G(m/2) (2u)^((d-m)/2) F(1-u)
    h(1-u) ~ (gamma + (d-m)/2) P(||X|| > 1-u) / u

Here ``F`` denotes the survival function of the radius and ``G`` the gamma function.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._numerics import beta_expectation, gamma_ratio
from .errors import AsymptoticWarning, MDAMismatchError, PreconditionError
from .radial import Kotz3, RadialLaw
from .spectrum import MULTIPLICITY_RTOL, Spectrum, shape_from_A, shape_matrix, spectrum

POWER_WARN = 0.5
UNIT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class EllipticalModel:
    """Shape matrix, its spectrum and the radial law of ``X = A R U``."""

    sigma: np.ndarray
    spectrum: Spectrum
    radial: RadialLaw

    @classmethod
    def from_sigma(cls, sigma, radial: RadialLaw, rel_tol: float = MULTIPLICITY_RTOL):
        sigma = shape_matrix(sigma)
        return cls(sigma, spectrum(sigma, rel_tol), radial)

    @classmethod
    def from_A(cls, A, radial: RadialLaw, rel_tol: float = MULTIPLICITY_RTOL):
        return cls.from_sigma(shape_from_A(A), radial, rel_tol)

    @classmethod
    def from_eigenvalues(cls, eigenvalues, radial: RadialLaw, rel_tol: float = MULTIPLICITY_RTOL):
        return cls.from_sigma(np.diag(np.asarray(eigenvalues, dtype=float)), radial, rel_tol)

    @property
    def d(self) -> int:
        return self.spectrum.d

    @property
    def m(self) -> int:
        return self.spectrum.m

    def normalized(self) -> "EllipticalModel":
        """Same model with ``Sigma / lambda_top``, so the top eigenvalue is 1."""
        lam = self.spectrum.lambda_top
        sp = self.spectrum
        scaled = Spectrum(
            eigenvalues=tuple(x / lam for x in sp.eigenvalues),
            lambda_top=1.0,
            m=sp.m,
            c_star=sp.c_star,
        )
        return EllipticalModel(self.sigma / lam, scaled, self.radial)

    def summary(self) -> dict:
        out = self.spectrum.to_dict()
        out["mda"] = str(self.radial.mda())
        out["radial"] = self.radial.to_dict()
        return out


@dataclass(frozen=True)
class TailApproximation:
    """Approximate probability together with the factors it is built from."""

    u: float
    constant_part: float
    power_part: float
    survival_part: float

    @property
    def value(self) -> float:
        return self.constant_part * self.power_part * self.survival_part

    @property
    def factors(self) -> dict:
        return {
            "constant_part": self.constant_part,
            "power_part": self.power_part,
            "survival_part": self.survival_part,
        }

    def to_dict(self) -> dict:
        return {"u": self.u, "value": self.value, **self.factors}


def _mda(law: RadialLaw, tag: str):
    cls = law.mda()
    if cls.tag != tag:
        raise MDAMismatchError(
            f"radial law {law.family} is in the {cls} domain, not {tag.capitalize()}"
        )
    return cls


def _warn_power(power: float, u: float, exponent: float) -> None:
    if exponent > 0 and power > POWER_WARN:
        warnings.warn(
            f"power term {power:.3g} > {POWER_WARN} at u={u:g}: threshold is not yet in the tail",
            AsymptoticWarning,
            stacklevel=3,
        )


def _require_unit_top(model: EllipticalModel) -> None:
    if abs(model.spectrum.lambda_top - 1.0) > UNIT_TOL:
        raise PreconditionError(
            "density and norming functions need lambda_top = 1; use model.normalized()"
        )


def gumbel_norm_tail(model: EllipticalModel, u: float) -> TailApproximation:
    """Approximation of ``P(||X|| > u sqrt(lambda_top))`` for a Gumbel-domain radius."""
    law = model.radial
    _mda(law, "gumbel")
    if not 0.0 < u < law.upper_endpoint:
        raise ValueError(f"u={u} must lie in (0, {law.upper_endpoint})")
    d, m = model.d, model.m
    const = model.spectrum.c_star * gamma_ratio((0.5 * d,), (0.5 * m,))
    power = (2.0 / (u * float(law.scaling(u)))) ** (0.5 * (d - m))
    _warn_power(power, u, d - m)
    return TailApproximation(u, const, power, law.survival(u))


def gumbel_norm_density(model: EllipticalModel, u: float) -> float:
    """Approximate density of ``||X||`` at ``u`` (``lambda_top = 1``)."""
    _require_unit_top(model)
    return float(model.radial.scaling(u)) * gumbel_norm_tail(model, u).value


def weibull_norm_tail(model: EllipticalModel, u_gap: float) -> TailApproximation:
    """Approximation of ``P(||X|| > (1 - u_gap) sqrt(lambda_top))`` for a Weibull-domain radius."""
    law = model.radial
    gamma = _mda(law, "weibull").gamma
    if law.upper_endpoint != 1.0:
        raise MDAMismatchError("Weibull expansion needs a radius with upper endpoint 1")
    if not 0.0 < u_gap < 1.0:
        raise ValueError(f"u_gap={u_gap} must lie in (0, 1)")
    d, m = model.d, model.m
    const = model.spectrum.c_star * gamma_ratio(
        (gamma + 1.0, 0.5 * d), (gamma + 0.5 * (d - m + 2), 0.5 * m)
    )
    power = (2.0 * u_gap) ** (0.5 * (d - m))
    _warn_power(power, u_gap, d - m)
    return TailApproximation(u_gap, const, power, law.survival(1.0 - u_gap))


def weibull_norm_density(model: EllipticalModel, u_gap: float) -> float:
    """Approximate density of ``||X||`` at ``1 - u_gap`` (``lambda_top = 1``)."""
    _require_unit_top(model)
    gamma = _mda(model.radial, "weibull").gamma
    index = gamma + 0.5 * (model.d - model.m)
    return index * weibull_norm_tail(model, u_gap).value / u_gap


def tail_bounds(model: EllipticalModel, u: float, rtol: float = 1e-3) -> tuple[float, float]:
    """Elementary bounds ``P(R sqrt(W) > u) <= P(||X|| > u sqrt(lambda_top)) <= F(u)``.

    ``W ~ Beta(m/2, (d-m)/2)``; the lower bound is a one-dimensional quadrature.
    """
    law = model.radial
    upper = law.survival(u)
    d, m = model.d, model.m
    if m == d or upper == 0.0:
        return upper, upper
    w_lo = (u / law.upper_endpoint) ** 2 if math.isfinite(law.upper_endpoint) else 0.0
    if w_lo >= 1.0:
        return 0.0, upper
    lower = beta_expectation(
        lambda w: law.survival(u / np.sqrt(w)), 0.5 * m, 0.5 * (d - m), w_lo=w_lo, rtol=rtol
    )
    return min(lower, upper), upper


def kotz_tail_constants(model: EllipticalModel) -> tuple[float, float]:
    """``(K, alpha)`` with ``P(||X|| > u sqrt(lambda_top)) ~ K u^alpha exp(-delta u^tau)``."""
    law = model.radial
    if not isinstance(law, Kotz3):
        raise MDAMismatchError(f"Kotz constants need a kotz3 radius, got {law.family}")
    d, m = model.d, model.m
    alpha = law.tau * (m - d) / 2.0 + law.N
    K = (
        law.c
        * model.spectrum.c_star
        * gamma_ratio((0.5 * d,), (0.5 * m,))
        * (2.0 / (law.delta * law.tau)) ** (0.5 * (d - m))
    )
    return K, alpha


def _gamma_or_weibull(law: RadialLaw):
    cls = law.mda()
    if cls.tag == "gumbel":
        return cls
    if cls.tag == "weibull" and law.upper_endpoint == 1.0:
        return cls
    raise MDAMismatchError(f"{law.family}: need a Gumbel law or a Weibull law with endpoint 1")


def _weibull_endpoint_one(law: RadialLaw, name: str) -> float:
    cls = law.mda()
    if cls.tag != "weibull" or law.upper_endpoint != 1.0:
        raise MDAMismatchError(f"{name} must be a Weibull-domain law with upper endpoint 1")
    return cls.gamma


def product_tail_beta_power(
    F: RadialLaw, a: float, b: float, delta: float, tau: float, u: float
) -> float:
    """``P(Y > u)`` for ``Y = X (1 - delta Z)^tau``, ``X ~ F``, ``Z ~ Beta(a, b)``."""
    if not (a > 0 and b > 0 and 0 < delta <= 1 and tau > 0):
        raise ValueError("need a, b > 0, delta in (0, 1], tau > 0")
    cls = _gamma_or_weibull(F)
    if cls.tag == "gumbel":
        return (
            gamma_ratio((a + b,), (b,))
            * (delta * tau * u * float(F.scaling(u))) ** (-a)
            * F.survival(u)
        )
    g = cls.gamma
    return (
        gamma_ratio((g + 1.0, a + b), (b, g + a + 1.0))
        * ((1.0 - u) / (tau * delta)) ** a
        * F.survival(u)
    )


def product_density_beta_power(
    F: RadialLaw, a: float, b: float, delta: float, tau: float, u: float
) -> float:
    """Approximate density of ``Y = X (1 - delta Z)^tau`` at ``u``."""
    cls = _gamma_or_weibull(F)
    tail = product_tail_beta_power(F, a, b, delta, tau, u)
    if cls.tag == "gumbel":
        return float(F.scaling(u)) * tail
    return (cls.gamma + a) * tail / (1.0 - u)


def product_tail_beta_mix(
    F: RadialLaw, H: RadialLaw, a: float, b: float, delta: float, u: float
) -> float:
    """``P(Y > u)`` for ``Y = R ((X - delta) Z + delta)``, ``R ~ F``, ``X ~ H``, ``Z ~ Beta(a, b)``.

    ``H`` must be Weibull-domain with endpoint 1 (index ``lam``).
    """
    if not (a > 0 and b > 0 and 0 <= delta < 1):
        raise ValueError("need a, b > 0 and delta in [0, 1)")
    lam = _weibull_endpoint_one(H, "H")
    cls = _gamma_or_weibull(F)
    if cls.tag == "gumbel":
        uw = u * float(F.scaling(u))
        return (
            gamma_ratio((lam + 1.0, a + b), (a,))
            * ((1.0 - delta) * uw) ** (-b)
            * F.survival(u)
            * H.survival(1.0 - 1.0 / uw)
        )
    g = cls.gamma
    return (
        gamma_ratio((a + b, lam + 1.0, g + 1.0), (a, g + b + lam + 1.0))
        * ((1.0 - delta) / (1.0 - u)) ** (-b)
        * F.survival(u)
        * H.survival(u)
    )


def product_density_beta_mix(
    F: RadialLaw, H: RadialLaw, a: float, b: float, delta: float, u: float
) -> float:
    """Approximate density of ``Y = R ((X - delta) Z + delta)`` at ``u``."""
    cls = _gamma_or_weibull(F)
    tail = product_tail_beta_mix(F, H, a, b, delta, u)
    if cls.tag == "gumbel":
        return float(F.scaling(u)) * tail
    lam = _weibull_endpoint_one(H, "H")
    return (cls.gamma + lam + b) * tail / (1.0 - u)
