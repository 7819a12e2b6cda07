"""Tail and density asymptotics for the Euclidean norm of elliptical vectors.

An elliptical vector ``X = A R U`` has radius ``R ~ F`` independent of ``U``,
uniform on the unit sphere. The law of ``||X||`` depends on ``A`` only through
the eigenvalues of ``Sigma = A A^T``. This package evaluates the first-order
expansions of ``P(||X|| > u)`` and its density when ``F`` lies in the Gumbel
or Weibull max-domain of attraction, derives extreme-value norming constants
for sample maxima, and checks everything against Monte Carlo and quadrature.
"""

from .errors import (
    AsymptoticWarning,
    EllipticalError,
    MDAMismatchError,
    MatrixError,
    PreconditionError,
)
from .spectrum import Spectrum, shape_from_A, spectrum, symmetric_eigenvalues
from .radial import RadialLaw, MDAClass, chi, kotz3, gaussian_kotz3, beta, exp_endpoint, uniform
from .asymptotics import EllipticalModel, TailApproximation

__version__ = "0.1.0"

__all__ = [
    "AsymptoticWarning",
    "EllipticalError",
    "EllipticalModel",
    "MDAClass",
    "MDAMismatchError",
    "MatrixError",
    "PreconditionError",
    "RadialLaw",
    "Spectrum",
    "TailApproximation",
    "beta",
    "chi",
    "exp_endpoint",
    "gaussian_kotz3",
    "kotz3",
    "shape_from_A",
    "spectrum",
    "symmetric_eigenvalues",
    "uniform",
]
