"""Eigen-structure of the shape matrix ``Sigma = A A^T``.

Only the eigenvalues of ``Sigma`` enter the law of ``||X||``: the largest one
``lambda_top``, its multiplicity ``m`` and the constant

    C* = prod_{j > m} (1 - lambda_j / lambda_top)^(-1/2),

with ``C* = 1`` when ``m = d``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AsymptoticWarning, MatrixError

SYMMETRY_RTOL = 1e-12
PSD_RTOL = 1e-10
MULTIPLICITY_RTOL = 1e-9
NEAR_TIE = 1e-4
JACOBI_TOL = 1e-14


@dataclass(frozen=True)
class Spectrum:
    """Sorted spectrum of a shape matrix.

    Attributes
    ----------
    eigenvalues : tuple of float
        Eigenvalues in descending order; round-off negatives are clipped to 0.
    lambda_top : float
        Largest eigenvalue.
    m : int
        Multiplicity of ``lambda_top``.
    c_star : float
        Product constant, always ``>= 1``.
    """

    eigenvalues: tuple[float, ...]
    lambda_top: float
    m: int
    c_star: float

    @property
    def d(self) -> int:
        return len(self.eigenvalues)

    @property
    def ratios(self) -> tuple[float, ...]:
        """``lambda_j / lambda_top`` for ``j > m``."""
        return tuple(lam / self.lambda_top for lam in self.eigenvalues[self.m:])

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "eigenvalues": list(self.eigenvalues),
            "lambda_top": self.lambda_top,
            "m": self.m,
            "c_star": self.c_star,
        }


def shape_matrix(S) -> np.ndarray:
    """Validate ``S`` as a symmetric ``d x d`` matrix (``d >= 2``) and symmetrise it exactly."""
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise MatrixError(f"shape matrix must be square, got shape {S.shape}")
    if S.shape[0] < 2:
        raise MatrixError("dimension d must be at least 2")
    if not np.all(np.isfinite(S)):
        raise MatrixError("shape matrix has non-finite entries")
    scale = np.max(np.abs(S))
    if np.max(np.abs(S - S.T)) > SYMMETRY_RTOL * max(scale, np.finfo(float).tiny):
        raise MatrixError("shape matrix is not symmetric")
    return 0.5 * (S + S.T)


def shape_from_A(A) -> np.ndarray:
    """Return ``A A^T`` averaged with its transpose."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise MatrixError(f"A must be square, got shape {A.shape}")
    if A.shape[0] < 2:
        raise MatrixError("dimension d must be at least 2")
    S = A @ A.T
    return 0.5 * (S + S.T)


def jacobi_eigh(S, tol: float = JACOBI_TOL, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Sweeps over all pairs ``(p, q)`` with ``p < q`` and annihilates ``S[p, q]``
    with a plane rotation, until the off-diagonal Frobenius norm falls below
    ``tol * ||S||_F``.

    Returns
    -------
    values : ndarray
        Eigenvalues (unsorted).
    vectors : ndarray
        Orthogonal matrix whose columns are the matching eigenvectors.
    """
    a = np.array(S, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    target = tol * np.linalg.norm(a)
    for _ in range(max_sweeps):
        off = math.sqrt(2.0 * np.sum(np.triu(a, 1) ** 2))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(apq) <= 1e-300 * abs(diff):
                    # rotation angle below double resolution
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = diff / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                v[:, p] = c * vp - v[:, q] * s
                v[:, q] = s * vp + c * v[:, q]
    else:
        raise MatrixError("Jacobi iteration did not converge")
    return np.diag(a).copy(), v


def _sorted_checked(values: np.ndarray, vectors: np.ndarray | None = None):
    order = np.argsort(values)[::-1]
    values = values[order]
    top = values[0]
    if top <= 0.0:
        if np.all(np.abs(values) <= PSD_RTOL * max(abs(top), 1.0)):
            return values, None if vectors is None else vectors[:, order]
        raise MatrixError("shape matrix is not positive semi-definite")
    if values[-1] < -PSD_RTOL * top:
        raise MatrixError(
            f"shape matrix is not positive semi-definite (eigenvalue {values[-1]:.3g})"
        )
    values = np.maximum(values, 0.0)
    return values, None if vectors is None else vectors[:, order]


def symmetric_eigenvalues(S) -> tuple[float, ...]:
    """Eigenvalues of a symmetric PSD matrix in descending order."""
    values, _ = jacobi_eigh(shape_matrix(S))
    values, _ = _sorted_checked(values)
    return tuple(float(x) for x in values)


def symmetric_sqrt(S) -> np.ndarray:
    """Symmetric square root ``Q diag(sqrt(lambda)) Q^T``; works for singular ``S``."""
    values, vectors = jacobi_eigh(shape_matrix(S))
    values, vectors = _sorted_checked(values, vectors)
    return (vectors * np.sqrt(values)) @ vectors.T


def leading_multiplicity(eigs, rel_tol: float = MULTIPLICITY_RTOL) -> tuple[float, int]:
    """Top eigenvalue and the number of eigenvalues within ``rel_tol`` of it."""
    eigs = [float(x) for x in eigs]
    if not eigs or eigs[0] <= 0.0:
        raise MatrixError("largest eigenvalue must be positive (||X|| would vanish)")
    top = eigs[0]
    m = sum(1 for lam in eigs if lam >= (1.0 - rel_tol) * top)
    return top, m


def c_star(eigs, lambda_top: float, m: int, rel_tol: float = MULTIPLICITY_RTOL) -> float:
    r"""``prod_{j>m} (1 - lambda_j/lambda_top)^{-1/2}``, equal to 1 when ``m = d``.

    Warns with :class:`AsymptoticWarning` when a trailing eigenvalue is within
    ``1e-4`` (relative) of the top one, since the constant then blows up.
    """
    tail = [float(x) for x in eigs[m:]]
    log_c = 0.0
    for lam in tail:
        ratio = lam / lambda_top
        if ratio >= 1.0 - rel_tol:
            raise MatrixError(
                f"eigenvalue {lam!r} ties the top eigenvalue but lies outside the multiplicity m={m}"
            )
        if ratio > 1.0 - NEAR_TIE:
            warnings.warn(
                f"eigenvalue ratio {ratio:.8f} is close to 1: C* is large and the "
                "expansion becomes accurate only far out in the tail",
                AsymptoticWarning,
                stacklevel=2,
            )
        log_c -= 0.5 * math.log1p(-ratio)
    return math.exp(log_c)


def spectrum(S, rel_tol: float = MULTIPLICITY_RTOL) -> Spectrum:
    """Full :class:`Spectrum` of a shape matrix."""
    eigs = symmetric_eigenvalues(S)
    top, m = leading_multiplicity(eigs, rel_tol)
    return Spectrum(eigenvalues=eigs, lambda_top=top, m=m, c_star=c_star(eigs, top, m, rel_tol))
