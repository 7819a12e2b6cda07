import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ellnorm.errors import AsymptoticWarning, MatrixError
from ellnorm.spectrum import (
    c_star,
    jacobi_eigh,
    leading_multiplicity,
    shape_from_A,
    shape_matrix,
    spectrum,
    symmetric_eigenvalues,
    symmetric_sqrt,
)


@pytest.mark.parametrize(
    "A, expected",
    [
        (np.eye(2), np.eye(2)),
        (np.diag([2.0, 1.0]), np.diag([4.0, 1.0])),
        ([[1.0, 1.0], [0.0, 1.0]], [[2.0, 1.0], [1.0, 1.0]]),
    ],
)
def test_shape_from_A(A, expected):
    S = shape_from_A(A)
    np.testing.assert_allclose(S, expected, rtol=0, atol=1e-15)
    assert np.array_equal(S, S.T)


def test_shape_from_A_rejects_non_square():
    with pytest.raises(MatrixError):
        shape_from_A(np.ones((2, 3)))


@pytest.mark.parametrize(
    "S, expected",
    [
        (np.eye(3), (1.0, 1.0, 1.0)),
        ([[2.0, 1.0], [1.0, 2.0]], (3.0, 1.0)),
        (np.diag([4.0, 1.0, 0.25]), (4.0, 1.0, 0.25)),
    ],
)
def test_symmetric_eigenvalues_examples(S, expected):
    np.testing.assert_allclose(symmetric_eigenvalues(S), expected, rtol=1e-12)


def test_eigenvalues_reject_bad_input():
    with pytest.raises(MatrixError, match="symmetric"):
        symmetric_eigenvalues([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(MatrixError, match="semi-definite"):
        symmetric_eigenvalues([[1.0, 0.0], [0.0, -1.0]])
    with pytest.raises(MatrixError):
        shape_matrix([[1.0]])
    with pytest.raises(MatrixError):
        shape_matrix([[1.0, math.nan], [math.nan, 1.0]])


@settings(max_examples=60, deadline=None)
@given(
    d=st.integers(2, 8),
    seed=st.integers(0, 2**32 - 1),
    zeros=st.integers(0, 2),
)
def test_jacobi_recovers_known_spectrum(d, seed, zeros):
    rng = np.random.default_rng(seed)
    D = np.sort(rng.uniform(0.01, 10.0, d))[::-1]
    D[d - min(zeros, d - 1):] = 0.0 if zeros else D[d - 1:]
    D = np.sort(D)[::-1]
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    S = Q @ np.diag(D) @ Q.T
    got = np.array(symmetric_eigenvalues(0.5 * (S + S.T)))
    np.testing.assert_allclose(got, D, rtol=1e-9, atol=1e-9 * D[0])


def test_jacobi_matches_lapack_and_vectors_diagonalise():
    rng = np.random.default_rng(7)
    B = rng.standard_normal((6, 6))
    S = B @ B.T
    values, vectors = jacobi_eigh(S)
    np.testing.assert_allclose(np.sort(values), np.linalg.eigvalsh(S), rtol=1e-10)
    np.testing.assert_allclose(vectors.T @ vectors, np.eye(6), atol=1e-12)
    np.testing.assert_allclose(vectors.T @ S @ vectors, np.diag(values), atol=1e-10 * np.abs(S).max())


def test_symmetric_sqrt_handles_singular():
    S = np.array([[1.0, 1.0], [1.0, 1.0]])
    A = symmetric_sqrt(S)
    np.testing.assert_allclose(A @ A.T, S, atol=1e-12)
    np.testing.assert_allclose(A, A.T, atol=0)


@pytest.mark.parametrize(
    "eigs, expected",
    [((1.0, 1.0, 1.0), (1.0, 3)), ((4.0, 1.0, 1.0), (4.0, 1)), ((1.0, 1.0 - 1e-12, 0.5), (1.0, 2))],
)
def test_leading_multiplicity_examples(eigs, expected):
    assert leading_multiplicity(eigs, 1e-9) == expected


def test_leading_multiplicity_rejects_zero_top():
    with pytest.raises(MatrixError):
        leading_multiplicity((0.0, 0.0))


@given(
    eigs=st.lists(st.floats(0.0, 1.0), min_size=1, max_size=6),
    t1=st.floats(0.0, 0.5),
    t2=st.floats(0.0, 0.5),
)
def test_multiplicity_monotone_in_tolerance(eigs, t1, t2):
    eigs = sorted([1.0] + eigs, reverse=True)
    lo, hi = sorted((t1, t2))
    assert leading_multiplicity(eigs, lo)[1] <= leading_multiplicity(eigs, hi)[1]


@pytest.mark.parametrize(
    "eigs, m, expected",
    [((1.0, 1.0), 2, 1.0), ((4.0, 1.0), 1, 2 / math.sqrt(3)), ((1.0, 1.0, 0.25), 2, 0.75**-0.5)],
)
def test_c_star_examples(eigs, m, expected):
    assert c_star(eigs, eigs[0], m) == pytest.approx(expected, rel=1e-14)


def test_c_star_inconsistent_multiplicity():
    with pytest.raises(MatrixError):
        c_star((1.0, 1.0), 1.0, 1)


def test_c_star_near_tie_warns():
    with pytest.warns(AsymptoticWarning):
        value = c_star((1.0, 1.0 - 1e-6), 1.0, 1)
    assert value == pytest.approx(1e3, rel=1e-6)


@given(
    ratios=st.lists(st.floats(0.0, 0.99), min_size=1, max_size=5),
    scale=st.floats(1e-6, 1e6),
)
def test_c_star_scale_invariant_and_at_least_one(ratios, scale):
    eigs = sorted([1.0] + ratios, reverse=True)
    base = c_star(eigs, 1.0, 1)
    scaled = [scale * x for x in eigs]
    assert base >= 1.0
    assert c_star(scaled, scaled[0], 1) == pytest.approx(base, rel=1e-12)


def test_spectrum_record():
    sp = spectrum(np.diag([1.0, 4.0, 1.0]))
    assert sp.eigenvalues == (4.0, 1.0, 1.0)
    assert (sp.lambda_top, sp.m, sp.d) == (4.0, 1, 3)
    assert sp.c_star == pytest.approx(1 / 0.75)
    assert sp.ratios == (0.25, 0.25)
    assert spectrum(np.eye(2)).c_star == 1.0
