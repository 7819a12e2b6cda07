import math

import numpy as np
import pytest
from scipy import special

from ellnorm import EllipticalModel, beta, chi, gaussian_kotz3, kotz3, uniform
from ellnorm.asymptotics import gumbel_norm_tail, weibull_norm_tail
from ellnorm.errors import MDAMismatchError, PreconditionError
from ellnorm.extremes import (
    bc_boundary,
    bc_simulate,
    ks_distance,
    limit_cdf,
    maxima_simulate,
    norming_empirical,
    norming_for,
    norming_gumbel,
    norming_kotz,
    norming_weibull,
)


def model(eigs, law):
    return EllipticalModel.from_eigenvalues(eigs, law)


# --- norming constants ---------------------------------------------------


@pytest.mark.parametrize("n", [10, 1000, 10**6])
def test_norming_exponential(expo, n):
    nc = norming_gumbel(model((1, 1), expo), n)
    assert nc.location == pytest.approx(math.log(n), rel=1e-12)
    assert nc.scale == 1.0 and nc.limit == "gumbel"


def test_norming_chi2():
    nc = norming_gumbel(model((1, 1), chi(2)), 10**4)
    assert nc.location == pytest.approx(math.sqrt(2 * math.log(1e4)), rel=1e-12)
    assert nc.location == pytest.approx(4.29193, abs=1e-5)
    assert nc.scale == pytest.approx(1 / nc.location, rel=1e-12)


@pytest.mark.parametrize("n", [100, 10**4, 10**6, 10**9])
def test_norming_residuals(gumbel_model, chi3_model, n):
    for m in (gumbel_model, chi3_model):
        nc = norming_gumbel(m, n)
        assert abs(gumbel_norm_tail(m, nc.location).value - 1 / n) <= 1e-10 / n
    w = model((1, 0.25), uniform())
    nc = norming_weibull(w, n)
    assert abs(weibull_norm_tail(w, nc.scale).value - 1 / n) <= 1e-10 / n


def test_norming_gumbel_closed_form_check(gumbel_model):
    u = norming_gumbel(gumbel_model, 10**6).location
    lhs = math.sqrt(2) / math.sqrt(math.pi) * math.sqrt(2 / u) * math.exp(-u)
    assert lhs == pytest.approx(1e-6, rel=1e-12)


def test_norming_gumbel_rejects_invalid(gumbel_model):
    with pytest.raises(ValueError):
        norming_gumbel(gumbel_model, 1)
    with pytest.raises(PreconditionError):
        norming_gumbel(model((4, 2), kotz3(1, 0, 1, 1)), 100)
    with pytest.raises(MDAMismatchError):
        norming_gumbel(model((1, 0.5), uniform()), 100)


def test_norming_kotz_examples(expo):
    for n in (10, 10**5):
        nc = norming_kotz(model((1, 1), expo), n)
        assert nc.scale == pytest.approx(1.0) and nc.location == pytest.approx(math.log(n), rel=1e-12)
    n = 10**6
    m = model((1, 1), gaussian_kotz3(2))
    nk = norming_kotz(m, n)
    assert nk.scale == pytest.approx((2 * math.log(n)) ** -0.5, rel=1e-12)
    assert nk.location == pytest.approx(norming_gumbel(m, n).location, rel=0.02)


def test_norming_kotz_leading_term():
    law = kotz3(2.0, 1.5, 0.7, 1.3)
    m = model((1, 0.5, 0.25), law)
    ratios = [norming_kotz(m, n).location / (math.log(n) / law.delta) ** (1 / law.tau) for n in (1e3, 1e8, 1e30, 1e200)]
    errs = [abs(r - 1) for r in ratios]
    assert errs == sorted(errs, reverse=True) and errs[-1] < 0.01


def test_norming_kotz_needs_kotz():
    with pytest.raises(MDAMismatchError):
        norming_kotz(model((1, 1), chi(2)), 100)


def test_norming_weibull_examples(weibull_model):
    for n in (10, 1000):
        nc = norming_weibull(model((1, 1), uniform()), n)
        assert nc.scale == pytest.approx(1 / n, rel=1e-12) and nc.index == 1 and nc.location == 1
    nc = norming_weibull(weibull_model, 1000)
    coef = weibull_norm_tail(weibull_model, 0.5).value / 0.5**1.5
    assert nc.scale == pytest.approx((1e-3 / coef) ** (2 / 3), rel=1e-12)
    assert nc.scale == pytest.approx(0.012756, rel=2e-3)
    assert nc.index == pytest.approx(1.5)
    assert norming_weibull(model((1, 1), beta(2, 3)), 100).index == 3


def test_norming_for_dispatch(expo):
    assert norming_for(model((1, 1), expo), 50).limit == "gumbel"
    assert norming_for(model((1, 1), uniform()), 50).limit == "weibull"


def test_norming_empirical_close_to_formula(expo):
    m = model((1, 1), expo)
    emp = norming_empirical(m, 1000, 2_000_000, seed=3)
    assert emp.location == pytest.approx(math.log(1000), abs=0.1)


# --- KS distance ---------------------------------------------------------


def test_ks_examples():
    median = -math.log(math.log(2))
    assert ks_distance([median], "gumbel") == pytest.approx(0.5, abs=1e-12)
    N = 1000
    q = -np.log(-np.log((np.arange(1, N + 1) - 0.5) / N))
    assert ks_distance(q, "gumbel") <= 1 / (2 * N) + 1e-12
    with pytest.raises(ValueError):
        ks_distance([], "gumbel")


def test_ks_discriminates_wrong_limit():
    rng = np.random.default_rng(4)
    psi = -rng.exponential(size=2000)  # exact Psi_1 sample
    assert ks_distance(psi, "weibull", 1.0) < 0.05
    assert ks_distance(psi, "gumbel") > 0.15


def test_limit_cdf_values():
    assert limit_cdf(0.0, "gumbel") == pytest.approx(math.exp(-1))
    assert limit_cdf(-1.0, "weibull", 2.0) == pytest.approx(math.exp(-1))
    assert limit_cdf(0.5, "weibull", 2.0) == 1.0
    with pytest.raises(ValueError):
        limit_cdf(0.0, "frechet")


# --- block maxima --------------------------------------------------------


def test_maxima_examples(expo):
    e = maxima_simulate(model((1, 1), expo), 1000, 2000, seed=5)
    assert e.shape == (2000,) and ks_distance(e, "gumbel") <= 0.05
    u = maxima_simulate(model((1, 1), uniform()), 1000, 2000, seed=6)
    assert np.all(u <= 0) and ks_distance(u, "weibull", 1.0) <= 0.05
    assert maxima_simulate(model((1, 1), expo), 1000, 0, seed=5).size == 0


def test_maxima_deterministic(chi3_model):
    a = maxima_simulate(chi3_model, 500, 300, seed=7)
    assert np.array_equal(a, maxima_simulate(chi3_model, 500, 300, seed=7))


def test_transposed_normalisation_diverges(expo):
    """Dividing by the quantile instead of 1/w sends the statistic away from the limit."""
    m = model((1, 1), expo)
    nc = norming_gumbel(m, 10**4)
    from ellnorm.extremes import NormingConstants

    swapped = NormingConstants(nc.scale, nc.location, "gumbel")
    good = ks_distance(maxima_simulate(m, 10**4, 500, seed=8, norming=nc), "gumbel")
    bad = ks_distance(maxima_simulate(m, 10**4, 500, seed=8, norming=swapped), "gumbel")
    assert good < 0.08 and bad > 0.5


def test_weibull_index_recovered(weibull_model):
    """Tail slope of -ln(-ln F) at the largest maxima recovers gamma + (d - m)/2."""
    z = maxima_simulate(weibull_model, 1000, 5000, seed=9)
    x = np.sort(-z)  # |Y|, with P(|Y| <= t) = 1 - exp(-t^1.5)
    ecdf = (np.arange(1, x.size + 1) - 0.5) / x.size
    keep = (ecdf > 0.02) & (ecdf < 0.9)
    slope = np.polyfit(np.log(x[keep]), np.log(-np.log1p(-ecdf[keep])), 1)[0]
    assert slope == pytest.approx(1.5, abs=0.1)


# --- Borel-Cantelli boundary --------------------------------------------


def test_bc_critical_values(expo):
    for d in (2, 3, 4):
        for m_top in range(1, d + 1):
            eigs = [1.0] * m_top + [0.5] * (d - m_top)
            b = bc_boundary(model(eigs, gaussian_kotz3(d)), 1.0)
            # delta tau = 1 for Gaussian parameters
            assert b.s_critical == pytest.approx(m_top / 2, abs=1e-12)
    assert bc_boundary(model((1, 1), expo), 0.0).s_critical == 1.0
    assert bc_boundary(model((1, 0.5, 0.5), gaussian_kotz3(3)), 0.0).s_critical == pytest.approx(0.5)


def test_bc_verdicts_and_boundary_case(expo):
    m = model((1, 1), expo)
    assert bc_boundary(m, 1.0).verdict == "io_one"
    assert bc_boundary(m, 1.0 + 1e-9).verdict == "io_zero"
    assert bc_boundary(model((1, 1), gaussian_kotz3(2)), 1.4).verdict == "io_zero"


def test_bc_verdict_flips_once(expo):
    m = model((1, 1), expo)
    verdicts = [bc_boundary(m, round(0.1 * k, 10)).verdict for k in range(31)]
    flips = sum(a != b for a, b in zip(verdicts, verdicts[1:]))
    assert flips == 1 and verdicts[0] == "io_one" and verdicts[-1] == "io_zero"


def test_bc_b_star_increasing(expo):
    b = bc_boundary(model((1, 1), expo), 0.5)
    n = np.arange(3, 10_000)
    assert np.all(np.diff(b.b_star(n)) > 0)
    g = bc_boundary(model((1, 1), gaussian_kotz3(2)), 1.0)
    assert g.b_star(100.0) == pytest.approx(math.sqrt(2 * (math.log(100) + math.log(math.log(100)))))


def test_bc_preconditions():
    with pytest.raises(PreconditionError):
        bc_boundary(model((1, 1), kotz3(1, 0, 2, 1)), 1.0)
    with pytest.raises(PreconditionError):
        bc_boundary(model((1, 1), chi(2)), 1.0)
    with pytest.raises(PreconditionError):
        bc_boundary(model((2, 2), kotz3(1, 0, 1, 1)), 1.0)


def test_bc_simulate_examples(expo):
    m = model((1, 1), expo)
    low = bc_simulate(m, 0.2, 10**6, seed=42)
    high = bc_simulate(m, 3.0, 10**6, seed=42)
    assert low.count_beyond(100) >= 3
    assert high.count_beyond(100) <= 1
    assert bc_simulate(m, 0.2, 0, seed=42).count == 0
    # the same draws are used, so a higher boundary is crossed at a subset of indices
    assert set(high.n) <= set(low.n)
    assert np.all(low.value > low.bound) and np.all(low.n >= 3)


def test_bc_csv(expo):
    run = bc_simulate(model((1, 1), expo), 0.5, 10_000, seed=1)
    lines = run.to_csv().splitlines()
    assert lines[0] == "n,value,boundary" and len(lines) == run.count + 1
    if run.count:
        n, v, b = lines[1].split(",")
        assert int(n) == run.n[0] and float(v) == run.value[0] and float(b) == run.bound[0]
