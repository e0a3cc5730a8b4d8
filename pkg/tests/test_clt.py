import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from stablepgf.clt import (LatticeLaw, binomial_law, cramer_wold_battery, directions,
                           fit_exponent, gaussian_cdf, kolmogorov_distance, normalized_cdf,
                           rate_study, report)
from stablepgf.corpus import affine_product, power_family
from stablepgf.errors import DegenerateLawError, InvalidPGFError
from stablepgf.pgf import make_pgf, mean_cov, project
from stablepgf.poly import Polynomial
from scipy.special import ndtr

BERNOULLI = LatticeLaw((F(1, 2), F(1, 2)))
BIN2 = LatticeLaw((F(1, 4), F(1, 2), F(1, 4)))
RANK_ONE = make_pgf(2, [((1, 0), F(1, 2)), ((0, 1), F(1, 2))])
A_RANK_ONE = [[F(1, 4), F(-1, 4)], [F(-1, 4), F(1, 4)]]

# frozen from oracles.kolmogorov_plateaus / oracles.phi
PHI_1 = 0.8413447460685429
BERNOULLI_DISTANCE = 0.3413447460685429
BIN4096_DISTANCE = 0.00623309268188013
BINOMIAL_FAMILY_EXPONENT = -0.9949838


laws = st.lists(st.integers(0, 12), min_size=2, max_size=9).filter(
    lambda w: sum(1 for x in w if x) >= 2).map(
    lambda w: LatticeLaw(tuple(F(x, sum(w)) for x in w)))


def test_lattice_law_validation():
    with pytest.raises(InvalidPGFError):
        LatticeLaw((F(1, 2), F(1, 4)))
    with pytest.raises(InvalidPGFError):
        LatticeLaw((F(3, 2), F(-1, 2)))
    q = LatticeLaw((F(1, 2), F(1, 2), F(0)))
    assert q.degree == 1 and q.mean == F(1, 2) and q.variance == F(1, 4)


def test_normalized_cdf_examples():
    assert normalized_cdf(BERNOULLI, 0.0) == 0.5
    assert normalized_cdf(BERNOULLI, 1e9) == 1.0
    assert normalized_cdf(BIN2, 0.0) == 0.75
    with pytest.raises(DegenerateLawError):
        normalized_cdf(LatticeLaw((F(0), F(1))), 0.0)


def test_gaussian_cdf_examples():
    assert gaussian_cdf(0.0) == 0.5
    assert gaussian_cdf(1.0) == pytest.approx(PHI_1, abs=1e-15)
    assert gaussian_cdf(-1.0) == pytest.approx(1 - PHI_1, abs=1e-15)


@given(st.floats(-30, 30))
def test_gaussian_cdf_accuracy(x):
    assert abs(gaussian_cdf(x) - oracles.phi(x)) <= 1e-12


def test_kolmogorov_examples():
    assert kolmogorov_distance(BERNOULLI) == pytest.approx(BERNOULLI_DISTANCE, abs=1e-12)
    with pytest.raises(DegenerateLawError):
        kolmogorov_distance(LatticeLaw((F(0), F(0), F(1))))
    d = kolmogorov_distance(binomial_law(4096))
    assert d == pytest.approx(BIN4096_DISTANCE, abs=1e-12)
    assert d <= 0.0063


@given(laws)
def test_kolmogorov_matches_plateau_oracle(q):
    assert kolmogorov_distance(q) == pytest.approx(oracles.kolmogorov_plateaus(q.pmf), abs=1e-12)


def _grid_sup(q, xs):
    cdf = np.cumsum([float(p) for p in q.pmf])
    k = np.floor(float(q.mean) + xs * q.sigma)
    F_ = np.where(k < 0, 0.0, cdf[np.clip(k, 0, len(cdf) - 1).astype(int)])
    return float(np.max(np.abs(F_ - ndtr(xs))))


@given(laws)
def test_kolmogorov_is_an_attained_supremum(q):
    d, x = kolmogorov_distance(q, with_location=True)
    assert 0 <= d <= 1
    jumps = [(k - float(q.mean)) / q.sigma for k, p in enumerate(q.pmf) if p]
    assert min(abs(x - j) for j in jumps) < 1e-12
    span = np.linspace(jumps[0] - 2, jumps[-1] + 2, 10**6)
    assert _grid_sup(q, span) <= d + 1e-12
    near = np.linspace(x - 1, x + 1, 10**6)
    assert _grid_sup(q, near) >= d - 1e-6


@given(laws, st.lists(st.floats(-10, 10), min_size=2, max_size=20))
def test_normalized_cdf_monotone(q, xs):
    xs = sorted(xs)
    vals = [normalized_cdf(q, x) for x in xs]
    assert all(a <= b for a, b in zip(vals, vals[1:]))


def test_report_examples():
    r = report(BIN2)
    assert r.delta == pytest.approx(2.0, abs=1e-12)
    assert r.degree == 2 and r.sigma == pytest.approx(math.sqrt(0.5))
    r = report(BERNOULLI)
    assert r.kolmogorov == pytest.approx(BERNOULLI_DISTANCE, abs=1e-12)
    assert r.bound_quantity == pytest.approx(2.0)
    assert r.ratio == pytest.approx(BERNOULLI_DISTANCE / 2)
    shifted = report(LatticeLaw((F(0), F(1, 2), F(1, 2))))
    assert shifted.sigma == pytest.approx(0.5) and shifted.degree == 2
    assert shifted.kolmogorov == pytest.approx(BERNOULLI_DISTANCE, abs=1e-12)


def test_report_rejects_point_mass():
    with pytest.raises(DegenerateLawError):
        report(LatticeLaw((F(0), F(1))))


def test_battery_keeps_point_mass_directions():
    (rep,) = [r for r in cramer_wold_battery(RANK_ONE, max_den=2) if r.direction == (1, 1)]
    assert rep.variance == 0 and rep.kolmogorov is None and rep.notes


def test_battery_examples():
    reps = {r.direction: r for r in cramer_wold_battery(RANK_ONE**3, A_RANK_ONE, scale=1.0)}
    assert reps[(1, 1)].V_limit == 0.0 and reps[(1, 1)].degenerate
    assert reps[(2, 1)].V_limit == pytest.approx(0.05, abs=1e-15)
    assert not reps[(2, 1)].degenerate
    assert [r.direction for r in cramer_wold_battery(RANK_ONE, max_den=1)] == [(1, 1)]


def test_directions_are_primitive():
    ds = directions(2, 6)
    assert (2, 4) not in ds and (2, 3) in ds and len(ds) == len(set(ds))
    assert all(math.gcd(*d) == 1 for d in directions(3, 4))


def test_battery_projection_moments_exact():
    f = affine_product([[1, 2, 1], [0, 1, 3], [2, 1, 1]], 2)
    mc = mean_cov(f)
    for r in cramer_wold_battery(f, max_den=4, with_delta=False):
        q = LatticeLaw.from_polynomial(project(f, r.direction))
        assert q.mean == sum(a * m for a, m in zip(r.direction, mc.exact_mean))
        assert q.variance == mc.variance_along(r.direction)


def test_degenerate_direction_variance_collapses():
    # rank-one family: (1,1)-projection is constant, so variance / s^2 is 0 for all n
    for n in (4, 16, 64):
        reps = cramer_wold_battery(RANK_ONE**n, A_RANK_ONE, scale=math.sqrt(n), max_den=2,
                                   with_delta=False)
        r = next(r for r in reps if r.direction == (1, 1))
        assert r.degenerate and r.normalized_variance == 0.0


def test_binomial_rate_study():
    ns = [16, 64, 256, 1024, 4096]
    study = rate_study([binomial_law(n) for n in ns], [math.sqrt(n) / 2 for n in ns])
    assert study.exponent == pytest.approx(BINOMIAL_FAMILY_EXPONENT, abs=1e-6)
    assert all(a >= b for a, b in zip(study.ratios, study.ratios[1:]))


def test_constant_family_has_zero_exponent():
    study = rate_study([BIN2] * 4, [1.0, 2.0, 4.0, 8.0])
    assert study.exponent == pytest.approx(0.0, abs=1e-12)


def test_mixed_family_direction_one_two():
    base = affine_product([[1, 1, 0], [1, 0, 1], [0, 1, 1]], 2)
    ns = [2, 4, 8, 16]
    fam = power_family(base, ns)
    study = rate_study(fam, [math.sqrt(n) for n in ns], direction=(1, 2))
    assert all(a > b for a, b in zip(study.kolmogorov, study.kolmogorov[1:]))
    assert max(study.ratios) < 1


def test_rate_study_rejects_degenerate_direction():
    with pytest.raises(DegenerateLawError, match="degenerate"):
        rate_study(power_family(RANK_ONE, [1, 2, 3]), [1, 2, 3], direction=(1, 1))


def test_fit_exponent_recovers_power_law():
    xs = [1.0, 2.0, 4.0, 8.0]
    slope, intercept = fit_exponent(xs, [3 * x**-0.5 for x in xs])
    assert slope == pytest.approx(-0.5) and intercept == pytest.approx(math.log(3))


def test_kolmogorov_of_projected_polynomial():
    q = LatticeLaw.from_polynomial(Polynomial([0, F(1, 2), F(1, 2)]))
    assert kolmogorov_distance(q) == pytest.approx(BERNOULLI_DISTANCE, abs=1e-12)
