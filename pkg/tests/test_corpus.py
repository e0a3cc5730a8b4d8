from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from stablepgf.corpus import (DPPKernel, affine_product, bivariate_corpus, dpp_pgf, nr_corpus,
                              nr_law, power_family, random_blocks, random_kernel,
                              random_nr_law, random_nr_roots, stable_corpus)
from stablepgf.errors import InvalidPGFError, StructuralError
from stablepgf.pgf import make_pgf, mean_cov, univariate
from stablepgf.poly import NRCertificate, certify_nr
from stablepgf.stability import test_stability as stability_verdict

RANK_ONE = make_pgf(2, [((1, 0), F(1, 2)), ((0, 1), F(1, 2))])
seeds = st.integers(0, 2**32 - 1)


def test_dpp_examples():
    assert dpp_pgf(DPPKernel([[0.5, 0.5], [0.5, 0.5]], [[0], [1]])) == RANK_ONE
    f = dpp_pgf(DPPKernel(np.diag([0.25, 0.5])))
    assert f == affine_product([[3, 1, 0], [1, 0, 1]], 2)
    assert dpp_pgf(DPPKernel(np.eye(2))) == make_pgf(2, [((1, 1), 1)])


def test_dpp_blocks_aggregate_points():
    f = dpp_pgf(DPPKernel(np.diag([0.25, 0.5, 1.0]), [[0, 2], [1]]))
    assert f.degree_bounds == (2, 1) and f.prob((0, 0)) == 0


def test_dpp_kernel_validation():
    with pytest.raises(InvalidPGFError, match="Hermitian"):
        DPPKernel([[0.5, 0.2], [0.1, 0.5]])
    with pytest.raises(InvalidPGFError, match="spectrum"):
        DPPKernel([[1.5, 0], [0, 0.5]])
    with pytest.raises(StructuralError):
        DPPKernel(np.eye(2) / 2, [[0], [0, 1]])
    with pytest.raises(StructuralError):
        DPPKernel(np.eye(25) / 2)


@settings(max_examples=25)
@given(seeds, st.integers(1, 7))
def test_dpp_matches_signed_determinant_oracle(seed, m):
    rng = np.random.default_rng(seed)
    K = random_kernel(rng, m)
    blocks = random_blocks(rng, m, int(rng.integers(1, m + 1)))
    f = dpp_pgf(DPPKernel(K, blocks))
    ref = oracles.dpp_block_law(K, blocks)
    assert sum(f.terms.values()) == 1
    for key in set(ref) | set(f.terms):
        assert abs(float(f.prob(key)) - ref.get(key, 0.0)) <= 1e-9


@settings(max_examples=15)
@given(seeds, st.integers(2, 6))
def test_dpp_outputs_stable_and_negatively_correlated(seed, m):
    rng = np.random.default_rng(seed)
    f = dpp_pgf(DPPKernel(random_kernel(rng, m), random_blocks(rng, m, min(m, 3))))
    assert stability_verdict(f, 40, seed=seed).stable
    cov = mean_cov(f).exact_cov
    assert all(cov[i][j] <= 0 for i in range(f.dim) for j in range(f.dim) if i != j)


def test_affine_examples():
    assert affine_product([[1, 1, 0], [1, 0, 1]], 2) == make_pgf(
        2, [((0, 0), F(1, 4)), ((1, 0), F(1, 4)), ((0, 1), F(1, 4)), ((1, 1), F(1, 4))])
    assert affine_product([[0, 1, 1]], 2) == RANK_ONE
    tri = affine_product([[1, 1, 1]] * 3, 2)
    assert tri.prob((1, 1)) == F(6, 27) and tri.prob((2, 0)) == F(3, 27)
    with pytest.raises(InvalidPGFError):
        affine_product([[0, 0, 0]], 2)
    with pytest.raises(InvalidPGFError):
        affine_product([[1, -1, 1]], 2)


def test_nr_law_examples():
    assert nr_law([-1, -2, -3]).pmf == (F(6, 24), F(11, 24), F(6, 24), F(1, 24))
    assert nr_law([-1]).pmf == (F(1, 2), F(1, 2))
    assert nr_law([-1, -2, -3, -4]).pmf == tuple(F(c, 120) for c in (24, 50, 35, 10, 1))
    with pytest.raises(StructuralError):
        nr_law([-1, 0])


@given(st.integers(1, 60), seeds)
def test_random_nr_law_is_certified(n, seed):
    roots = random_nr_roots(n, seed)
    assert len(set(roots)) == n and all(-100 < r < F(-1, 100) for r in roots)
    q = random_nr_law(n, seed)
    assert q.pmf == nr_law(roots).pmf
    cert = certify_nr(q.pgf)
    assert isinstance(cert, NRCertificate)
    assert cert.sorted_roots == pytest.approx([float(r) for r in roots], rel=1e-9)


def test_nr_corpus_deterministic():
    a, b = nr_corpus(20, seed=3), nr_corpus(20, seed=3)
    assert a == b and all(1 <= q.degree <= 60 for q in a)


def test_power_family_examples():
    bern = univariate([F(1, 2), F(1, 2)])
    assert power_family(bern, [2]) == [univariate([F(1, 4), F(1, 2), F(1, 4)])]
    assert power_family(RANK_ONE, [2])[0] == make_pgf(
        2, [((2, 0), F(1, 4)), ((1, 1), F(1, 2)), ((0, 2), F(1, 4))])
    assert power_family(RANK_ONE, [1])[0] == RANK_ONE
    with pytest.raises(ValueError):
        power_family(RANK_ONE, [0])


@given(st.integers(1, 12))
def test_power_family_moments(n):
    base = affine_product([[1, 2, 0], [0, 1, 1], [2, 1, 3]], 2)
    (g,) = power_family(base, [n])
    m0, m1 = mean_cov(base), mean_cov(g)
    assert m1.exact_mean == tuple(n * x for x in m0.exact_mean)
    assert m1.exact_cov == tuple(tuple(n * x for x in row) for row in m0.exact_cov)


def test_power_family_cap():
    big = affine_product([[1, 1, 1, 1]], 3)
    with pytest.raises(StructuralError, match=r"\^400"):
        power_family(big, [400])


def test_generated_corpora_are_stable():
    for f in bivariate_corpus(30, seed=11) + stable_corpus(seed=4, per_kind=4):
        assert stability_verdict(f, 25, seed=5).stable
