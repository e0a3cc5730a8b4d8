import warnings
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from strategies import stable_pgfs
from stablepgf.corpus import affine_product, power_family, random_legal_matrix
from stablepgf.errors import DegenerateLawError, StructuralError
from stablepgf.pgf import mean_cov
from stablepgf.structure import (NearSingularWarning, check_hypotheses, partition,
                                 singular_clt_probe, singular_directions)

RANK_ONE_COV = [[F(1, 4), F(-1, 4)], [F(-1, 4), F(1, 4)]]


def test_check_hypotheses_examples():
    assert check_hypotheses([[1, -1], [-1, 1]])
    bad = check_hypotheses([[1, -2], [-2, 1]])
    assert not bad
    assert {v.kind for v in bad.violations} == {"row_sum"}
    assert [v.value for v in bad.violations] == [-1.0, -1.0]
    assert check_hypotheses(RANK_ONE_COV, tol=0)


def test_check_hypotheses_lists_every_violation():
    res = check_hypotheses([[-1, 1], [1, -1]])
    kinds = sorted(v.kind for v in res.violations)
    assert kinds == ["diagonal", "diagonal", "off_diagonal", "off_diagonal"]


def test_check_hypotheses_rejects_asymmetry():
    with pytest.raises(StructuralError):
        check_hypotheses([[1, -1], [0, 1]])


def test_partition_examples():
    p = partition([[1, -1, 0], [-1, 1, 0], [0, 0, 2]])
    assert p.S_list == ((0, 1),) and p.T == (2,)
    assert [v.tolist() for v in p.null_basis] == [[1, 1, 0]]
    p = partition(np.eye(4))
    assert p.T == (0, 1, 2, 3) and p.S_list == ()
    p = partition(RANK_ONE_COV)
    assert p.S_list == ((0, 1),) and p.T == ()


def test_partition_rejects_illegal_singular_block():
    # singular, but the null vector is (1, -1), not all ones
    with pytest.raises(StructuralError, match="all-ones"):
        partition([[1, 1], [1, 1]])
    # one connected block with a 2-dimensional null space
    with pytest.raises(StructuralError, match="dimension 2"):
        partition(np.ones((3, 3)))


def test_near_singular_block_warns():
    M = np.array([[1.0, -1.0], [-1.0, 1.0 + 5e-9]])
    with pytest.warns(NearSingularWarning):
        p = partition(M)
    assert p.T == (0, 1) and p.warnings


def test_singular_directions_examples():
    assert [v.tolist() for v in singular_directions(RANK_ONE_COV)] == [[1, 1]]
    assert singular_directions(np.diag([1.0, 2.0])) == []
    L = np.array([[1, -1, 0, 0], [-1, 1, 0, 0], [0, 0, 2, -2], [0, 0, -2, 2]], float)
    basis = singular_directions(L)
    assert [v.tolist() for v in basis] == [[1, 1, 0, 0], [0, 0, 1, 1]]


@given(st.integers(0, 2**32 - 1))
def test_partition_recovers_generating_blocks(seed):
    leg = random_legal_matrix(np.random.default_rng(seed))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NearSingularWarning)
        p = partition(leg.M)
    assert p.T == leg.T and p.S_list == leg.S_list
    parts = [set(p.T)] + [set(S) for S in p.S_list]
    assert sorted(i for s in parts for i in s) == list(range(len(leg.M)))
    owner = {i: k for k, s in enumerate(parts) for i in s}
    d = len(leg.M)
    assert all(leg.M[i, j] == 0 for i in range(d) for j in range(d) if owner[i] != owner[j])
    scale = np.linalg.norm(leg.M, 2)
    for v in p.null_basis:
        assert set(np.unique(v)) <= {0, 1}
        assert np.linalg.norm(leg.M @ v) <= 1e-9 * scale
        S = np.flatnonzero(v)
        sv = np.linalg.svd(leg.M[np.ix_(S, S)], compute_uv=False)
        assert np.sum(sv <= 1e-9 * scale) == 1
    if p.T:
        T = list(p.T)
        assert np.linalg.svd(leg.M[np.ix_(T, T)], compute_uv=False)[-1] > 1e-9 * scale
    supports = [set(np.flatnonzero(v)) for v in p.null_basis]
    assert all(a.isdisjoint(b) for i, a in enumerate(supports) for b in supports[i + 1:])


@given(stable_pgfs())
def test_stable_covariances_pass_exactly(f):
    assert check_hypotheses(mean_cov(f).exact_cov, tol=0)


def test_probe_rejects_deterministic_block():
    rank_one = affine_product([[0, 1, 1]], 2)
    with pytest.raises(DegenerateLawError):
        singular_clt_probe(power_family(rank_one, [2, 4, 8]), [0, 1])


def test_probe_independent_family():
    fam = power_family(affine_product([[1, 1, 0], [1, 0, 1]], 2), [4, 16, 64, 256])
    probe = singular_clt_probe(fam, [0])
    assert probe.variances == [1.0, 4.0, 16.0, 64.0]
    assert -1.1 <= probe.study.exponent <= -0.9


def test_probe_mixed_family_null_indicator():
    # coordinates 0,1 carry the rank-one law, coordinate 2 independent coins
    rank_one = affine_product([[0, 1, 1, 0]], 3)
    coins = affine_product([[1, 0, 0, 1]], 3)
    fam = power_family(rank_one * coins, [4, 16, 64])
    A = np.array(mean_cov(fam[0]).covariance) / 4
    (G,) = [np.flatnonzero(v) for v in singular_directions(A)]
    assert G.tolist() == [0, 1]
    with pytest.raises(DegenerateLawError):
        singular_clt_probe(fam, G)
    # the coin coordinate alone is a binomial trace
    probe = singular_clt_probe(fam, [2])
    assert all(a < b for a, b in zip(probe.variances, probe.variances[1:]))
    assert all(a > b for a, b in zip(probe.study.kolmogorov, probe.study.kolmogorov[1:]))
