"""Hypothesis strategies for pgfs and laws."""

from fractions import Fraction

from hypothesis import strategies as st

from stablepgf.corpus import affine_product
from stablepgf.pgf import JointPGF


@st.composite
def pgfs(draw, max_dim=3, max_deg=3, max_terms=8):
    """Arbitrary (not necessarily stable) pgfs with small support."""
    dim = draw(st.integers(1, max_dim))
    exps = draw(st.lists(st.tuples(*[st.integers(0, max_deg)] * dim), min_size=1,
                         max_size=max_terms, unique=True))
    weights = draw(st.lists(st.integers(1, 20), min_size=len(exps), max_size=len(exps)))
    total = sum(weights)
    return JointPGF(dim, {e: Fraction(w, total) for e, w in zip(exps, weights)})


@st.composite
def stable_pgfs(draw, max_dim=3, max_factors=4):
    """Products of nonnegative affine forms: stable by construction."""
    dim = draw(st.integers(1, max_dim))
    rows = draw(st.lists(st.lists(st.integers(0, 4), min_size=dim + 1, max_size=dim + 1)
                         .filter(any), min_size=1, max_size=max_factors))
    return affine_product(rows, dim)


def thinning(dim):
    return st.lists(st.fractions(min_value=Fraction(1, 10), max_value=1, max_denominator=10),
                    min_size=dim, max_size=dim)
