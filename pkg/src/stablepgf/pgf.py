"""Sparse multivariate probability generating functions with exact masses.

Coordinates are 0-based in this API.  A :class:`JointPGF` maps exponent
tuples r (nonnegative ints) to P(X = r) as :class:`fractions.Fraction`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidPGFError, StructuralError
from .poly import Polynomial, multiply

# supports that expand into binary variables are enumerated exhaustively
MAX_BINARY_VARS = 24


class JointPGF:
    """Immutable d-variate pgf; terms are stored only for positive mass."""

    __slots__ = ("dim", "_terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[tuple, Fraction], *, check: bool = True):
        if dim < 1:
            raise InvalidPGFError(f"dimension must be >= 1, got {dim}")
        clean = {}
        for r, p in terms.items():
            r = tuple(int(x) for x in r)
            p = Fraction(p)
            if check:
                if len(r) != dim:
                    raise InvalidPGFError(f"exponent {r} does not have length {dim}")
                if any(x < 0 for x in r):
                    raise InvalidPGFError(f"negative exponent in {r}")
                if p < 0:
                    raise InvalidPGFError(f"negative probability {p} at {r}")
            if p:
                clean[r] = clean.get(r, Fraction(0)) + p
        if check:
            mass = sum(clean.values(), Fraction(0))
            if mass != 1:
                raise InvalidPGFError(f"total mass is {mass}, deficit {1 - mass}")
        self.dim = dim
        self._terms = dict(sorted(clean.items()))
        self._hash = None

    # -- basic accessors --------------------------------------------------
    @property
    def terms(self) -> dict[tuple, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    @property
    def support(self) -> list[tuple]:
        return list(self._terms)

    @property
    def degree_bounds(self) -> tuple[int, ...]:
        """Per-variable maxima M_j, recomputed from the support."""
        return tuple(max(r[j] for r in self._terms) for j in range(self.dim))

    def prob(self, r: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(r), Fraction(0))

    def __call__(self, *z):
        """Evaluate f(z_1, ..., z_d); works for Fractions, floats or complex."""
        if len(z) == 1 and isinstance(z[0], (tuple, list, np.ndarray)):
            z = tuple(z[0])
        total = 0
        for r, p in self._terms.items():
            term = p
            for zj, rj in zip(z, r):
                if rj:
                    term = term * zj**rj
            total = total + term
        return total

    def __eq__(self, other) -> bool:
        return isinstance(other, JointPGF) and self.dim == other.dim and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, tuple(self._terms.items())))
        return self._hash

    def __repr__(self) -> str:
        shown = ", ".join(f"{r}: {p}" for r, p in list(self._terms.items())[:6])
        more = "" if len(self._terms) <= 6 else f", ... ({len(self._terms)} terms)"
        return f"JointPGF(dim={self.dim}, {{{shown}{more}}})"

    # -- algebra ----------------------------------------------------------
    def __mul__(self, other: "JointPGF") -> "JointPGF":
        """pgf of X + Y for independent X ~ self, Y ~ other (same dimension)."""
        if other.dim != self.dim:
            raise StructuralError("product of pgfs needs equal dimensions")
        return _dense_product([self, other])

    def __pow__(self, n: int) -> "JointPGF":
        if n < 1:
            raise ValueError("power must be >= 1")
        return _dense_product([self] * n)

    def tensor(self, other: "JointPGF") -> "JointPGF":
        """pgf of the concatenated independent vector (X, Y)."""
        terms = {}
        for r, p in self._terms.items():
            for s, q in other._terms.items():
                terms[r + s] = p * q
        return JointPGF(self.dim + other.dim, terms, check=False)

    def to_polynomial(self) -> Polynomial:
        if self.dim != 1:
            raise StructuralError("only univariate pgfs convert to a Polynomial")
        n = max(r[0] for r in self._terms)
        cs = [Fraction(0)] * (n + 1)
        for (k,), p in self._terms.items():
            cs[k] = p
        return Polynomial(cs)

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "JointPGF":
        return cls(1, {(k,): c for k, c in enumerate(p.coeffs) if c})


def make_pgf(dim: int, entries) -> JointPGF:
    """Validated pgf from (exponent, probability) pairs or a mapping.

    Zero entries are dropped; repeated exponents are summed.  The total mass
    must be exactly one.
    """
    if isinstance(entries, Mapping):
        entries = entries.items()
    terms: dict[tuple, Fraction] = {}
    for r, p in entries:
        r = (r,) if isinstance(r, int) else tuple(r)
        p = Fraction(p)
        if p < 0:
            raise InvalidPGFError(f"negative probability {p} at {r}")
        if len(r) != dim:
            raise InvalidPGFError(f"exponent {r} does not have length {dim}")
        terms[r] = terms.get(r, Fraction(0)) + p
    return JointPGF(dim, terms)


def univariate(pmf: Sequence) -> JointPGF:
    """pgf of a law on {0, ..., N} given its pmf."""
    return make_pgf(1, [((k,), Fraction(p)) for k, p in enumerate(pmf)])


def _dense_product(factors: list[JointPGF]) -> JointPGF:
    """Exact product of pgfs using dense integer arrays."""
    dim = factors[0].dim
    shape = [1] * dim
    for f in factors:
        for j, m in enumerate(f.degree_bounds):
            shape[j] += m
    if math.prod(shape) > 20_000_000:
        raise StructuralError(f"product support box {shape} is too large to enumerate")
    acc = np.zeros(shape, dtype=object)
    acc[(0,) * dim] = 1
    den = 1
    cur = [1] * dim        # current extent of acc along each axis
    for f in factors:
        d = math.lcm(*(p.denominator for p in f._terms.values()))
        den *= d
        new = np.zeros(shape, dtype=object)
        ext = [c + m for c, m in zip(cur, f.degree_bounds)]
        src = acc[tuple(slice(0, c) for c in cur)]
        for r, p in f._terms.items():
            w = int(p * d)
            sl = tuple(slice(rj, rj + c) for rj, c in zip(r, cur))
            new[sl] += w * src
        acc, cur = new, ext
    terms = {}
    for idx in zip(*np.nonzero(acc)):
        terms[tuple(int(i) for i in idx)] = Fraction(int(acc[idx]), den)
    return JointPGF(dim, terms, check=False)


# ---------------------------------------------------------------------------
# transformations


def project(f: JointPGF, a: Sequence[int]) -> Polynomial:
    """pgf of a . X, i.e. f(z^{a_1}, ..., z^{a_d})."""
    a = [int(x) for x in a]
    if len(a) != f.dim:
        raise StructuralError(f"direction has length {len(a)}, pgf has dimension {f.dim}")
    if any(x < 1 for x in a):
        raise StructuralError("projection directions must be positive integers")
    n = sum(x * m for x, m in zip(a, f.degree_bounds))
    cs = [Fraction(0)] * (n + 1)
    for r, p in f.items():
        cs[sum(x * y for x, y in zip(a, r))] += p
    return Polynomial(cs)


def aggregate(f: JointPGF, grouping: Sequence[int]) -> JointPGF:
    """pgf of block sums; ``grouping[i]`` is the block index of coordinate i."""
    grouping = [int(g) for g in grouping]
    if len(grouping) != f.dim:
        raise StructuralError("grouping must assign every coordinate to a block")
    blocks = sorted(set(grouping))
    if blocks != list(range(len(blocks))):
        raise StructuralError("grouping must be a surjection onto 0..d'-1")
    dd = len(blocks)
    terms: dict[tuple, Fraction] = {}
    for r, p in f.items():
        s = [0] * dd
        for i, g in enumerate(grouping):
            s[g] += r[i]
        key = tuple(s)
        terms[key] = terms.get(key, Fraction(0)) + p
    return JointPGF(dd, terms, check=False)


def block_grouping(bounds: Sequence[int]) -> list[int]:
    """Grouping that undoes :func:`polarize` with the same ``bounds``."""
    return [k for k, n in enumerate(bounds) for _ in range(n)]


def polarize(f: JointPGF, bounds: Sequence[int] | None = None) -> JointPGF:
    """Multi-affine polarization: z_k^j -> e_j(z_k1..z_kn) / C(n_k, j)."""
    if bounds is None:
        bounds = [max(1, m) for m in f.degree_bounds]
    bounds = [int(n) for n in bounds]
    if len(bounds) != f.dim:
        raise StructuralError("need one bound per variable")
    if min(bounds) < 1:
        raise StructuralError("bounds must be positive")
    for k, (n, m) in enumerate(zip(bounds, f.degree_bounds)):
        if n < m:
            raise StructuralError(f"bound n_{k}={n} is below the degree M_{k}={m}")
    if sum(bounds) > MAX_BINARY_VARS:
        raise StructuralError(f"polarization would use {sum(bounds)} > {MAX_BINARY_VARS} variables")
    subsets = [
        {j: [tuple(1 if i in c else 0 for i in range(n)) for c in itertools.combinations(range(n), j)]
         for j in range(n + 1)}
        for n in bounds
    ]
    terms: dict[tuple, Fraction] = {}
    for r, p in f.items():
        choices = [subsets[k][rk] for k, rk in enumerate(r)]
        w = p / math.prod(len(c) for c in choices)
        for combo in itertools.product(*choices):
            terms[sum(combo, ())] = w
    return JointPGF(sum(bounds), terms, check=False)


def smear(f: JointPGF, a: Sequence) -> Polynomial:
    """pgf of sum_j Bin(X_j, a_j): substitute z_j := 1 - a_j + a_j z."""
    a = [Fraction(x) for x in a]
    if len(a) != f.dim:
        raise StructuralError("need one thinning probability per variable")
    if any(not (0 < x <= 1) for x in a):
        raise StructuralError("thinning probabilities must lie in (0, 1]")
    factors = [Polynomial([1 - x, x]) for x in a]
    powers: list[dict[int, Polynomial]] = [{0: Polynomial([1])} for _ in a]

    def power(j: int, e: int) -> Polynomial:
        cache = powers[j]
        if e not in cache:
            cache[e] = power(j, e - 1) * factors[j]
        return cache[e]

    total = Polynomial()
    for r, p in f.items():
        term = Polynomial([p])
        for j, e in enumerate(r):
            if e:
                term = multiply(term, power(j, e))
        total = total + term
    return total


def marginal(f: JointPGF, keep: Sequence[int]) -> JointPGF:
    """Law of (X_j : j in keep), by setting the other z_j to 1."""
    keep = [int(j) for j in keep]
    if not keep:
        raise StructuralError("keep must be nonempty")
    if any(not 0 <= j < f.dim for j in keep):
        raise StructuralError(f"keep indices must lie in 0..{f.dim - 1}")
    terms: dict[tuple, Fraction] = {}
    for r, p in f.items():
        key = tuple(r[j] for j in keep)
        terms[key] = terms.get(key, Fraction(0)) + p
    return JointPGF(len(keep), terms, check=False)


@dataclass(frozen=True)
class MomentSummary:
    exact_mean: tuple[Fraction, ...]
    exact_cov: tuple[tuple[Fraction, ...], ...]
    scale: float | None = None

    @property
    def mean(self) -> np.ndarray:
        return np.array([float(x) for x in self.exact_mean])

    @property
    def covariance(self) -> np.ndarray:
        return np.array([[float(x) for x in row] for row in self.exact_cov])

    def variance_along(self, a: Sequence) -> Fraction:
        """Exact a^T C a."""
        a = [Fraction(x) for x in a]
        d = len(a)
        return sum((a[i] * a[j] * self.exact_cov[i][j] for i in range(d) for j in range(d)),
                   Fraction(0))

    def scaled_covariance(self) -> np.ndarray:
        if self.scale is None:
            return self.covariance
        return self.covariance / self.scale**2


def mean_cov(f: JointPGF, scale: float | None = None) -> MomentSummary:
    """Exact mean vector and covariance matrix."""
    d = f.dim
    mean = [Fraction(0)] * d
    second = [[Fraction(0)] * d for _ in range(d)]
    for r, p in f.items():
        for i in range(d):
            if r[i]:
                mean[i] += r[i] * p
                for j in range(i, d):
                    if r[j]:
                        second[i][j] += r[i] * r[j] * p
    cov = [[Fraction(0)] * d for _ in range(d)]
    for i in range(d):
        for j in range(i, d):
            c = second[i][j] - mean[i] * mean[j]
            cov[i][j] = cov[j][i] = c
    return MomentSummary(tuple(mean), tuple(tuple(row) for row in cov), scale)


def law_moments(p: Polynomial) -> tuple[Fraction, Fraction]:
    """Exact mean and variance of a univariate pgf."""
    m = sum((k * c for k, c in enumerate(p.coeffs)), Fraction(0))
    s2 = sum((k * k * c for k, c in enumerate(p.coeffs)), Fraction(0))
    return m, s2 - m * m
