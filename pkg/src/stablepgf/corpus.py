"""Generators of stable test laws and legal covariance matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .clt import LatticeLaw
from .errors import InvalidPGFError, StructuralError
from .pgf import MAX_BINARY_VARS, JointPGF, univariate
from .poly import Polynomial

HERMITIAN_TOL = 1e-12
SPECTRUM_TOL = 1e-9
CLAMP_TOL = 1e-12
# float configuration probabilities are rationalized with this denominator cap
RATIONAL_DEN = 10**12
_DET_CHUNK = 1 << 14


@dataclass(frozen=True)
class DPPKernel:
    """Hermitian kernel K on m points with blocks partitioning the points."""

    K: np.ndarray
    blocks: tuple[tuple[int, ...], ...]

    def __init__(self, K, blocks: Sequence[Sequence[int]] | None = None):
        K = np.array(K, dtype=complex)
        if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape[0] == 0:
            raise StructuralError("kernel must be a nonempty square matrix")
        m = K.shape[0]
        if m > MAX_BINARY_VARS:
            raise StructuralError(f"kernel size {m} exceeds the enumeration cap {MAX_BINARY_VARS}")
        if np.max(np.abs(K - K.conj().T)) > HERMITIAN_TOL:
            raise InvalidPGFError("kernel is not Hermitian")
        eig = np.linalg.eigvalsh(K)
        if eig[0] < -SPECTRUM_TOL or eig[-1] > 1 + SPECTRUM_TOL:
            raise InvalidPGFError(
                f"kernel spectrum [{eig[0]:.3g}, {eig[-1]:.3g}] is not inside [0, 1]")
        if blocks is None:
            blocks = [[i] for i in range(m)]
        blocks = tuple(tuple(int(i) for i in b) for b in blocks)
        flat = sorted(i for b in blocks for i in b)
        if flat != list(range(m)) or any(not b for b in blocks):
            raise StructuralError("blocks must be nonempty, disjoint and cover 0..m-1")
        K.setflags(write=False)
        object.__setattr__(self, "K", K)
        object.__setattr__(self, "blocks", blocks)

    @property
    def size(self) -> int:
        return self.K.shape[0]


def _principal_minors(K: np.ndarray) -> np.ndarray:
    """det K_T for every subset T, indexed by bitmask."""
    m = K.shape[0]
    total = 1 << m
    out = np.empty(total, dtype=complex)
    eye = np.eye(m, dtype=complex)
    bits = 1 << np.arange(m)
    for start in range(0, total, _DET_CHUNK):
        masks = np.arange(start, min(total, start + _DET_CHUNK))
        ind = ((masks[:, None] & bits) != 0).astype(float)
        # K on T, identity off T
        batch = ind[:, :, None] * ind[:, None, :] * K + (1 - ind)[:, :, None] * eye
        out[start:start + len(masks)] = np.linalg.det(batch)
    return out


def configuration_probabilities(kernel: DPPKernel) -> np.ndarray:
    """P(exactly the points in S are present) for every bitmask S.

    Inclusion-exclusion over supersets: P(S) = sum_{T >= S} (-1)^{|T-S|} det K_T.
    """
    m = kernel.size
    a = _principal_minors(kernel.K)
    for i in range(m):
        v = a.reshape(-1, 2, 1 << i)
        v[:, 0, :] -= v[:, 1, :]
    p = a.real
    if p.min() < -CLAMP_TOL:
        raise InvalidPGFError(f"configuration probability {p.min():.3g} is negative; "
                              "kernel does not define a point process")
    return np.where(p < 0, 0.0, p)


def dpp_pgf(kernel: DPPKernel) -> JointPGF:
    """Joint pgf of the block occupancy counts of a finite determinantal process."""
    probs = configuration_probabilities(kernel)
    masks = np.arange(len(probs))
    counts = np.stack([sum(((masks >> i) & 1) for i in b) for b in kernel.blocks], axis=1)
    raw: dict[tuple, Fraction] = {}
    for c, p in zip(map(tuple, counts.tolist()), probs.tolist()):
        if p > 0:
            raw[c] = raw.get(c, Fraction(0)) + Fraction(p).limit_denominator(RATIONAL_DEN)
    mass = sum(raw.values(), Fraction(0))
    if abs(float(mass) - 1) > 1e-6:
        raise InvalidPGFError(f"configuration probabilities sum to {float(mass)}")
    return JointPGF(len(kernel.blocks), {r: p / mass for r, p in raw.items()})


def random_kernel(rng: np.random.Generator, m: int, complex_entries: bool = True) -> np.ndarray:
    """U diag(lam) U^* with Haar-like U and lam uniform in [0, 1]."""
    Z = rng.standard_normal((m, m))
    if complex_entries:
        Z = Z + 1j * rng.standard_normal((m, m))
    Q, R = np.linalg.qr(Z)
    Q = Q * (np.diag(R) / np.abs(np.diag(R)))
    lam = rng.uniform(0, 1, size=m)
    K = (Q * lam) @ Q.conj().T
    return (K + K.conj().T) / 2


def random_blocks(rng: np.random.Generator, m: int, d: int) -> list[list[int]]:
    """A random partition of 0..m-1 into d nonempty blocks."""
    if not 1 <= d <= m:
        raise ValueError("need 1 <= d <= m")
    perm = rng.permutation(m)
    cuts = np.sort(rng.choice(np.arange(1, m), size=d - 1, replace=False))
    return [sorted(int(i) for i in b) for b in np.split(perm, cuts)]


def affine_product(rows: Sequence[Sequence], dim: int) -> JointPGF:
    """prod_i (c_i0 + sum_j c_ij z_j) / (row sum), each factor a stable pgf."""
    if not rows:
        raise StructuralError("need at least one factor")
    factors = []
    for row in rows:
        row = [Fraction(c) for c in row]
        if len(row) != dim + 1:
            raise StructuralError(f"row {row} should have {dim + 1} entries")
        if any(c < 0 for c in row):
            raise InvalidPGFError("affine factors need nonnegative coefficients")
        s = sum(row)
        if s == 0:
            raise InvalidPGFError("zero row")
        terms = {(0,) * dim: row[0] / s}
        for j in range(dim):
            e = [0] * dim
            e[j] = 1
            terms[tuple(e)] = row[j + 1] / s
        factors.append(JointPGF(dim, terms))
    out = factors[0]
    for f in factors[1:]:
        out = out * f
    return out


def nr_law(roots: Sequence) -> LatticeLaw:
    """Law whose pgf is prod (x - s_j) / prod (1 - s_j) for negative roots s_j."""
    rs = [Fraction(s) for s in roots]
    if any(s >= 0 for s in rs):
        raise StructuralError("roots must be strictly negative")
    p = Polynomial.from_roots(rs)
    return LatticeLaw.from_polynomial(p * (1 / p.total()))


def random_nr_roots(n: int, seed: int, root_range=(Fraction(1, 100), 100),
                    grid: int = 100) -> list[Fraction]:
    """n distinct roots -m/grid drawn without replacement from (-hi, -lo)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    lo, hi = Fraction(root_range[0]), Fraction(root_range[1])
    first, last = math.floor(lo * grid) + 1, math.ceil(hi * grid) - 1
    if last - first + 1 < n:
        raise StructuralError(f"only {max(0, last - first + 1)} grid roots in range, need {n}")
    rng = np.random.default_rng(seed)
    picks = rng.choice(np.arange(first, last + 1), size=n, replace=False)
    return sorted((Fraction(-int(m), grid) for m in picks), reverse=True)


def random_nr_law(n: int, seed: int, root_range=(Fraction(1, 100), 100)) -> LatticeLaw:
    return nr_law(random_nr_roots(n, seed, root_range))


def nr_corpus(count: int = 500, seed: int = 0, max_degree: int = 60) -> list[LatticeLaw]:
    """Random NR laws with degrees uniform in 1..max_degree."""
    rng = np.random.default_rng(seed)
    degrees = rng.integers(1, max_degree, size=count, endpoint=True)
    return [random_nr_law(int(n), seed * 1_000_003 + i) for i, n in enumerate(degrees)]


def power_family(base: JointPGF, exponents: Sequence[int]) -> list[JointPGF]:
    """base^n for each n: the sum of n independent copies."""
    out = []
    for n in exponents:
        if n < 1:
            raise ValueError(f"exponent must be >= 1, got {n}")
        try:
            out.append(base**n)
        except StructuralError as exc:
            raise StructuralError(f"base^{n} exceeds the enumeration cap: {exc}") from None
    return out


# ---------------------------------------------------------------------------
# stable corpora


def random_affine_pgf(rng: np.random.Generator, dim: int, factors: int,
                      max_coeff: int = 5) -> JointPGF:
    rows = []
    for _ in range(factors):
        row = rng.integers(0, max_coeff, size=dim + 1, endpoint=True)
        if not row.any():
            row[rng.integers(dim + 1)] = 1
        rows.append([int(c) for c in row])
    return affine_product(rows, dim)


def random_dpp_pgf(rng: np.random.Generator, m: int, dim: int) -> JointPGF:
    K = random_kernel(rng, m)
    return dpp_pgf(DPPKernel(K, random_blocks(rng, m, dim)))


def bivariate_corpus(count: int = 100, seed: int = 0) -> list[JointPGF]:
    """Stable bivariate pgfs: affine products, finite DPPs, and tensor mixtures."""
    rng = np.random.default_rng(seed)
    rank_one = affine_product([[0, 1, 1]], 2)
    out = [rank_one]
    while len(out) < count:
        kind = len(out) % 3
        if kind == 0:
            out.append(random_affine_pgf(rng, 2, int(rng.integers(1, 7))))
        elif kind == 1:
            out.append(random_dpp_pgf(rng, int(rng.integers(2, 7)), 2))
        else:
            a = random_affine_pgf(rng, 2, int(rng.integers(1, 4)))
            out.append(a * rank_one ** int(rng.integers(1, 4)))
    return out


def stable_corpus(seed: int = 0, per_kind: int = 8) -> list[JointPGF]:
    """Mixed-dimension corpus used for transform and structure checks."""
    rng = np.random.default_rng(seed)
    out = [univariate([Fraction(1, 4), Fraction(1, 2), Fraction(1, 4)]),
           univariate([Fraction(c, 20) for c in (4, 9, 6, 1)]),
           affine_product([[0, 1, 1]], 2),
           affine_product([[1, 1, 0], [1, 0, 1]], 2)]
    for _ in range(per_kind):
        d = int(rng.integers(1, 4))
        out.append(random_affine_pgf(rng, d, int(rng.integers(1, 5)), max_coeff=3))
        m = int(rng.integers(2, 7))
        out.append(random_dpp_pgf(rng, m, int(rng.integers(1, min(m, 3) + 1))))
        out.append(JointPGF.from_polynomial(random_nr_law(int(rng.integers(1, 7)),
                                                          int(rng.integers(1 << 30))).pgf))
    return out


# ---------------------------------------------------------------------------
# legal covariance matrices


@dataclass(frozen=True)
class LegalMatrix:
    M: np.ndarray
    T: tuple[int, ...]
    S_list: tuple[tuple[int, ...], ...]


def _laplacian(rng: np.random.Generator, n: int) -> np.ndarray:
    """Weighted Laplacian of a connected graph on n vertices."""
    W = np.zeros((n, n))
    order = rng.permutation(n)
    for i in range(1, n):                       # random spanning tree
        j = order[rng.integers(i)]
        W[order[i], j] = W[j, order[i]] = rng.uniform(0.5, 2.0)
    extra = rng.random((n, n)) < 0.3
    extra = np.triu(extra, 1)
    w = rng.uniform(0.5, 2.0, size=(n, n))
    W = np.where(extra & (W == 0), w, W)
    W = np.triu(W, 1)
    W = W + W.T
    return np.diag(W.sum(axis=1)) - W


def _dominant(rng: np.random.Generator, n: int) -> np.ndarray:
    """Strictly diagonally dominant block with nonpositive off-diagonals."""
    L = _laplacian(rng, n) if n > 1 else np.zeros((1, 1))
    return L + np.diag(rng.uniform(0.5, 2.0, size=n))


def random_legal_matrix(rng: np.random.Generator, max_dim: int = 30) -> LegalMatrix:
    """Permuted direct sum of Laplacian blocks (singular) and dominant blocks."""
    sizes, kinds = [], []
    d = int(rng.integers(1, max_dim, endpoint=True))
    left = d
    while left:
        s = int(rng.integers(1, min(left, 6), endpoint=True))
        kinds.append("S" if rng.random() < 0.5 else "T")
        sizes.append(s)
        left -= s
    perm = rng.permutation(d)
    M = np.zeros((d, d))
    T, S_list = [], []
    pos = 0
    for s, kind in zip(sizes, kinds):
        idx = perm[pos:pos + s]
        pos += s
        members = tuple(sorted(int(i) for i in idx))
        if kind == "S":
            # a lone singular index is a coordinate with zero variance
            M[np.ix_(idx, idx)] = _laplacian(rng, s) if s > 1 else 0.0
            S_list.append(members)
        else:
            M[np.ix_(idx, idx)] = _dominant(rng, s)
            T.extend(members)
    return LegalMatrix(M, tuple(sorted(T)), tuple(sorted(S_list)))
