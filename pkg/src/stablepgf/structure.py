"""Sign structure of covariance matrices of stable laws.

Matrices with nonnegative diagonal, nonpositive off-diagonal entries and
nonnegative row sums split into a nonsingular part T and blocks S whose
restrictions have the all-ones vector as their only null direction.  The
blocks are found as connected components of the nonzero pattern.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from .clt import LatticeLaw, RateStudy, rate_study
from .errors import DegenerateLawError, StructuralError
from .pgf import JointPGF, marginal, project
from .poly import DEFAULT_TOL

# a nonsingular block this close to the threshold earns a warning
NEAR_SINGULAR_FACTOR = 10.0


class NearSingularWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Violation:
    kind: str          # "diagonal", "off_diagonal" or "row_sum"
    index: tuple[int, ...]
    value: float


@dataclass(frozen=True)
class HypothesisCheck:
    ok: bool
    violations: tuple[Violation, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


def _is_exact(M) -> bool:
    return all(isinstance(x, (Fraction, int)) for row in M for x in row)


def _square(M) -> int:
    d = len(M)
    if d == 0 or any(len(row) != d for row in M):
        raise StructuralError("matrix must be square and nonempty")
    return d


def check_hypotheses(M, tol: float = DEFAULT_TOL) -> HypothesisCheck:
    """Diagonal >= 0, off-diagonal <= 0, row sums >= 0, each up to ``tol``.

    Rows of Fractions (or ints) are checked exactly; pass ``tol=0`` for a
    strict exact check.
    """
    if isinstance(M, np.ndarray):
        M = M.tolist()
    d = _square(M)
    exact = _is_exact(M)
    if not exact:
        M = [[float(x) for x in row] for row in M]
    t = Fraction(tol) if exact else tol
    scale = 1 if exact else max(1.0, max(abs(x) for row in M for x in row))
    for i in range(d):
        for j in range(i + 1, d):
            if abs(M[i][j] - M[j][i]) > t * scale:
                raise StructuralError(f"matrix is not symmetric at ({i}, {j})")
    bad = []
    for i in range(d):
        if M[i][i] < -t:
            bad.append(Violation("diagonal", (i,), float(M[i][i])))
        for j in range(d):
            if j != i and M[i][j] > t:
                bad.append(Violation("off_diagonal", (i, j), float(M[i][j])))
        s = sum(M[i], Fraction(0) if exact else 0.0)
        if s < -t:
            bad.append(Violation("row_sum", (i,), float(s)))
    return HypothesisCheck(not bad, tuple(bad))


@dataclass(frozen=True)
class CovariancePartition:
    """Disjoint index sets: T (nonsingular) and S_list (null vector all ones)."""

    dim: int
    T: tuple[int, ...]
    S_list: tuple[tuple[int, ...], ...]
    warnings: tuple[str, ...] = field(default=(), compare=False)

    @property
    def null_basis(self) -> list[np.ndarray]:
        out = []
        for S in self.S_list:
            v = np.zeros(self.dim, dtype=int)
            v[list(S)] = 1
            out.append(v)
        return out

    def to_dict(self) -> dict:
        return {"T": list(self.T), "S": [list(S) for S in self.S_list],
                "null_basis": [v.tolist() for v in self.null_basis]}


def partition(M, tol: float = DEFAULT_TOL) -> CovariancePartition:
    """Split the index set into T and the singular blocks S_alpha."""
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise StructuralError("matrix must be square and nonempty")
    d = A.shape[0]
    scale = float(np.linalg.norm(A, 2))
    if not np.allclose(A, A.T, rtol=0, atol=tol * max(scale, 1.0)):
        raise StructuralError("matrix is not symmetric")
    adj = np.abs(A) > tol * max(scale, 1e-300)
    np.fill_diagonal(adj, False)
    ncomp, labels = connected_components(adj, directed=False)
    threshold = tol * scale
    T, S_list, notes = [], [], []
    for c in range(ncomp):
        idx = np.flatnonzero(labels == c)
        B = A[np.ix_(idx, idx)]
        sv = np.linalg.svd(B, compute_uv=False)
        nullity = int(np.sum(sv <= threshold))
        members = tuple(int(i) for i in idx)
        if nullity == 0:
            if sv[-1] <= NEAR_SINGULAR_FACTOR * threshold:
                msg = (f"block {list(members)} is nearly singular: smallest singular value "
                       f"{sv[-1]:.3g} vs threshold {threshold:.3g}")
                warnings.warn(msg, NearSingularWarning, stacklevel=2)
                notes.append(msg)
            T.extend(members)
            continue
        if nullity > 1:
            raise StructuralError(
                f"block {list(members)} has a null space of dimension {nullity}; "
                "the sign hypotheses allow at most one")
        residual = float(np.linalg.norm(B.sum(axis=1)))
        if residual > threshold * np.sqrt(len(idx)):
            raise StructuralError(
                f"block {list(members)} is singular but does not annihilate the all-ones "
                f"vector (residual {residual:.3g})")
        S_list.append(members)
    S_list.sort()
    return CovariancePartition(d, tuple(sorted(T)), tuple(S_list), tuple(notes))


def singular_directions(A, tol: float = DEFAULT_TOL) -> list[np.ndarray]:
    """Indicator vectors 1_G spanning the null space of A."""
    part = partition(A, tol)
    B = np.asarray(A, dtype=float)
    sv = np.linalg.svd(B, compute_uv=False)
    nullity = int(np.sum(sv <= tol * sv[0])) if sv[0] > 0 else B.shape[0]
    basis = part.null_basis
    if nullity != len(basis):
        raise StructuralError(
            f"null space has dimension {nullity} but the partition found {len(basis)} blocks")
    return basis


@dataclass
class SingularProbe:
    block: tuple[int, ...]
    variances: list[float]
    study: RateStudy


def singular_clt_probe(family: Sequence[JointPGF], G: Sequence[int],
                       scales: Sequence[float] | None = None,
                       tol: float = DEFAULT_TOL) -> SingularProbe:
    """Rate study for Z_G = sum of X_j over j in G.

    Members where Z_G is deterministic are dropped; at least three must
    remain.  ``scales`` defaults to the standard deviation of Z_G.
    """
    G = tuple(sorted(int(j) for j in G))
    if not G:
        raise StructuralError("G must be nonempty")
    laws, kept_scales, variances = [], [], []
    for n, f in enumerate(family):
        law = LatticeLaw.from_polynomial(project(marginal(f, G), (1,) * len(G)))
        variances.append(float(law.variance))
        if law.variance > 0:
            laws.append(law)
            kept_scales.append(law.sigma if scales is None else scales[n])
    if len(laws) < 3:
        raise DegenerateLawError(
            f"Z_G for G={list(G)} has positive variance in only {len(laws)} family members; "
            "need at least three")
    study = rate_study(laws, kept_scales, tol=tol)
    return SingularProbe(G, variances, study)
