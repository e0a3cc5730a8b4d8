"""Gaussian approximation diagnostics for lattice laws.

The key quantity is the Kolmogorov distance between the self-normalized CDF
F(x) = P(X <= m + x sigma) and the standard normal CDF, compared with the
scale N^{1/3} / sigma that controls it for pgfs without roots near 1.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.special import ndtr

from .errors import DegenerateLawError, InvalidPGFError, RootFindingError, StructuralError
from .pgf import JointPGF, mean_cov, project
from .poly import DEFAULT_TOL, Polynomial, min_distance_to_one
from .stability import sector_bound

DEFAULT_MAX_DEN = 6


@dataclass(frozen=True)
class LatticeLaw:
    """A law on {0, ..., N} with exact probabilities (pmf[k] = Q(k))."""

    pmf: tuple[Fraction, ...]

    def __init__(self, pmf: Sequence):
        ps = [Fraction(p) for p in pmf]
        while len(ps) > 1 and ps[-1] == 0:
            ps.pop()
        if any(p < 0 for p in ps):
            raise InvalidPGFError("negative probability in pmf")
        if sum(ps, Fraction(0)) != 1:
            raise InvalidPGFError(f"pmf sums to {sum(ps, Fraction(0))}, not 1")
        object.__setattr__(self, "pmf", tuple(ps))

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "LatticeLaw":
        return cls(p.coeffs)

    @classmethod
    def from_pgf(cls, f: JointPGF) -> "LatticeLaw":
        return cls(f.to_polynomial().coeffs)

    @property
    def pgf(self) -> Polynomial:
        return Polynomial(self.pmf)

    @property
    def degree(self) -> int:
        return len(self.pmf) - 1

    @functools.cached_property
    def _scaled(self) -> tuple[list[int], int]:
        # integer numerators over a common denominator keep the sums cheap
        den = math.lcm(*(p.denominator for p in self.pmf))
        return [p.numerator * (den // p.denominator) for p in self.pmf], den

    @functools.cached_property
    def mean(self) -> Fraction:
        nums, den = self._scaled
        return Fraction(sum(k * c for k, c in enumerate(nums)), den)

    @functools.cached_property
    def variance(self) -> Fraction:
        nums, den = self._scaled
        return Fraction(sum(k * k * c for k, c in enumerate(nums)), den) - self.mean**2

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)


def binomial_law(n: int, p=Fraction(1, 2)) -> LatticeLaw:
    p = Fraction(p)
    a, b = p.numerator, p.denominator - p.numerator      # P(k) = C(n,k) a^k b^(n-k) / den^n
    den = p.denominator**n
    pmf, c = [], 1
    for k in range(n + 1):
        pmf.append(Fraction(c * a**k * b ** (n - k), den))
        c = c * (n - k) // (k + 1)
    return LatticeLaw(pmf)


def _require_spread(q: LatticeLaw) -> None:
    if q.variance == 0:
        raise DegenerateLawError("law has zero variance; the normalized CDF is undefined")


def normalized_cdf(q: LatticeLaw, x: float) -> float:
    """F(x) = sum of Q(k) over k <= m + x sigma."""
    _require_spread(q)
    if x == math.inf:
        return 1.0
    if x == -math.inf:
        return 0.0
    cut = float(q.mean) + x * q.sigma
    kmax = math.floor(cut)
    return float(sum(q.pmf[: max(0, kmax + 1)], Fraction(0)))


def gaussian_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def _cumulative(q: LatticeLaw) -> np.ndarray:
    nums, den = q._scaled
    # int / int is correctly rounded, even for huge numerators
    return np.array([c / den for c in itertools.accumulate(nums)])


def kolmogorov_distance(q: LatticeLaw, *, with_location: bool = False):
    """sup_x |F(x) - Phi(x)|, exactly.

    F is a step function jumping at x_k = (k - m) / sigma, and Phi is
    monotone between jumps, so the supremum is reached as a one-sided limit
    at some jump point.
    """
    _require_spread(q)
    m, s = float(q.mean), q.sigma
    xs = (np.arange(len(q.pmf)) - m) / s
    phi = ndtr(xs)
    after = _cumulative(q)
    before = np.concatenate([[0.0], after[:-1]])
    gaps = np.maximum(np.abs(after - phi), np.abs(before - phi))
    k = int(np.argmax(gaps))
    dist = float(min(1.0, gaps[k]))
    return (dist, float(xs[k])) if with_location else dist


@dataclass
class CLTReport:
    direction: tuple[int, ...] | None
    degree: int
    mean: float
    variance: float
    kolmogorov: float | None = None
    delta: float | None = None
    delta_bound: float | None = None
    bound_quantity: float | None = None
    ratio: float | None = None
    V_limit: float | None = None
    degenerate: bool = False
    normalized_variance: float | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def sigma(self) -> float:
        return math.sqrt(self.variance)

    def to_dict(self) -> dict:
        return asdict(self)


def _bare_report(q: LatticeLaw, direction) -> CLTReport:
    rep = CLTReport(direction=None if direction is None else tuple(direction),
                    degree=q.degree, mean=float(q.mean), variance=float(q.variance))
    if direction is not None:
        rep.delta_bound = sector_bound(direction)
    return rep


def report(q: LatticeLaw, tol: float = DEFAULT_TOL, *, direction=None,
           with_delta: bool = True) -> CLTReport:
    """Kolmogorov distance, root gap to 1, and the N^{1/3}/sigma scale."""
    _require_spread(q)
    rep = _bare_report(q, direction)
    rep.kolmogorov = kolmogorov_distance(q)
    rep.bound_quantity = q.degree ** (1 / 3) / rep.sigma
    rep.ratio = rep.kolmogorov / rep.bound_quantity
    if with_delta:
        try:
            rep.delta = min_distance_to_one(q.pgf, tol)
        except RootFindingError as exc:
            rep.notes.append(f"delta not certified: {exc}")
    return rep


def directions(dim: int, max_den: int) -> list[tuple[int, ...]]:
    """Primitive positive integer vectors with entries <= max_den."""
    if dim < 1 or max_den < 1:
        raise ValueError("dim and max_den must be >= 1")
    return [a for a in itertools.product(range(1, max_den + 1), repeat=dim)
            if math.gcd(*a) == 1]


def _quadratic(A, a) -> float:
    A = np.asarray(A, dtype=float)
    v = np.asarray(a, dtype=float)
    return float(v @ A @ v)


def cramer_wold_battery(f: JointPGF, A=None, scale: float = 1.0,
                        max_den: int = DEFAULT_MAX_DEN, tol: float = DEFAULT_TOL,
                        with_delta: bool = True) -> list[CLTReport]:
    """One report per primitive positive direction a with entries <= max_den.

    With a limit covariance ``A``, each report carries V = a^T A a / |a|^2
    and is flagged degenerate when V <= tol; there the projected law should
    collapse (variance / (|a|^2 s^2) -> 0) instead of becoming Gaussian.
    """
    if f.dim < 2:
        raise StructuralError("the projection battery needs dim >= 2")
    if scale <= 0:
        raise ValueError("scale must be positive")
    moments = mean_cov(f)
    out = []
    for a in directions(f.dim, max_den):
        law = LatticeLaw.from_polynomial(project(f, a))
        if law.variance == 0:
            rep = _bare_report(law, a)
            rep.notes.append("zero variance: projected law is a point mass")
        else:
            rep = report(law, tol, direction=a, with_delta=with_delta)
        norm2 = sum(x * x for x in a)
        rep.normalized_variance = float(moments.variance_along(a)) / (norm2 * scale**2)
        if A is not None:
            rep.V_limit = _quadratic(A, a) / norm2
            rep.degenerate = rep.V_limit <= tol
        out.append(rep)
    return out


@dataclass
class RateStudy:
    exponent: float
    intercept: float
    scales: list[float]
    sigmas: list[float]
    kolmogorov: list[float]
    ratios: list[float]
    degrees: list[int]
    reports: list[CLTReport] = field(repr=False, default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["reports"] = [r.to_dict() for r in self.reports]
        return d


def fit_exponent(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """OLS slope and intercept of log y against log x (unweighted)."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    slope, intercept = np.polyfit(lx, ly, 1)
    return float(slope), float(intercept)


def rate_study(family: Sequence, scales: Sequence[float], direction=None,
               tol: float = DEFAULT_TOL, with_delta: bool = False) -> RateStudy:
    """Kolmogorov distance along a family, fitted against the scales s_n.

    ``family`` holds :class:`JointPGF` or :class:`LatticeLaw` members; joint
    pgfs are projected on ``direction`` (all ones by default).
    """
    if len(family) < 3:
        raise ValueError("a rate study needs at least three family members")
    if len(scales) != len(family):
        raise ValueError("need one scale per family member")
    reports = []
    for f in family:
        if isinstance(f, LatticeLaw):
            law, a = f, direction
        else:
            a = tuple(direction) if direction is not None else (1,) * f.dim
            law = LatticeLaw.from_polynomial(project(f, a))
        if law.variance == 0:
            raise DegenerateLawError(
                f"projected law along {a} has zero variance; this direction is degenerate "
                "(see the degenerate flags of cramer_wold_battery)")
        reports.append(report(law, tol, direction=a, with_delta=with_delta))
    ks = [r.kolmogorov for r in reports]
    slope, icpt = fit_exponent(scales, ks)
    return RateStudy(slope, icpt, [float(s) for s in scales], [r.sigma for r in reports], ks,
                     [r.ratio for r in reports], [r.degree for r in reports], reports)
