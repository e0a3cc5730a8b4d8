"""k-section decomposition, interlacing certificates and stable division.

Writing f(x) = sum_i x^i g_i(x^k), the parts g_i of a polynomial with simple
negative roots again have simple negative roots, and the merged root list
s_0 > s_1 > ... assigns s_j to g_{j mod k}.  Summing the parts gives the pgf
of floor(X/k), which is therefore real-rooted.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .clt import LatticeLaw
from .errors import ConclusionFailure, HypothesisError, StructuralError
from .poly import (DEFAULT_TOL, NRCertificate, NRRefutation, Polynomial, certify_nr,
                   check_interlacing, roots)
from .stability import StabilityRefutation, univariate_stable


@dataclass(frozen=True)
class Decomposition:
    k: int
    parts: tuple[Polynomial, ...]
    source_degree: int

    def reassemble(self) -> Polynomial:
        out = Polynomial()
        for i, g in enumerate(self.parts):
            out = out + Polynomial.monomial(i) * g.compose_power(self.k)
        return out


def decompose(f: Polynomial, k: int) -> Decomposition:
    """Parts g_0..g_{k-1} with [y^j] g_i = [x^{kj+i}] f."""
    if k < 2:
        raise StructuralError("k must be >= 2")
    if f.degree < 1:
        raise StructuralError("decompose needs degree >= 1")
    parts = tuple(Polynomial(f.coeffs[i::k]) for i in range(k))
    return Decomposition(k, parts, f.degree)


@dataclass(frozen=True)
class InterlaceCertificate:
    k: int
    source: NRCertificate
    parts: tuple[NRCertificate, ...]
    merged: tuple[float, ...]
    owner: tuple[int, ...]


def verify_interlace(f: Polynomial, k: int, tol: float = DEFAULT_TOL) -> InterlaceCertificate:
    """Certify that every g_i has simple negative roots and that they interlace.

    Raises :class:`HypothesisError` when f itself does not have simple
    negative roots and :class:`ConclusionFailure` if the conclusion fails on
    a valid input.
    """
    src = certify_nr(f, tol)
    if isinstance(src, NRRefutation):
        raise HypothesisError(f"input is not in NR ({src.reason} root near {src.root:.6g})")
    dec = decompose(f, k)
    certs = []
    for i, g in enumerate(dec.parts):
        if g.degree < 1:
            certs.append(NRCertificate(()))
            continue
        c = certify_nr(g, tol)
        if isinstance(c, NRRefutation):
            raise ConclusionFailure(
                f"part g_{i} of {f!r} (k={k}) is not in NR: {c.reason} root near {c.root:.12g}")
        certs.append(c)
    n = f.degree
    if n < k - 1:
        # every part is a constant (or zero): nothing to interlace
        return InterlaceCertificate(k, src, tuple(certs), (), ())
    res = check_interlacing(certs, k, n, tol)
    if not res:
        j = res.first_violation
        raise ConclusionFailure(
            f"interlacing fails for {f!r} with k={k} at merged position {j}: "
            f"owner {res.owner[j]}, expected {j % k}")
    return InterlaceCertificate(k, src, tuple(certs), res.merged, res.owner)


@dataclass(frozen=True)
class RealRootReport:
    """Roots of a univariate pgf and whether they are all real.

    ``proven`` is True when every root is an isolated root certified real;
    clusters of repeated roots are judged by their centers only.
    """

    real_rooted: bool
    proven: bool
    roots: tuple[complex, ...] = ()
    multiplicities: tuple[int, ...] = ()
    errors: tuple[float, ...] = ()

    def __bool__(self) -> bool:
        return self.real_rooted


def real_root_report(p: Polynomial, tol: float = DEFAULT_TOL) -> RealRootReport:
    if p.degree < 1:
        return RealRootReport(True, True)
    rs = roots(p, tol)
    real = all(abs(r.imag) <= tol * max(1.0, abs(r)) for r in rs.roots)
    return RealRootReport(real, real and all(rs.real), rs.roots, rs.multiplicities, rs.errors)


@dataclass(frozen=True)
class DivisionResult:
    law: LatticeLaw
    pgf: Polynomial
    report: RealRootReport
    exploratory: bool = False

    def __bool__(self) -> bool:
        return self.report.real_rooted


def _require_real_rooted(q: LatticeLaw, tol: float) -> None:
    res = univariate_stable(q.pgf, tol)
    if isinstance(res, StabilityRefutation):
        raise HypothesisError(f"input pgf is not real-rooted ({res.reason} root {res.root:.6g})")


def half_pmf(q: LatticeLaw) -> list[Fraction]:
    """a_k = P(2k+1)/2 + P(2k) + P(2k-1)/2."""
    top = (q.degree + 1) // 2        # ceil(N/2)
    P = [Fraction(0)] + list(q.pmf) + [Fraction(0)] * 2   # P[i + 1] = P(X = i)
    return [P[2 * k + 2] / 2 + P[2 * k + 1] + P[2 * k] / 2 for k in range(top + 1)]


def half_divide(q: LatticeLaw, tol: float = DEFAULT_TOL) -> DivisionResult:
    """Z = floor(X/2) or ceil(X/2) by a fair coin."""
    _require_real_rooted(q, tol)
    law = LatticeLaw(half_pmf(q))
    g = Polynomial([Fraction(1, 2), 1, Fraction(1, 2)]) * q.pgf
    g1 = decompose(g, 2).parts[1]
    if g1 != law.pgf:
        raise ConclusionFailure(f"coin formula and odd part of (1+z)^2 f/2 disagree for {q.pgf!r}")
    return DivisionResult(law, law.pgf, real_root_report(law.pgf, tol))


def _floor_pmf(q: LatticeLaw, num: int, den: int) -> list[Fraction]:
    out = [Fraction(0)] * ((q.degree * num) // den + 1)
    for x, p in enumerate(q.pmf):
        out[(x * num) // den] += p
    return out


def floor_divide(q: LatticeLaw, k: int, tol: float = DEFAULT_TOL) -> DivisionResult:
    """Law of floor(X/k), checked against h = g_0 + ... + g_{k-1}."""
    if k < 2:
        raise StructuralError("k must be >= 2")
    _require_real_rooted(q, tol)
    law = LatticeLaw(_floor_pmf(q, 1, k))
    if q.degree >= 1:
        h = Polynomial()
        for g in decompose(q.pgf, k).parts:
            h = h + g
        if h != law.pgf:
            raise ConclusionFailure(f"sum of parts disagrees with block sums for {q.pgf!r}")
    return DivisionResult(law, law.pgf, real_root_report(law.pgf, tol))


def floor_scale_probe(q: LatticeLaw, a, tol: float = DEFAULT_TOL) -> DivisionResult:
    """Law of floor(aX) for rational 0 < a < 1, with no stability promise."""
    a = Fraction(a)
    if not 0 < a < 1:
        raise StructuralError("the ratio must lie strictly between 0 and 1")
    law = LatticeLaw(_floor_pmf(q, a.numerator, a.denominator))
    return DivisionResult(law, law.pgf, real_root_report(law.pgf, tol), exploratory=True)


def coupling_gap(q: LatticeLaw, k: int) -> tuple[Fraction, Fraction]:
    """min and max of X/k - floor(X/k) over the support of X."""
    gaps = [Fraction(x, k) - x // k for x, p in enumerate(q.pmf) if p]
    return min(gaps), max(gaps)


def expected_root_count(n: int, k: int) -> int:
    """Total number of roots of the parts g_i for a degree-n source."""
    return sum(max(0, (n - i) // k) for i in range(k) if i <= n)
