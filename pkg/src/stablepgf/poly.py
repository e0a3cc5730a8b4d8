"""Exact univariate polynomials, certified roots, NR certificates, interlacing."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import flint

from . import _aberth
from .errors import RootFindingError, StructuralError

DEFAULT_TOL = 1e-9
# roots closer than this (relative to 1+|root|) count as a multiple root
SIMPLICITY_THRESHOLD = 1e-6


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, float):
        return Fraction(c)
    return Fraction(c)


@dataclass(frozen=True)
class Polynomial:
    """Dense polynomial with exact rational coefficients, lowest degree first.

    Trailing zero coefficients are stripped, so ``degree == len(coeffs) - 1``
    for every nonzero polynomial; the zero polynomial has ``coeffs == ()``
    and degree -1.
    """

    coeffs: tuple[Fraction, ...]

    def __init__(self, coeffs: Iterable = ()):
        cs = [_as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def from_roots(cls, roots: Iterable, lead=1) -> "Polynomial":
        p = cls([lead])
        for r in roots:
            p = p * cls([-_as_fraction(r), 1])
        return p

    @classmethod
    def monomial(cls, k: int, c=1) -> "Polynomial":
        return cls([0] * k + [c])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(self[k] + other[k] for k in range(n))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(self[k] - other[k] for k in range(n))

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = _as_fraction(other)
            return Polynomial(a * c for a in self.coeffs)
        return multiply(self, other)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Polynomial":
        out, base = Polynomial([1]), self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def derivative(self) -> "Polynomial":
        return Polynomial(k * c for k, c in enumerate(self.coeffs) if k)

    def compose_power(self, k: int) -> "Polynomial":
        """p(x^k)."""
        out = [Fraction(0)] * (k * self.degree + 1) if self.coeffs else []
        for j, c in enumerate(self.coeffs):
            out[k * j] = c
        return Polynomial(out)

    def total(self) -> Fraction:
        """p(1), the total mass when p is a pgf."""
        return sum(self.coeffs, Fraction(0))

    def __repr__(self) -> str:
        if not self.coeffs:
            return "Polynomial(0)"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if k == 0 else ("z" if k == 1 else f"z^{k}")
            terms.append(f"{c}{'*' if mono else ''}{mono}")
        return "Polynomial(" + " + ".join(terms) + ")"


def multiply(p: Polynomial, q: Polynomial) -> Polynomial:
    """Exact product by coefficient convolution."""
    if p.is_zero() or q.is_zero():
        return Polynomial()
    a, b = p.coeffs, q.coeffs
    # common denominators turn the convolution into integer work
    da = math.lcm(*(c.denominator for c in a))
    db = math.lcm(*(c.denominator for c in b))
    ia = [int(c * da) for c in a]
    ib = [int(c * db) for c in b]
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(ia):
        if x:
            for j, y in enumerate(ib):
                out[i + j] += x * y
    den = da * db
    return Polynomial(Fraction(c, den) for c in out)


@dataclass(frozen=True)
class RootSet:
    """Roots grouped into clusters, each with a certified error radius.

    ``roots[i]`` stands for ``multiplicities[i]`` roots of the polynomial, all
    within ``errors[i]`` of it.  ``real[i]`` is True when the cluster is a
    single root proven to be real (its value then has zero imaginary part).
    """

    roots: tuple[complex, ...]
    multiplicities: tuple[int, ...]
    errors: tuple[float, ...]
    real: tuple[bool, ...]

    @property
    def certified_error(self) -> float:
        return max(self.errors, default=0.0)

    @property
    def degree(self) -> int:
        return sum(self.multiplicities)

    def expanded(self) -> list[complex]:
        out = []
        for r, m in zip(self.roots, self.multiplicities):
            out.extend([r] * m)
        return out


@dataclass(frozen=True)
class NRCertificate:
    """Roots of a polynomial in NR: simple, real, strictly negative."""

    sorted_roots: tuple[float, ...]   # strictly decreasing
    errors: tuple[float, ...] = ()
    min_gap: float = math.inf


@dataclass(frozen=True)
class NRRefutation:
    reason: str          # "nonreal", "nonnegative" or "multiple"
    root: complex
    detail: str = ""

    def __bool__(self) -> bool:
        return False


def roots(p: Polynomial, tol: float = DEFAULT_TOL) -> RootSet:
    """All complex roots of ``p``, each certified to ``tol * max(1, |root|)``.

    Raises :class:`RootFindingError` when the iteration/precision budget is
    exhausted, e.g. for clusters of very high multiplicity.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if p.is_zero():
        raise StructuralError("the zero polynomial has no finite root set")
    if p.degree < 1:
        raise StructuralError(f"roots() needs degree >= 1, got constant {p}")
    return _roots_cached(p, tol)


@lru_cache(maxsize=4096)
def _roots_cached(p: Polynomial, tol: float) -> RootSet:
    cs = list(p.coeffs)
    zeros = 0
    while cs[zeros] == 0:
        zeros += 1
    cs = cs[zeros:]
    found: list[tuple[complex, int, float, bool]] = []
    if zeros:
        found.append((0j, zeros, 0.0, zeros == 1))
    name = repr(p) if p.degree <= 8 else f"polynomial of degree {p.degree}"
    # coincident iterates cannot separate a repeated root, so split it off exactly
    for factor, mult in _squarefree_parts(cs):
        if len(factor) == 2:
            r = -factor[0] / factor[1]
            x = float(r)
            found.append((complex(x, 0.0), mult, abs(float(r - Fraction(x))), mult == 1))
        elif len(factor) > 2:
            found.extend((z, m * mult, e, real and mult == 1)
                         for z, m, e, real in _aberth.solve(factor, tol, name=name))
    found.sort(key=lambda t: (-t[0].real, t[0].imag))
    return RootSet(
        roots=tuple(t[0] for t in found),
        multiplicities=tuple(t[1] for t in found),
        errors=tuple(t[2] for t in found),
        real=tuple(t[3] for t in found),
    )


_SQF_PRIME = 2**61 - 1


def _squarefree_parts(cs: list[Fraction]) -> list[tuple[list[Fraction], int]]:
    """Squarefree decomposition over Q: pairs (ascending coefficients, multiplicity)."""
    if len(cs) <= 2:
        return [(cs, 1)]
    den = math.lcm(*(c.denominator for c in cs))
    ints = [c.numerator * (den // c.denominator) for c in cs]
    # squarefree mod a prime not dividing the leading term implies squarefree over Q
    if ints[-1] % _SQF_PRIME:
        g = flint.nmod_poly([c % _SQF_PRIME for c in ints], _SQF_PRIME)
        if g.gcd(g.derivative()).degree() == 0:
            return [(cs, 1)]
    f = flint.fmpz_poly(ints)
    _, parts = f.factor_squarefree()
    return [([Fraction(int(c)) for c in g.coeffs()], m) for g, m in parts]


def is_real_rooted(p: Polynomial, tol: float = DEFAULT_TOL) -> bool:
    if p.degree <= 0:
        return True
    rs = roots(p, tol)
    return all(abs(r.imag) <= tol * max(1.0, abs(r)) for r in rs.roots)


def certify_nr(p: Polynomial, tol: float = DEFAULT_TOL) -> NRCertificate | NRRefutation:
    """Certificate that all roots are simple and strictly negative, or a
    refutation naming an offending root."""
    if p.is_zero():
        raise StructuralError("the zero polynomial is not in NR")
    if p.degree < 1:
        raise StructuralError("certify_nr needs degree >= 1")
    rs = roots(p, tol)
    for r, m, err, real in zip(rs.roots, rs.multiplicities, rs.errors, rs.real):
        if m > 1:
            return NRRefutation("multiple", r, f"cluster of {m} roots within {err:.3g}")
    for r, err, real in zip(rs.roots, rs.errors, rs.real):
        if not real and abs(r.imag) > err:
            return NRRefutation("nonreal", r)
        if not real:
            return NRRefutation("multiple", r, "could not separate from its conjugate")
        if r.real + err >= 0:
            return NRRefutation("nonnegative", r)
    xs = [r.real for r in rs.roots]      # already sorted decreasing
    gaps = [a - b for a, b in zip(xs, xs[1:])]
    for a, b in zip(xs, xs[1:]):
        if a - b <= SIMPLICITY_THRESHOLD * (1 + abs(a)):
            return NRRefutation("multiple", complex(b), f"within {a - b:.3g} of {a}")
    return NRCertificate(tuple(xs), tuple(rs.errors), min(gaps, default=math.inf))


def min_distance_to_one(p: Polynomial, tol: float = DEFAULT_TOL) -> float:
    """Distance from 1 to the nearest root of ``p``."""
    rs = roots(p, tol)
    return min(abs(r - 1) for r in rs.roots)


@dataclass(frozen=True)
class InterlacingResult:
    ok: bool
    merged: tuple[float, ...] = ()
    owner: tuple[int, ...] = ()     # owner[j] = index i of the part holding s_j
    first_violation: int | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_interlacing(root_lists: Sequence[NRCertificate], k: int, n: int,
                      tol: float = DEFAULT_TOL) -> InterlacingResult:
    """Check that merged roots s_0 > s_1 > ... satisfy s_j in part j mod k."""
    if len(root_lists) != k:
        raise StructuralError(f"expected {k} root lists, got {len(root_lists)}")
    tagged = []
    for i, cert in enumerate(root_lists):
        errs = cert.errors or (0.0,) * len(cert.sorted_roots)
        tagged.extend((x, i, e) for x, e in zip(cert.sorted_roots, errs))
    if len(tagged) != n - k + 1:
        raise StructuralError(
            f"interlacing expects n-k+1 = {n - k + 1} roots in total, got {len(tagged)}")
    tagged.sort(key=lambda t: -t[0])
    merged = tuple(t[0] for t in tagged)
    owner = tuple(t[1] for t in tagged)
    for j, (x, i, e) in enumerate(tagged):
        if j + 1 < len(tagged):
            y, _, e2 = tagged[j + 1]
            # order must be strict beyond the certified error radii
            if x - y <= e + e2:
                return InterlacingResult(False, merged, owner, j)
        if i != j % k:
            return InterlacingResult(False, merged, owner, j)
    return InterlacingResult(True, merged, owner)
