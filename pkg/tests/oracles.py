"""Independent reference computations.

Each oracle takes a different route from the library code it checks:
sympy for exact polynomial algebra, mpmath for high-precision roots and the
normal CDF, a signed-determinant formula for DPP configuration
probabilities, and finite differences for moments.  Tests freeze values
produced here; test_oracles.py re-derives the frozen values.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import mpmath
import numpy as np
import sympy

mpmath.mp.dps = 40
_x = sympy.Symbol("x")


def to_fraction(c) -> Fraction:
    c = sympy.Rational(c)
    return Fraction(int(c.p), int(c.q))


def sympy_poly(coeffs) -> sympy.Poly:
    """Ascending rational coefficients -> sympy Poly over QQ."""
    return sympy.Poly(list(reversed([sympy.Rational(str(Fraction(c))) for c in coeffs])),
                      _x, domain="QQ")


def ascending(p: sympy.Poly) -> list[Fraction]:
    return [to_fraction(c) for c in reversed(p.all_coeffs())]


def poly_product(a, b) -> list[Fraction]:
    return ascending(sympy_poly(a) * sympy_poly(b))


def expand_roots(roots) -> list[Fraction]:
    p = sympy.Poly(1, _x, domain="QQ")
    for r in roots:
        p = p * sympy.Poly(_x - sympy.Rational(str(Fraction(r))), _x, domain="QQ")
    return ascending(p)


def mp_roots(coeffs, dps: int = 60) -> list[complex]:
    """All complex roots at high working precision (mpmath.polyroots)."""
    desc = [mpmath.mpf(Fraction(c).numerator) / Fraction(c).denominator
            for c in reversed(list(coeffs))]
    while desc and desc[0] == 0:
        desc.pop(0)
    with mpmath.workdps(dps):
        rs = mpmath.polyroots(desc, maxsteps=500, extraprec=4 * dps)
    return [complex(r) for r in rs]


def real_roots_exact(coeffs) -> list[float]:
    """Real roots by sympy isolation (exact intervals, then refined)."""
    p = sympy_poly(coeffs)
    return sorted((float(r) for r in sympy.real_roots(p)), reverse=True)


# -- normal law and Kolmogorov distance --------------------------------------------

def phi(x) -> float:
    return float(mpmath.ncdf(x))


def kolmogorov_plateaus(pmf) -> float:
    """sup |F - Phi| by walking the plateaus of the step function F.

    F is constant on [x_k, x_{k+1}); Phi is increasing there, so the
    plateau's worst gap is at one of its two ends.
    """
    pmf = [Fraction(p) for p in pmf]
    m = sum(k * p for k, p in enumerate(pmf))
    var = sum((k - m) ** 2 * p for k, p in enumerate(pmf))
    s = mpmath.sqrt(mpmath.mpf(var.numerator) / var.denominator)
    mm = mpmath.mpf(m.numerator) / m.denominator
    jumps = [(k - mm) / s for k, p in enumerate(pmf) if p]
    masses = [p for p in pmf if p]
    worst = mpmath.ncdf(jumps[0])                  # left tail plateau, F = 0
    level = Fraction(0)
    for i, x in enumerate(jumps):
        level += masses[i]
        F = mpmath.mpf(level.numerator) / level.denominator
        right = mpmath.ncdf(jumps[i + 1]) if i + 1 < len(jumps) else mpmath.mpf(1)
        worst = max(worst, abs(F - mpmath.ncdf(x)), abs(F - right))
    return float(worst)


def binomial_pmf(n: int, p=Fraction(1, 2)) -> list[Fraction]:
    p = Fraction(p)
    return [math.comb(n, k) * p**k * (1 - p) ** (n - k) for k in range(n + 1)]


def binomial_kolmogorov(n: int) -> float:
    """Fair-coin binomial distance, CDF from scipy-free exact sums."""
    return kolmogorov_plateaus(binomial_pmf(n))


# -- DPP ---------------------------------------------------------------------------

def dpp_configuration_probability(K, S) -> float:
    """P(Y = S) = |det(K - I_{complement of S})|.

    This is the closed form, not an inclusion-exclusion sum.
    """
    K = np.asarray(K, dtype=complex)
    m = K.shape[0]
    D = np.ones(m)
    D[list(S)] = 0.0
    return float(abs(np.linalg.det(K - np.diag(D))))


def dpp_block_law(K, blocks) -> dict[tuple, float]:
    m = np.asarray(K).shape[0]
    out: dict[tuple, float] = {}
    for bits in itertools.product((0, 1), repeat=m):
        S = [i for i in range(m) if bits[i]]
        key = tuple(sum(bits[i] for i in b) for b in blocks)
        out[key] = out.get(key, 0.0) + dpp_configuration_probability(K, S)
    return {k: v for k, v in out.items() if v > 1e-15}


# -- moments by finite differences --------------------------------------------------

def evaluate_pgf(terms: dict[tuple, Fraction], z) -> float:
    return sum(float(p) * math.prod(zj**r for zj, r in zip(z, e)) for e, p in terms.items())


def fd_mean_cov(terms: dict[tuple, Fraction], dim: int, h: float = 1e-4):
    """Mean and covariance from central differences of f around (1,...,1).

    E X_j = d_j f(1); E X_i X_j = d_i d_j f(1) + [i = j] E X_j.
    """
    one = np.ones(dim)

    def f(v):
        return evaluate_pgf(terms, v)

    grad = np.empty(dim)
    for j in range(dim):
        e = np.zeros(dim)
        e[j] = h
        grad[j] = (f(one + e) - f(one - e)) / (2 * h)
    hess = np.empty((dim, dim))
    for i in range(dim):
        for j in range(dim):
            ei = np.zeros(dim)
            ej = np.zeros(dim)
            ei[i] = h
            ej[j] = h
            hess[i, j] = (f(one + ei + ej) - f(one + ei - ej) - f(one - ei + ej)
                          + f(one - ei - ej)) / (4 * h * h)
    second = hess + np.diag(grad)
    return grad, second - np.outer(grad, grad)


# -- enumeration oracles for the division operations --------------------------------

def law_of_function(pmf, fn) -> list[Fraction]:
    """pmf of fn(X) by enumerating the support of X."""
    out: dict[int, Fraction] = {}
    for x, p in enumerate(pmf):
        if p:
            y = fn(x)
            out[y] = out.get(y, Fraction(0)) + Fraction(p)
    top = max(out)
    return [out.get(k, Fraction(0)) for k in range(top + 1)]


def coin_halving(pmf) -> list[Fraction]:
    """Z = floor(X/2) or ceil(X/2) with a fair coin, by enumeration."""
    out: dict[int, Fraction] = {}
    for x, p in enumerate(pmf):
        for z in (x // 2, -(-x // 2)):
            out[z] = out.get(z, Fraction(0)) + Fraction(p) / 2
    top = max(out)
    return [out.get(k, Fraction(0)) for k in range(top + 1)]
