"""Aberth-Ehrlich simultaneous root iteration with a posteriori inclusion disks.

The iterates always live in complex128.  What changes between stages is how
the Newton ratio p'/p is evaluated: first in double precision, then (only
for points that cannot be certified from double evaluations) in flint ball
arithmetic at increasing precisions.  Because the coefficients are exact
rationals this lets badly conditioned inputs, e.g. degree 60 with real roots spread over
(-100, 0), be certified without changing the float representation of the
answer.

Certification uses the Weierstrass/Gerschgorin inclusion theorem: with
distinct approximations z_1..z_n and W_i = p(z_i) / (a_n prod_{j!=i}(z_i - z_j)),
the union of the disks |z - z_i| <= n |W_i| contains every root, and each
connected component made of m disks contains exactly m roots.
"""

from __future__ import annotations

import math
from fractions import Fraction

import threading

import flint
import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import RootFindingError

U = 2.0**-53
_POWER_TABLE_LIMIT = 1 << 16
_LN2 = math.log(2.0)
# flint keeps its working precision in a process-wide context
_FLINT_LOCK = threading.Lock()
_CHUNK = 512
# one mp sweep costs about (active points) x n ball operations; past this
# budget it would take minutes, so we stop and report instead
MP_WORK_LIMIT = 2_000_000


def _log2_abs(q: Fraction) -> float:
    return math.log2(abs(q.numerator)) - math.log2(q.denominator)


def newton_polygon_start(log_moduli: list[float], n: int) -> np.ndarray:
    """Starting points on circles whose radii come from the upper convex hull
    of (k, log2|a_k|).  ``log_moduli[k]`` is -inf for zero coefficients."""
    pts = [(k, lg) for k, lg in enumerate(log_moduli) if lg != -math.inf]
    hull: list[tuple[int, float]] = []
    for pt in pts:
        while len(hull) >= 2:
            (k1, l1), (k2, l2) = hull[-2], hull[-1]
            # drop hull[-1] if it lies on or below the chord hull[-2] -> pt
            if (l2 - l1) * (pt[0] - k1) <= (pt[1] - l1) * (k2 - k1):
                hull.pop()
            else:
                break
        hull.append(pt)
    z = np.empty(n, dtype=complex)
    pos = 0
    for i in range(len(hull) - 1):
        (k1, l1), (k2, l2) = hull[i], hull[i + 1]
        m = k2 - k1
        log_r = (l1 - l2) / m
        if abs(log_r) > 1000:
            raise RootFindingError("root moduli outside double range")
        r = 2.0**log_r
        theta = 2 * np.pi * np.arange(m) / m + 2 * np.pi * i / n + 0.4
        z[pos:pos + m] = r * np.exp(1j * theta)
        pos += m
    return z


class AberthSolver:
    """Holds one polynomial (exact coefficients, a_0 != 0 != a_n, n >= 2)."""

    def __init__(self, coeffs: list[Fraction], name: str = "polynomial"):
        self.n = len(coeffs) - 1
        self.name = name
        self.log_moduli = [(_log2_abs(c) if c else -math.inf) for c in coeffs]
        finite = [lg for lg in self.log_moduli if lg != -math.inf]
        shift = math.floor(max(finite))
        # exact rescaling by a power of two keeps every stage consistent
        # unreduced (numerator, denominator) pairs: reducing huge Fractions costs gcds
        if shift >= 0:
            self.scaled = [(c.numerator, c.denominator << shift) for c in coeffs]
        else:
            self.scaled = [(c.numerator << -shift, c.denominator) for c in coeffs]
        self.float_ok = max(finite) - min(finite) < 900
        if self.float_ok:
            self.b = np.array([num / den for num, den in self.scaled])
            self.absb = np.abs(self.b)
            self.db = self.b[1:] * np.arange(1, self.n + 1)
        num, den = self.scaled[-1]
        self.log2_lead = math.log2(abs(num)) - math.log2(den)
        self._mp_cache: dict[int, tuple] = {}

    # -- evaluation -------------------------------------------------------
    def eval_float(self, z: np.ndarray, tight: bool = True):
        """Return (p'/p, log2 upper bound on |p|, noisy, exact_zero).

        With ``tight`` forward Horner carries a running rounding-error bound
        (otherwise the cheaper a priori (6n+6)u S(|z|) is used); each step adds
        sqrt(5)u|t| for the complex product t and u|p| for the sum, plus u S(|z|)
        for rounding the exact coefficients to doubles.  Where z^n would
        overflow we evaluate the reversed polynomial at w = 1/z instead and add
        a bound for the error in w.
        """
        n, b, absb = self.n, self.b, self.absb
        ratio = np.empty_like(z)
        logp = np.empty(z.shape)
        noisy = np.empty(z.shape, dtype=bool)
        az = np.abs(z)
        with np.errstate(all="ignore"):
            forward = (az <= 1.0) | (n * np.log2(az) < 900)
            if forward.any():
                zs, azs = z[forward], az[forward]
                p = np.full(zs.shape, b[n], dtype=complex)
                d = np.zeros(zs.shape, dtype=complex)
                s = np.full(zs.shape, absb[n])
                e = np.zeros(zs.shape)
                for k in range(n - 1, -1, -1):
                    d = d * zs + p
                    t = p * zs
                    p = t + b[k]
                    s = s * azs + absb[k]
                    if tight:
                        e = e * azs + 2.25 * np.abs(t) + 1.01 * np.abs(p)
                if tight:
                    err = U * (e + s) * (1 + 8 * (n + 2) * U)
                else:
                    err = (6 * n + 6) * U * s
                ap = np.abs(p)
                ratio[forward] = d / p
                logp[forward] = np.log2(ap + err)
                noisy[forward] = ap <= err
            rev = ~forward
            if rev.any():
                zb = z[rev]
                w = 1.0 / zb
                aw = np.abs(w)
                q = np.full(zb.shape, b[0], dtype=complex)
                dq = np.zeros(zb.shape, dtype=complex)
                s = np.full(zb.shape, absb[0])
                e = np.zeros(zb.shape)
                for k in range(1, n + 1):
                    dq = dq * w + q
                    t = q * w
                    q = t + b[k]
                    s = s * aw + absb[k]
                    if tight:
                        e = e * aw + 2.25 * np.abs(t) + 1.01 * np.abs(q)
                # w itself carries a relative error of a few u
                if tight:
                    err = U * (e + (4 * n + 2) * s) * (1 + 8 * (n + 2) * U)
                else:
                    err = (10 * n + 6) * U * s
                aq = np.abs(q)
                ratio[rev] = (n - w * dq / q) / zb
                logp[rev] = n * np.log2(az[rev]) + np.log2(aq + err)
                noisy[rev] = aq <= err
        zero = ~np.isfinite(ratio)
        return ratio, logp, noisy, zero

    def sweep_ratio(self, z: np.ndarray):
        """p'/p with a loose noise flag, for iteration only (never for bounds).

        Small problems use a power table and two matrix-vector products,
        which is much cheaper than a Horner loop over tiny arrays.
        """
        n = self.n
        if z.size * n > _POWER_TABLE_LIMIT:
            ratio, _, noisy, zero = self.eval_float(z, tight=False)
            return ratio, noisy, zero
        az = np.abs(z)
        with np.errstate(all="ignore"):
            forward = (az <= 1.0) | (n * np.log2(az) < 900)
        if not forward.all():
            ratio, _, noisy, zero = self.eval_float(z, tight=False)
            return ratio, noisy, zero
        W = np.empty((z.size, n + 1), dtype=complex)
        W[:, 0] = 1.0
        W[:, 1:] = z[:, None]
        np.cumprod(W, axis=1, out=W)
        with np.errstate(all="ignore"):
            p = W @ self.b
            d = W[:, :-1] @ self.db
            s = np.abs(W) @ self.absb
            ratio = d / p
        noisy = np.abs(p) <= (8 * n + 8) * U * s
        return ratio, noisy, ~np.isfinite(ratio)

    def _mp_polys(self, bits: int):
        # caller holds _FLINT_LOCK with ctx.prec == bits
        if bits not in self._mp_cache:
            P = flint.acb_poly(flint.fmpq_poly(
                [flint.fmpq(num, den) for num, den in self.scaled]))
            self._mp_cache[bits] = (P, P.derivative())
        return self._mp_cache[bits]

    def wrap_bits(self, z: np.ndarray) -> np.ndarray:
        """Extra precision lost to rectangular complex balls.

        Multiplying an acb ball by x = a + bi grows its radius by about
        |a| + |b| rather than |x|, so a degree-n evaluation loses roughly
        n log2((|a| + |b|) / |x|) bits (up to n/2 on the diagonals).
        """
        az = np.maximum(np.abs(z), 1e-300)
        with np.errstate(all="ignore"):
            loss = self.n * np.log2((np.abs(z.real) + np.abs(z.imag)) / az)
        loss = np.where(np.isfinite(loss), np.maximum(loss, 0.0), 0.0)
        return (64 * np.ceil((loss + 32) / 64)).astype(int)

    def eval_mp(self, z: np.ndarray, bits: int, with_ratio: bool = True,
                with_bound: bool = True):
        """Ball-arithmetic evaluation at ``bits`` of working precision
        (plus whatever each point needs to undo the wrapping effect)."""
        m = z.size
        ratio = np.zeros(m, dtype=complex)
        logp = np.full(m, np.nan)
        noisy = np.zeros(m, dtype=bool)
        zero = np.zeros(m, dtype=bool)
        extra = self.wrap_bits(z)
        with _FLINT_LOCK:
            saved = flint.ctx.prec
            try:
                for e in np.unique(extra):
                    prec = bits + int(e)
                    flint.ctx.prec = prec
                    P, D = self._mp_polys(prec)
                    # per-point calls: vector evaluation uses a product tree
                    # whose balls are far wider
                    for i in np.flatnonzero(extra == e):
                        x = flint.acb(z[i].real, z[i].imag)
                        pv = P(x)
                        if with_bound:
                            u = pv.abs_upper()
                            logp[i] = float(u.log()) / _LN2 if u > 0 else -math.inf
                        noisy[i] = pv.contains(0)
                        zero[i] = pv.is_zero()
                        # |p| itself can be far outside double range; p'/p is not
                        if with_ratio and not noisy[i]:
                            ratio[i] = complex((D(x) / pv).mid())
            finally:
                flint.ctx.prec = saved
        return ratio, logp, noisy, zero

    def evaluate(self, z, bits, with_ratio: bool = True):
        return self.eval_float(z) if bits is None else self.eval_mp(z, bits, with_ratio)

    # -- iteration --------------------------------------------------------
    def iterate(self, z: np.ndarray, active: np.ndarray, bits, max_iter: int,
                tol: float | None = None):
        """Run Aberth sweeps on ``active``; return (z, suggested_bits).

        With ``tol`` given and ``bits`` set, the condition estimate is
        refreshed every few sweeps and the sweep loop exits early with a
        larger precision suggestion once the current one is clearly too low.
        """
        z = z.copy()
        for sweep in range(max_iter):
            if active.size == 0:
                break
            if tol is not None and bits is not None and sweep and sweep % 4 == 0:
                want = self.estimate_bits(z, tol)
                if want > bits:
                    return z, want
            if bits is None:
                ratio, noisy, zero = self.sweep_ratio(z[active])
            else:
                ratio, _, noisy, zero = self.eval_mp(z[active], bits, with_bound=False)
            corr = _pair_sums(z, active)
            with np.errstate(all="ignore"):
                step = 1.0 / (ratio - corr)
            step[zero | noisy] = 0
            bad = ~np.isfinite(step)
            step[bad] = 0
            z[active] -= step
            done = zero | noisy | (np.abs(step) <= 4 * U * np.abs(z[active]))
            active = active[~done]
        if not np.all(np.isfinite(z)):
            raise RootFindingError(f"Aberth iteration diverged for {self.name}")
        return z, None

    def estimate_bits(self, z: np.ndarray, tol: float) -> int:
        """Working precision suggested by a condition estimate at the iterates.

        Uses S(|z|) / (|z| |p'(z)|) with |p'(z)| approximated by
        |a_n| prod_j |z - z_j|, which needs no accurate evaluation.
        """
        lg = np.array(self.log_moduli)
        keep = np.isfinite(lg)
        k = np.nonzero(keep)[0]
        with np.errstate(divide="ignore"):
            logz = np.log2(np.maximum(np.abs(z), 1e-300))
        terms = lg[keep][None, :] + k[None, :] * logz[:, None]
        top = terms.max(axis=1)
        log_s = top + np.log2(np.exp2(terms - top[:, None]).sum(axis=1))
        # coincident float iterates would make the estimate infinite
        log_dp = (self.log_moduli[-1]) + _log_row_products(z, rel_floor=U)
        cond = log_s - logz - log_dp + math.log2(self.n)
        need = float(np.max(cond)) + math.log2(1 / tol) + 24
        return int(max(128, 64 * math.ceil(need / 64)))

    def radii(self, z: np.ndarray, logp: np.ndarray) -> np.ndarray:
        """Inclusion radii n |p(z_i)| / (|a_n| prod_j |z_i - z_j|) from log2 bounds on |p|."""
        logrow = _log_row_products(z)
        with np.errstate(all="ignore"):
            logr = math.log2(self.n) + logp - self.log2_lead - logrow
            r = np.exp2(logr) * (1 + 1e-8)
        r[np.isnan(r)] = np.inf
        return r

    def log_bounds(self, z: np.ndarray, levels: np.ndarray) -> np.ndarray:
        """log2 |p| bounds, each point evaluated at its own precision (0 = double)."""
        out = np.empty(z.size)
        for lev in np.unique(levels):
            sel = levels == lev
            out[sel] = self.evaluate(z[sel], int(lev) or None)[1]
        return out


def _pair_sums(z: np.ndarray, rows: np.ndarray) -> np.ndarray:
    out = np.empty(rows.size, dtype=complex)
    for s in range(0, rows.size, _CHUNK):
        idx = rows[s:s + _CHUNK]
        diff = z[idx, None] - z[None, :]
        diff[np.arange(idx.size), idx] = np.inf
        with np.errstate(divide="ignore"):
            out[s:s + _CHUNK] = (1.0 / diff).sum(axis=1)
    return out


def _log_row_products(z: np.ndarray, rel_floor: float = 0.0) -> np.ndarray:
    """log2 prod_{j != i} |z_i - z_j|; distances below rel_floor |z_i| are raised to it."""
    n = z.size
    out = np.empty(n)
    for s in range(0, n, _CHUNK):
        idx = np.arange(s, min(n, s + _CHUNK))
        diff = np.abs(z[idx, None] - z[None, :])
        if rel_floor:
            diff = np.maximum(diff, rel_floor * np.abs(z[idx, None]))
        diff[np.arange(idx.size), idx] = 1.0
        with np.errstate(divide="ignore"):
            out[idx] = np.log2(diff).sum(axis=1)
    return out


def components(z: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Label connected components of the overlap graph of disks D(z_i, r_i)."""
    n = z.size
    if n <= _CHUNK:
        touch = np.abs(z[:, None] - z[None, :]) <= (r[:, None] + r[None, :])
        if np.count_nonzero(touch) == n:       # only the diagonal: all isolated
            return np.arange(n)
    rows, cols = [], []
    for s in range(0, n, _CHUNK):
        idx = np.arange(s, min(n, s + _CHUNK))
        touch = np.abs(z[idx, None] - z[None, :]) <= (r[idx, None] + r[None, :])
        i, j = np.nonzero(touch)
        rows.append(idx[i])
        cols.append(j)
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    graph = coo_matrix((np.ones(rows.size), (rows, cols)), shape=(n, n))
    _, labels = connected_components(graph, directed=False)
    return labels


def summarize(z: np.ndarray, r: np.ndarray):
    """Collapse disks into (center, multiplicity, error bound) per component."""
    labels = components(z, r)
    out = []
    for lab in np.unique(labels):
        members = np.nonzero(labels == lab)[0]
        if members.size == 1:
            i = members[0]
            out.append((complex(z[i]), 1, float(r[i]), members))
        else:
            c = complex(z[members].mean())
            err = float(np.max(np.abs(z[members] - c) + r[members]))
            out.append((c, int(members.size), err, members))
    return out


def _acceptable(summary, tol: float) -> bool:
    return all(err <= tol * max(1.0, abs(c)) for c, _, err, _ in summary)


def solve(coeffs: list[Fraction], tol: float, max_bits: int = 4096, name: str = "polynomial"):
    """Certified roots of a polynomial with exact coefficients.

    ``coeffs`` must have nonzero constant and leading terms and degree >= 2.
    Returns a list of (root, multiplicity, error, certified_real).
    """
    solver = AberthSolver(coeffs, name)
    n = solver.n
    z = newton_polygon_start(solver.log_moduli, n)
    if not solver.float_ok and n * n > MP_WORK_LIMIT:
        raise RootFindingError(
            f"{name}: degree {n} with coefficient range beyond double precision "
            "is too large for multiprecision refinement")

    summary = None
    active = np.arange(n)
    bits = None
    levels = np.zeros(n, dtype=int)        # precision each point was last evaluated at
    logp = np.full(n, np.inf)
    while True:
        max_iter = 100 + n // 4 if bits is None else 60
        if bits is not None or solver.float_ok:
            z, want = solver.iterate(z, active, bits, max_iter, tol)
            if want is not None:
                # the estimate grows as iterates sharpen; stepping geometrically
                # avoids stalling through several intermediate precisions
                bits = max(want, 2 * bits)
                if bits > max_bits:
                    break
                continue
            # only active points moved; the others keep their bounds
            levels[active] = bits or 0
            logp[active] = solver.evaluate(z[active], bits, with_ratio=False)[1]
            r = solver.radii(z, logp)
            summary = summarize(z, r)
            if _acceptable(summary, tol):
                break
            active = np.concatenate(
                [m for c, _, e, m in summary if e > tol * max(1.0, abs(c))])
        if active.size * n > MP_WORK_LIMIT:
            break
        if bits is None:
            bits = min(solver.estimate_bits(z, tol), max_bits)
        else:
            bits = max(bits * 2, solver.estimate_bits(z, tol))
        if bits > max_bits:
            break
    if summary is None or not _acceptable(summary, tol):
        if summary is None:
            raise RootFindingError(f"{name}: no certified approximation")
        worst = max(summary, key=lambda t: t[2] / max(1.0, abs(t[0])))
        raise RootFindingError(
            f"{name}: could not certify roots to tol={tol:g}; worst cluster near "
            f"{worst[0]:.6g} (multiplicity {worst[1]}) has error bound {worst[2]:.3g}")

    return _certify_real(solver, z, r, logp, levels, summary, tol)


def _certify_real(solver, z, r, logp, levels, summary, tol):
    """Snap isolated near-real disks onto the axis and pair conjugates.

    A disk centred on the real axis that contains exactly one root must
    contain a real root, because the conjugate of that root is also a root
    lying in the same disk.
    """
    z2 = z.copy()
    snapped = np.zeros(z.size, dtype=bool)
    upper, lower = [], []
    for c, m, err, members in summary:
        if m != 1:
            continue
        i = members[0]
        if abs(z[i].imag) <= r[i]:
            z2[i] = z[i].real
            snapped[i] = True
        elif z[i].imag > 0:
            upper.append(i)
        else:
            lower.append(i)
    if upper and lower:
        up, lo = np.array(upper), np.array(lower)
        dist = np.abs(z[lo][None, :] - np.conj(z[up])[:, None])
        best = lo[np.argmin(dist, axis=1)]
        unique = np.bincount(best, minlength=z.size)[best] == 1
        for i, j, ok in zip(up, best, unique):
            if ok and abs(z[j] - np.conj(z[i])) <= r[i] + r[j]:
                mid = (z[i] + np.conj(z[j])) / 2
                z2[i], z2[j] = mid, np.conj(mid)
    moved = z2 != z
    if moved.any():
        logp2 = logp.copy()
        logp2[moved] = solver.log_bounds(z2[moved], levels[moved])
        r2 = solver.radii(z2, logp2)
        summary2 = summarize(z2, r2)
        if _acceptable(summary2, tol):
            z, r, summary = z2, r2, summary2
        else:
            snapped[:] = False

    result = []
    for c, m, err, members in summary:
        real = m == 1 and bool(snapped[members[0]])
        if m > 1 and abs(c.imag) <= err:
            err += abs(c.imag)
            c = complex(c.real, 0.0)
        result.append((c, m, err, real))
    return result
