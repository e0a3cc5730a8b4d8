"""Which ways of shrinking a real-rooted count keep it real-rooted?

Run: python demos/division_counterexample.py
"""
# %%
from fractions import Fraction as F

from stablepgf import LatticeLaw, decompose, floor_divide, half_divide, roots, verify_interlace
from stablepgf.corpus import nr_law
from stablepgf.stablearith import floor_scale_probe

q = LatticeLaw(tuple(F(c, 20) for c in (4, 9, 6, 1)))
print("X pmf:", [str(p) for p in q.pmf])
rs = roots(q.pgf)
print("pgf roots:", [(round(z.real, 6), m) for z, m in zip(rs.roots, rs.multiplicities)])

# %% floor(X / k) for integer k stays real-rooted
for k in (2, 3):
    res = floor_divide(q, k)
    print(f"floor(X/{k}):", [str(p) for p in res.law.pmf], "real-rooted:", res.report.real_rooted)

# %% the coin-flip halving also does
res = half_divide(q)
print("half:", [str(p) for p in res.law.pmf], "real-rooted:", res.report.real_rooted)

# %% floor(2X/3) does not: the pgf picks up a complex pair
res = floor_scale_probe(q, F(2, 3))
print("floor(2X/3):", [str(p) for p in res.law.pmf])
for z in res.report.roots:
    print(f"  root {z.real:+.9f} {z.imag:+.9f}i")

# %% the k-section parts behind the integer case, on a law with simple roots
f = nr_law([-1, -2, -3, -4, -5, -6, -7]).pgf
dec = decompose(f, 3)
for i, g in enumerate(dec.parts):
    print(f"g_{i} =", [str(c) for c in g.coeffs])
cert = verify_interlace(f, 3)
print("merged roots:", [round(r, 6) for r in cert.merged], "owners:", cert.owner)
