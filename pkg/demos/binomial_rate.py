"""Kolmogorov distance of fair-coin binomials against the normal law.

The fitted slope against sigma should sit near -1.  Writes
binomial_rate.svg next to the working directory.

Run: python demos/binomial_rate.py
"""
# %%
from stablepgf import kolmogorov_distance, rate_study
from stablepgf.clt import binomial_law
from stablepgf.plot import rate_trace_svg, write_svg

ns = [16, 64, 256, 1024, 4096]
laws = [binomial_law(n) for n in ns]

# %%
for n, q in zip(ns, laws):
    d, x = kolmogorov_distance(q, with_location=True)
    print(f"n={n:5d}  sigma={q.sigma:8.3f}  distance={d:.6f}  at x={x:+.4f}")

# %%
study = rate_study(laws, [q.sigma for q in laws])
print(f"slope vs sigma: {study.exponent:.4f}")
print("distance * sigma / N^(1/3):", [round(r, 5) for r in study.ratios])
write_svg("binomial_rate.svg", rate_trace_svg(study))
