"""A bivariate family whose limit covariance is singular.

((z1 + z2) / 2)^n puts all n points in one of two cells, so X1 + X2 = n is
constant.  The projection battery flags (1, 1) as degenerate while other
directions still look Gaussian.

Run: python demos/singular_covariance.py
"""
# %%
import math
from fractions import Fraction as F

import numpy as np

from stablepgf import cramer_wold_battery, make_pgf, mean_cov, partition
from stablepgf.corpus import power_family

rank_one = make_pgf(2, [((1, 0), F(1, 2)), ((0, 1), F(1, 2))])
A = [[F(1, 4), F(-1, 4)], [F(-1, 4), F(1, 4)]]

# %%
n = 64
(f,) = power_family(rank_one, [n])
print("covariance / n:\n", mean_cov(f).covariance / n)
part = partition(np.array(A, dtype=float))
print("nonsingular indices:", part.T, " singular blocks:", part.S_list)

# %%
for rep in cramer_wold_battery(f, A, scale=math.sqrt(n), max_den=3, with_delta=False):
    tag = "degenerate" if rep.degenerate else f"K={rep.kolmogorov:.4f}"
    print(f"a={rep.direction}  V={rep.V_limit:.4f}  var/(|a|^2 n)={rep.normalized_variance:.4f}  {tag}")
