"""Occupancy counts of a finite DPP are stable and negatively correlated.

Run: python demos/dpp_stability.py
"""
# %%
import numpy as np

from stablepgf import DPPKernel, dpp_pgf, mean_cov, test_stability
from stablepgf.corpus import random_blocks, random_kernel

rng = np.random.default_rng(7)
K = random_kernel(rng, 6)
print("kernel spectrum:", np.round(np.linalg.eigvalsh(K), 4))

# %%
blocks = random_blocks(rng, 6, 3)
f = dpp_pgf(DPPKernel(K, blocks))
print("blocks:", blocks, " support size:", len(f.support))

# %%
verdict = test_stability(f, 200, seed=0)
print("verdict:", verdict.status, "after", verdict.trials, "lines")
print("covariance:\n", np.round(mean_cov(f).covariance, 5))
