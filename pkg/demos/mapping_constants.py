"""
Estimating mean nonexpansive constants by sampling
==================================================

A map T qualifies with constants (a, b) when
d(Tx, Ty) <= a d(x, y) + b d(x, Ty) on every sampled pair.
"""

from mvmann import mappings as mp
from mvmann.mappings import MeanNonexpConstants, estimate_min_constants, verify_mean_nonexpansive

# smallest grid point (by a+b, then b) that survives 1000 sampled pairs
for name in ("halving", "affine", "disk_rotation", "tripod_retraction", "reflection", "identity"):
    m = mp.make_mapping(name)
    c = estimate_min_constants(m, grid_step=0.05, n_samples=1000, seed=0)
    print(f"{name:<18} a={c.a:.2f} b={c.b:.2f}")

# x -> 2x fails everywhere on the simplex; the report hands back a pair
# that breaks the inequality.
m = mp.doubling()
print("doubling:", estimate_min_constants(m, 0.05, 1000, seed=0))
rep = verify_mean_nonexpansive(m, MeanNonexpConstants(0.5, 0.5), 1000, seed=0)
x, y = rep.witness
print("witness", x.coords, y.coords, "margin", rep.worst_margin)
