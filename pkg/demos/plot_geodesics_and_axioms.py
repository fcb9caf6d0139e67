"""
Geodesics and the convexity axioms in three model spaces
=========================================================

"""

import numpy as np
from mvmann import Euclidean, PoincareDisk, TripodTree, verify_axioms

# In the disk, the halfway point between two points off a diameter is not
# their Euclidean average. It sits on an arc that meets the unit circle at
# right angles.
disk = PoincareDisk()
p, q = disk.point((0.3, 0.6)), disk.point((-0.7, 0.1))
m = disk.combine(p, q, 0.5)
print("hyperbolic midpoint ", np.round(m.coords, 4))
print("euclidean average   ", np.round((np.array(p.coords) + np.array(q.coords)) / 2, 4))
print("d(p,m), d(m,q)      ", disk.distance(p, m), disk.distance(m, q))

# On the tripod, the geodesic between two legs runs through the origin.
tripod = TripodTree()
a, b = tripod.point((0, 1.0)), tripod.point((2, 3.0))
for lam in (0.0, 0.125, 0.25, 0.5, 1.0):
    print(f"lam={lam:<5}", tripod.combine(a, b, lam).coords)

# Sample the four axioms plus symmetry and the triangle inequality.
# Each number is the largest violation seen, so anything <= 0 is exact.
for space in (Euclidean(3), disk, tripod):
    rep = verify_axioms(space, n_samples=1000, seed=0)
    worst = {k: f"{v:+.1e}" for k, v in rep.worst.items()}
    print(space.id, "ok" if rep.all_passed else "FAILED", worst)
