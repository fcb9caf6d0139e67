"""
Five schemes on the same map
============================

"""

from mvmann import mappings as mp
from mvmann.iteration import run
from mvmann.schedules import Constant, Geometric, Harmonic, Schedule

# The halving map on [-1, 1] is affine, so every scheme shrinks x by a
# fixed factor per step (gordon's factor drifts toward 1).
H = mp.halving(1)
x0 = H.space.point((1.0,))
sched = Schedule(alpha=Constant(0.5), r=Constant(1.0))
for scheme in ("picard", "mvm", "ishikawa", "mann", "gordon"):
    tr = run(scheme, H, x0, sched, residual_tol=1e-8, max_iters=100_000)
    n = tr.iterations_to_tol
    print(f"{scheme:<9} {'not reached' if n is None else n:>12}  final residual {tr.final.residual:.2e}")

# rn controls where the inner point sits: r=0 applies T twice, large r
# behaves like Mann.
for label, r in (("r=0", Constant(0.0)), ("r=1", Constant(1.0)),
                 ("r=2^n", Geometric(2.0)), ("r=1/(n+1)", Harmonic())):
    tr = run("mvm", H, x0, Schedule(Constant(0.5), r))
    print(f"mvm {label:<10} {tr.iterations_to_tol} steps")

# Reflection x -> -x is nonexpansive. With r=0 the two T applications
# cancel and the iterate never moves.
R = mp.reflection()
tr = run("mvm", R, R.space.point((0.8,)), Schedule(Constant(0.5), Constant(0.0)), max_iters=1000)
print("reflection, r=0:", tr.stop_reason, "residual", tr.final.residual)
