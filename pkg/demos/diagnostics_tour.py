"""
Diagnostics on a curved-space run
=================================

"""

from mvmann import diagnostics as dg
from mvmann import mappings as mp
from mvmann.iteration import run
from mvmann.schedules import Constant, Geometric, Schedule
from mvmann.svg import log_line_chart

# Rotate-and-shrink in the Poincare disk; the origin is the only fixed point.
m = mp.disk_rotation()
z = m.known_fixed_points[0]
tr = run("mvm", m, m.space.point((0.7, 0.3)), Schedule(Constant(0.3), Geometric(2.0)))
print(tr.stop_reason, "after", tr.final.n, "steps; r saturated:", tr.r_saturated)

fe = dg.fejer_check(tr, z)
print("distance to origin never grows:", fe.passed, f"(largest step change {fe.max_increase:.1e})")

prof = dg.residual_profile(tr)
print("first step below each decade:", prof.first_below)

print(dg.strong_convergence_check(tr, [z], tol=1e-6).to_dict())
# "limit exists" means 100 consecutive distances within 1e-10 of each other.
# A run stopped at residual 1e-8 still moves ~1e-8 per step, so give the
# check a longer run.
longer = run("mvm", m, tr.points[0], Schedule(Constant(0.3), Geometric(2.0)), 1e-300, 400)
print(dg.bounded_limits_check(tr, z, [z]).all_hold, dg.bounded_limits_check(longer, z, [z]).all_hold)

# asymptotic center of the tail over a finite candidate set
c = dg.trace_center(tr, extra=[z])
print("center", c.center_hat.coords, "radius", c.radius_hat)

with open("disk_rotation_conv.svg", "w") as fh:
    ns = [s.n for s in tr.states]
    fh.write(log_line_chart({"residual": (ns, tr.residuals), "dist_to_ref": (ns, tr.dist_to_ref)},
                            "mvm on disk_rotation"))
