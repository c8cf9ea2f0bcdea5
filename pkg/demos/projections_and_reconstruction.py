"""Projections of a segment and recovery of a point from coarse measurements.

A horizontal segment projects to a point in the vertical direction only, so a
sweep over directions flags exactly the two perpendicular angles. A point is
then pinned down from its truncated projections onto two nearby directions,
and from its truncated distances to two nearby centers.
"""

import math

from dyadlab import Direction, DyadicScalar, FractalSpec, project
from dyadlab.experiments import projection_sweep
from dyadlab.geometry import reconstruct_from_distances, reconstruct_from_projections

rep = projection_sweep(FractalSpec("segment"), 72, r_max=14)
print("flagged directions (turns):", rep.summary["flagged_angles"])

x = (0.3141, 0.9512)
r = 20
u, v = Direction(0.1), Direction(0.1 + 2**-6)
region = reconstruct_from_projections(u, v, DyadicScalar.floor(project(x, u), r), DyadicScalar.floor(project(x, v), r))
print(f"projection region: diameter {region.diameter:.3e} <= {region.diameter_bound:.3e}, contains x: {region.contains(x)}")

cu, cv = (0.0, 0.0), (0.01, 0.0)
du = DyadicScalar.floor(math.dist(cu, x), r)
dv = DyadicScalar.floor(math.dist(cv, x), r)
region = reconstruct_from_distances(cu, cv, du, dv, t=8)
print(f"distance regions: {len(region.candidates)} candidates, diameter {region.diameter:.3e}, contains x: {region.contains(x)}")
for cand in region.candidates:
    print("  candidate centred at (%.6f, %.6f)" % cand.center)
