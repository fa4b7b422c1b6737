# Upper-limit recipes and a coverage study on the bundled scenarios.
#
# Run:  python demos/04_limits_and_coverage.py

import math

from vipkit.config import BUNDLED, bundled_scenario
from vipkit.limits import coverage_study, gaussian_roi_limit, poisson_upper_limit

# zero observed counts, no background: s_up = -ln(1 - cl)
for cl in (0.68, 0.9, 0.95, 0.99):
    print(f"cl={cl}: {poisson_upper_limit(0, 0.0, cl):.6f}  (-ln(1-cl) = {-math.log(1 - cl):.6f})")

# the two recipes converge once counts are large
for b in (10, 100, 1000):
    print(f"b={b:5d}  poisson={poisson_upper_limit(b, b, 0.9):8.3f}  gaussian={gaussian_roi_limit(0.0, b, 0.9):8.3f}")

# coverage: fraction of synthetic experiments whose bound covers the truth
for name in BUNDLED:
    scen = bundled_scenario(name)
    ref = scen.projected_limit().beta2_half_bound
    covs = [coverage_study(scen, k * ref, 1000, cl=0.9, seed=scen.seed, workers=4) for k in (0, 0.5, 3)]
    print(f"{name:13s} coverage at 0, 0.5x, 3x projected bound:", " ".join(f"{c:.3f}" for c in covs))
