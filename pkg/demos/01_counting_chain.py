# From injected current to a bound on beta^2/2 for the bundled scenarios.
#
# Run:  python demos/01_counting_chain.py

from vipkit.config import BUNDLED, bundled_scenario
from vipkit.sensitivity import compare_scenarios

# absorption length of the anomalous line in copper sets how much of the
# strip's current is "visible" to the detector
for name in BUNDLED:
    s = bundled_scenario(name)
    sens = s.sensitivity()
    print(f"{name:13s} lambda = {s.absorption_length() * 1e4:6.2f} um"
          f"  visible = {s.visible_fraction():.4f}"
          f"  N_new = {sens.n_new:.3e}  N_int = {sens.n_int:.3e}")

# the bound: either invert a given count limit (rs1990 carries one) or use
# the limit expected from background alone
bounds = {name: bundled_scenario(name).bound() for name in BUNDLED}
for name, b in bounds.items():
    print(f"{name:13s} beta^2/2 <= {b:.3e}")

print("improvement rs1990 -> vip-design:", f"{compare_scenarios(bounds['rs1990'], bounds['vip-design']):.0f}x")
