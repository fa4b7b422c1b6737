# Synthesize current-on/current-off spectra, subtract, and look at the ROI.
#
# Run:  python demos/03_on_off_subtraction.py [beta2_half]

import sys

import numpy as np

from vipkit.config import bundled_scenario
from vipkit.limits import analyze_pair
from vipkit.spectrum import synthesize_pair

scen = bundled_scenario("vip-design")
sens = scen.sensitivity()
beta = float(sys.argv[1]) if len(sys.argv) > 1 else 5 * scen.projected_limit().beta2_half_bound

on, off = synthesize_pair(scen.background, scen.detector, scen.plan, sens, beta, scen.edges(), seed=2006)
res, (value, variance), limit = analyze_pair(on, off, sens, scen.detector)

print(f"injected beta^2/2 = {beta:.3e}")
print(f"on: {on.counts.sum()} counts in {on.live_time:.3g} s, off: {off.counts.sum()} counts in {off.live_time:.3g} s")

# coarse text view of the residual around the line
centers = 0.5 * (res.bin_edges[:-1] + res.bin_edges[1:])
window = (centers > 6.8) & (centers < 8.4)
for c, v, w in zip(centers[window], res.values[window], res.variances[window]):
    bar = "#" * int(max(v, 0) / 2)
    print(f"{c:5.2f} keV {v:+7.1f} +- {np.sqrt(w):5.1f} {bar}")

print(f"ROI sum {value:.1f} +- {np.sqrt(variance):.1f}  ({value / np.sqrt(variance):.1f} sigma)")
print(f"upper limit: {limit.nx_upper:.1f} counts -> beta^2/2 <= {limit.beta2_half_bound:.3e} ({limit.method})")
