# Monte Carlo cross-checks of the two closed forms used in the counting chain.
#
# Run:  python demos/02_monte_carlo_checks.py

from vipkit.physics import StripGeometry, exact_escape_fraction, visible_fraction
from vipkit.transport import McConfig, simulate_escape, simulate_scatter_count

mc = McConfig(n_samples=1_000_000, seed=7, workers=4)

# photon escape: thin-sampling ratio lambda/z vs the exact depth average
lam = 1.0
for z in (0.5, 2.0, 10.0, 50.0):
    strip = StripGeometry(z, 1.0, 1.0)
    est = simulate_escape(strip, lam, mc)
    print(f"z/lambda={z:5.1f}  lambda/z={visible_fraction(strip, lam):.5f}"
          f"  exact={exact_escape_fraction(strip, lam):.5f}  MC={est.mean:.5f} +- {est.std_error:.1e}")

# electron scatterings over the window: a Poisson process with mean D/mu
mu = 3.9e-6
for ratio in (1, 10, 100, 6.4e5):
    est = simulate_scatter_count(StripGeometry(1.0, ratio * mu, mu), mc)
    print(f"D/mu={ratio:>9g}  MC mean={est.mean:.4f} +- {est.std_error:.1e}")

# results are independent of the worker count
a = simulate_escape(StripGeometry(3.0, 1, 1), 1.0, McConfig(200_000, seed=1, workers=1))
b = simulate_escape(StripGeometry(3.0, 1, 1), 1.0, McConfig(200_000, seed=1, workers=8))
print("1 worker == 8 workers:", a == b)
