"""Single-ion implantation: Poisson statistics cap the fraction of sites with
exactly one donor at 1/e. Sensing empty sites and dosing them again lifts it."""
from sige_srt import yieldsim

print(f"one pass at p=1: {yieldsim.single_site_yield(1.0):.4f}")
print(f"two neighbours both good: {yieldsim.adjacent_pair_yield(1.0):.4f}")

print("\n  n   best uniform p   yield")
for n, p, y in yieldsim.yield_table([1, 2, 3, 5, 9, 24]):
    print(f"  {n:2d}   {p:12.4f}   {y:.4f}")

strat, y = yieldsim.optimize_reimplant(3)
print("\nfree doses, three passes: " + ", ".join(f"{p:.4f}" for p in strat.doses) + f" -> {y:.4f}")

mc = yieldsim.monte_carlo_yield(strat, 10**6, seed=1)
print(f"Monte Carlo, 1e6 sites: {mc.estimate:.4f} +/- {mc.stderr:.4f}")
