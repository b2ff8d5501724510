"""Does a sheet of qubits with random dead sites still connect edge to edge?

On the triangular lattice the answer flips at exactly half the sites good.
"""
from sige_srt import yieldsim

for occ in (0.45, 0.50, 0.55):
    est = yieldsim.percolation_probability(yieldsim.LatticeSpec(64, 64, occ, seed=1), 500)
    print(f"occupancy {occ:.2f}: P(span) = {est.probability:.3f} +/- {est.stderr:.3f}")

th = yieldsim.percolation_threshold_estimate([16, 32, 64, 128], 300, seed=1)
for L, c, s in zip(th.sizes, th.crossings, th.spreads):
    print(f"L={L:4d}: half-crossing {c:.4f}, spread {s:.4f}")
print(f"extrapolated threshold {th.estimate:.4f} +/- {th.uncertainty:.4f}")

# with 9 re-implant passes the site yield clears the threshold comfortably
y = yieldsim.optimize_uniform(9)[1]
print(f"\n9-pass site yield {y:.3f} vs threshold 0.5")
