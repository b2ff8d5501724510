"""Walk the alloy composition axis and watch the donor g-factor flip.

Below the X/L crossover the lowest conduction valley is Si-like and the donor
g sits near 2. Above it the L valley takes over; under <111> strain a single
L valley is lowest (g along the axis), under <001> the four are degenerate and
the donor sees their average.
"""
import numpy as np

from sige_srt import materials
from sige_srt.materials import AlloySpec

for growth in ("111", "001"):
    print(f"growth <{growth}>")
    print("   x    valley   edge(meV)   eps     m_xy    m_z     g")
    for x in np.linspace(0.0, 1.0, 11):
        alloy = AlloySpec(float(x), growth)
        info = materials.band_info(alloy)
        p = materials.alloy_params(alloy)
        print(f"  {x:.1f}   {info.valley_character:6s} {info.conduction_band_edge:9.1f}"
              f"   {p.epsilon:5.2f}  {p.m_xy:.3f}  {p.m_z:.3f}  {info.g_isotropic_donor:.3f}")
    print()

ref = AlloySpec(0.60, "111")
for x in (0.77, 0.85):
    print(f"barrier from x=0.60 to x={x}: {materials.barrier_height(ref, AlloySpec(x, '111')):.1f} meV")
