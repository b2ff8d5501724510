"""Gate-tune the resonance frequency of a donor electron.

A field along the growth axis drags the electron from the Si-like donor layer
into the Ge-like tuning layer. The resonance follows the probability weight in
the L-like layers.
"""
import numpy as np

from sige_srt import stack

B = 2.0
for growth in ("111", "001"):
    s = stack.reference_stack(growth)
    donor = stack.default_donor(s)
    report = stack.validate_stack(s, donor)
    print(f"<{growth}> reference stack, validation {'pass' if report.passed else 'FAIL'}")
    for check in report.checks:
        print(f"   {check.name:18s} {check.message}")
    curve = stack.tuning_curve(s, B, np.linspace(0.0, 0.4, 9), donor=donor)
    print("   E (mV/A)   weight    g_eff   f (GHz)")
    for f, w, g, fr in curve.rows():
        print(f"   {f:7.3f}   {w:7.4f}   {g:6.3f}   {fr:7.2f}")
    print()
