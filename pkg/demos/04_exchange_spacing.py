"""How far apart must two Ge donors sit so that their idle exchange stays
below the spin linewidth?"""
import numpy as np

from sige_srt import exchange

ctx = exchange.ExchangeContext(a_B=64.0, epsilon=16.0)
print(f"peak 4J/h = {exchange.max_exchange_rate(ctx):.3e} Hz at r = {1.25 * ctx.a_B:.0f} A")

for target in (1e6, 1e3, 1.0):
    r = exchange.spacing_for_rate(target, ctx)
    print(f"4J/h = {target:8.0e} Hz at r = {r:7.1f} A ({r / ctx.a_B:5.2f} Bohr radii)")

r0 = exchange.spacing_for_rate(ctx.t2_linewidth, ctx)
print(f"\nlinewidth-limited spacing {r0:.0f} A versus the often quoted 2000 A;"
      f" at 2000 A the idle rate is {exchange.exchange_rate(2000.0, ctx):.2e} Hz")

print("\ngate on: Bohr radius grows, exchange at fixed spacing rises")
for scale in (1.0, 1.25, 1.5, 2.0):
    on = exchange.ExchangeContext(a_B=scale * ctx.a_B, epsilon=ctx.epsilon)
    print(f"  a_B x {scale:4.2f}: on/off = {exchange.on_off_ratio(r0, ctx, on):.3e}")

ft = exchange.fault_tolerance_budget(ctx)
print(f"\nlinewidth/clock = {ft.ratio:.1e} (threshold {ft.threshold:.0e}): {'ok' if ft.passed else 'too slow'}")

r = np.array([50.0, 80.0, 200.0, 500.0, 1000.0])
print("\n" + exchange.sweep_csv(r, ctx), end="")
