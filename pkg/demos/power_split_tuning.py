"""How should a fixed power budget be split between sources and relay?

Sweeps the source-to-relay power ratio analytically, locates the
minimizer by golden-section search, and spot-checks three ratios with
a short simulation. The analytic optimum lands on ratio 0.5, i.e. a
quarter of the budget per source and half to the relay, independent of
relay count and noise level.
"""

from birelay.powalloc import (
    mc_sweep_lambda,
    opa_split,
    optimize_lambda,
    split_for_lambda,
    sweep_lambda,
)

TOTAL_POWER = 3.0
NOISE = 0.02
BPSK_C = 2.0

print("analytic sweep, 2 relays, total power 3, noise 0.02")
grid = tuple(round(0.1 * k, 1) for k in range(1, 21))
table, best = sweep_lambda(TOTAL_POWER, 2, BPSK_C, NOISE, grid)
for lam, ser in table:
    bar = "#" * max(1, int(round(ser / table[-1][1] * 10)))
    print(f"  lambda {lam:4.1f}  ser {ser:.4e}  {bar}")
print(f"  coarse argmin: {best:g}")

print("\ngolden-section optimum per relay count")
for n in (1, 2, 3, 4):
    lam_star = optimize_lambda(TOTAL_POWER, n, BPSK_C, NOISE)
    print(f"  {n} relays: lambda* = {lam_star:.4f}")

star = opa_split(TOTAL_POWER)
even = split_for_lambda(TOTAL_POWER, 1.0)
print(f"\noptimal split:  p_s = {star.p_s:.3f}, p_r = {star.p_r:.3f}")
print(f"even split:     p_s = {even.p_s:.3f}, p_r = {even.p_r:.3f}")

print("\nsimulated spot check (2 relays, 500 errors per point)")
rows = mc_sweep_lambda(
    TOTAL_POWER, 2, NOISE, (0.25, 0.5, 1.0),
    min_errors=500, max_frames=10_000_000,
    master_seed=99, chunk_frames=100_000,
)
for lam, pt in rows:
    print(f"  lambda {lam:4.2f}  ser {pt.ser_avg:.4e}  ({pt.frames} frames)")
best_mc = min(rows, key=lambda r: r[1].ser_avg)[0]
print(f"  simulated argmin: {best_mc:g}")
