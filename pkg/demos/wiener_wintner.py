"""Wiener-Wintner sweeps at one base point, on Z_257 and on the integers.

Run with ``python3 demos/wiener_wintner.py``.
"""
import numpy as np

from ergodic_workbench import TailedFunction, wiener_wintner_sweep
from ergodic_workbench.pointwise_experiments import CyclicRotation, IntegerShift, return_times_avg

N, r = 257, 100
rng = np.random.default_rng(5)
f = rng.uniform(-1, 1, N)
roots = np.exp(2j * np.pi * np.arange(8) / N)
rows = wiener_wintner_sweep(CyclicRotation(N, r), f, 0, roots, [N * 4, N * 16, N * 38])
print(" lambda-index     n        |A_n|      Delta")
for i, row in enumerate(rows):
    print(f"{i // 3:>8} {row.n:>9} {abs(row.average):12.3e} {row.report.delta:10.2e}")

# An L1 function on the integers: every frequency decays like 1/n.
shift = IntegerShift.for_horizon(0, 10000)
chi = TailedFunction.indicator(shift.space(), [0])
grid = np.exp(2j * np.pi * np.arange(64) / 64)
rows = wiener_wintner_sweep(shift, chi, 0, grid, [100, 1000, 10000])
worst = {n: max(r.report.delta for r in rows if r.n == n) for n in (100, 1000, 10000)}
print("worst Delta over 64 frequencies:", worst)

# return times: visits of two coprime rotations
s1, s2 = CyclicRotation(5, 1), CyclicRotation(7, 3)
a = return_times_avg(s1, TailedFunction.indicator(s1.space(), [0]), s2, TailedFunction.indicator(s2.space(), [0]), 0, 0, [35, 350])
print("return-times averages:", a.values, "expected", 1 / 35)
