"""Rearrangements, majorization and the symmetric norms on a small tailed space.

Run with ``python3 demos/rearrangements_and_norms.py``.
"""
import numpy as np

from ergodic_workbench import (
    DSOperator,
    TailedFunction,
    TailedMeasureSpace,
    compute_norm,
    cumulative,
    in_r_mu,
    majorizes,
    parse_norm_spec,
    rearrange,
    space_excludes_one,
)

# Four atoms of mass (1, 1, 2, 0.5) plus an infinite tail.
space = TailedMeasureSpace([1.0, 1.0, 2.0, 0.5])
f = TailedFunction(space, [3.0, -1.0, 0.5j, 2.0])

sf = rearrange(f)
print("kinks of f*:", sf.breakpoints)
print("values     :", sf.values)

# Averaging the two unit atoms flattens f, so it can only lose mass at the top.
avg = np.eye(4)
avg[:2, :2] = 0.5
g = DSOperator(avg)(f)
print("f >> Tf:", majorizes(f, g), " Tf >> f:", majorizes(g, f))
s = np.array([0.5, 1.0, 2.0, 4.5])
print("cumulatives f*:", cumulative(sf, s))
print("cumulatives g*:", cumulative(rearrange(g), s))

# The same norms on f and on g; every one of them can only drop.
for text in ["l1", "linf", "l1pluslinf", "orlicz:p=2", "lorentz:sqrt", "marcinkiewicz:sqrt"]:
    spec = parse_norm_spec(text)
    print(f"{text:>20}: {compute_norm(f, spec):9.5f} -> {compute_norm(g, spec):9.5f}")

# The constant 1 lives on the tail; spaces that exclude it sit inside R_mu.
one = TailedFunction.one(space)
print("1 in R_mu:", in_r_mu(one))
for text in ["lorentz:sqrt", "lorentz:saturating", "marcinkiewicz:t", "marcinkiewicz:sqrt"]:
    spec = parse_norm_spec(text)
    print(f"{text:>20}: excludes 1 = {space_excludes_one(spec, space)}, ||1|| = {compute_norm(one, spec)}")
