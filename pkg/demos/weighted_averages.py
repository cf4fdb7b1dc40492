"""Weighted ergodic averages of a DS operator and a finite-horizon Egorov witness.

Run with ``python3 demos/weighted_averages.py``.
"""
import numpy as np

from ergodic_workbench import (
    BesicovitchSequence,
    Perturbation,
    TailedMeasureSpace,
    TrigPolynomial,
    averages_trace,
    check_weak11,
    check_weighted_weak11,
    egorov_certify,
    random_ds_operator,
)
from ergodic_workbench.suites import random_function

rng = np.random.default_rng(1)
space = TailedMeasureSpace.uniform(24)
T = random_ds_operator(space, rng, "birkhoff")
f = random_function(space, rng)

# beta_k = 1 + 0.5 e^{2 pi i k / 7} + 1/(k+1): a Besicovitch sequence with C = 2.5
P = TrigPolynomial([1.0, 0.5], [1.0, np.exp(2j * np.pi / 7)])
beta = BesicovitchSequence(P, Perturbation("harmonic", 1.0))
print("C =", beta.bound)

ns = [10, 100, 1000, 5000, 10000]
trace = averages_trace(T, f, ns, beta)
for n, g in zip(trace.ns, trace.functions):
    print(f"n={n:>6}  |B_n f|_inf = {np.abs(g.atom_values).max():.6f}")

cert = egorov_certify(trace, None, eps=0.0, tol=1e-2)
print("certified:", cert.ok, "limit rule:", cert.limit_rule)
for n, d in cert.sup_decay:
    print(f"   n={n:>6} sup deviation {d:.2e}")

# maximal inequalities at a few levels
f0 = random_function(space, rng)
for lam in (0.5, 1.0, 2.0):
    plain = check_weak11(T, f0, lam, 200)
    weighted = check_weighted_weak11(T, f0, beta, lam, 200)
    print(f"lam={lam}: {plain.lhs:.2f} <= {plain.rhs:.2f}   {weighted.lhs:.2f} <= {weighted.rhs:.2f}")
