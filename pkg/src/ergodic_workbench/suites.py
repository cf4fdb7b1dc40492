"""Seeded random instance generators and the batch property suites.

Each instance ``i`` of a suite draws from its own generator seeded with
``(seed, i)``, so results do not depend on evaluation order.
"""

from __future__ import annotations

import numpy as np

from .averaging import (
    BesicovitchSequence,
    Perturbation,
    TrigPolynomial,
    check_weak11,
    check_weighted_weak11,
)
from .ds_operator import apply, random_ds_operator, verify_ds
from .measure_model import TailedFunction, TailedMeasureSpace, norm_lp
from .rearrangement import majorizes

POSITIVE_KINDS = ("positive", "permutation", "birkhoff")
ALL_KINDS = POSITIVE_KINDS + ("phase",)


def instance_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng([int(seed), int(index)])


def random_space(rng: np.random.Generator, max_atoms: int = 64, tail: bool = True) -> TailedMeasureSpace:
    n = int(rng.integers(1, max_atoms + 1))
    # a few distinct weights so weight-preserving permutations are non-trivial
    palette = rng.uniform(0.1, 3.0, size=int(rng.integers(1, 4)))
    return TailedMeasureSpace(rng.choice(palette, size=n), tail)


def random_function(
    space: TailedMeasureSpace, rng: np.random.Generator, tail: bool = False, complex_values: bool = True
) -> TailedFunction:
    n = space.n_atoms
    v = rng.standard_normal(n) * rng.exponential(1.0, n)
    if complex_values:
        v = v + 1j * rng.standard_normal(n)
    v = v * (rng.random(n) < rng.uniform(0.3, 1.0))
    t = (rng.standard_normal() + 1j * rng.standard_normal()) if tail and space.has_infinite_tail else 0.0
    return TailedFunction(space, v, t)


def random_besicovitch(rng: np.random.Generator) -> BesicovitchSequence:
    """A catalog sequence: a random trig polynomial plus a catalog perturbation."""
    s = int(rng.integers(1, 4))
    z = rng.standard_normal(s) + 1j * rng.standard_normal(s)
    lam = np.exp(2j * np.pi * rng.random(s))
    kind = rng.choice(["zero", "harmonic", "geometric"])
    c = complex(rng.standard_normal(), rng.standard_normal())
    pert = Perturbation(str(kind), c, float(rng.uniform(-0.9, 0.9)))
    return BesicovitchSequence(TrigPolynomial(z, lam), pert)


def ds_contraction_suite(seed: int, n_ops: int = 500, n_fns: int = 20, max_atoms: int = 64, tol: float = 1e-12) -> dict:
    """L1 and Linf contraction plus ``Tf << f`` on random operators and functions."""
    violations = {"l1": 0, "linf": 0, "majorization": 0, "not_ds": 0}
    checks = 0
    for i in range(n_ops):
        rng = instance_rng(seed, i)
        kind = ALL_KINDS[i % len(ALL_KINDS)]
        space = random_space(rng, max_atoms)
        T = random_ds_operator(space, rng, kind, with_tail=bool(rng.random() < 0.5))
        if not verify_ds(T, space).ok:
            violations["not_ds"] += 1
        for j in range(n_fns):
            f = random_function(space, rng, tail=(j % 2 == 1))
            Tf = apply(T, f)
            checks += 1
            if f.tail_value == 0 and norm_lp(Tf, 1) > norm_lp(f, 1) + tol:
                violations["l1"] += 1
            if norm_lp(Tf, np.inf) > norm_lp(f, np.inf) + tol:
                violations["linf"] += 1
            if not majorizes(f, Tf, tol):
                violations["majorization"] += 1
    return {"operators": n_ops, "checks": checks, "violations": violations,
            "ok": not any(violations.values())}


def _random_level(rng, f: TailedFunction) -> float:
    m = float(np.abs(f.atom_values).max(initial=0.0))
    return float(rng.uniform(0.05, 1.0) * m) if m > 0 else 1.0


def weak11_suite(seed: int, instances: int = 500, horizon: int = 200, max_atoms: int = 64) -> dict:
    """Plain (positive operators) and weighted weak (1,1) checks on random instances."""
    plain = weighted = 0
    worst_plain = worst_weighted = 0.0
    for i in range(instances):
        rng = instance_rng(seed, i)
        space = random_space(rng, max_atoms)
        T = random_ds_operator(space, rng, POSITIVE_KINDS[i % 3])
        f = random_function(space, rng)
        r = check_weak11(T, f, _random_level(rng, f), horizon)
        plain += not r.ok
        if r.rhs > 0:
            worst_plain = max(worst_plain, r.lhs / r.rhs)

        rng = instance_rng(seed, instances + i)
        space = random_space(rng, max_atoms)
        T = random_ds_operator(space, rng, ALL_KINDS[i % 4])
        f = random_function(space, rng)
        beta = random_besicovitch(rng)
        r = check_weighted_weak11(T, f, beta, _random_level(rng, f), horizon)
        weighted += not r.ok
        if r.rhs > 0:
            worst_weighted = max(worst_weighted, r.lhs / r.rhs)
    return {
        "instances": instances,
        "horizon": horizon,
        "plain_violations": plain,
        "weighted_violations": weighted,
        "worst_plain_ratio": worst_plain,
        "worst_weighted_ratio": worst_weighted,
        "ok": plain == 0 and weighted == 0,
    }
