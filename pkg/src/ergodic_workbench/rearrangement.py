"""Non-increasing rearrangements, Hardy-Littlewood majorization and t_mu.

A rearrangement is stored as a right-closed step function on (0, inf):
value ``v[i]`` on ``(t[i-1], t[i]]`` with ``t[-1] = 0``, then ``tail`` on
``(t[m-1], inf)``.  All cumulative integrals are piecewise linear with kinks
at the breakpoints only, which is what makes the majorization test exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .measure_model import TailedFunction, distribution

__all__ = [
    "StepFunction",
    "rearrange",
    "cumulative",
    "majorizes",
    "tmu_contains",
    "step_to_json",
    "step_from_json",
]


@dataclass(frozen=True, eq=False)
class StepFunction:
    """Step function on ``(0, inf)`` with finitely many breakpoints.

    Parameters
    ----------
    breakpoints : array_like
        Strictly increasing positive reals ``t_1 < ... < t_m`` (may be empty).
    values : array_like
        Non-negative reals, ``values[i]`` is taken on ``(t_{i-1}, t_i]``.
    tail_value : float
        Value on ``(t_m, inf)``.
    """

    breakpoints: np.ndarray
    values: np.ndarray
    tail_value: float = 0.0

    def __post_init__(self):
        t = np.asarray(self.breakpoints, dtype=float).ravel()
        v = np.asarray(self.values, dtype=float).ravel()
        if t.size != v.size:
            raise ValueError("breakpoints and values differ in length")
        if t.size and (t[0] <= 0 or np.any(np.diff(t) <= 0) or not np.all(np.isfinite(t))):
            raise ValueError("breakpoints must be finite, positive and strictly increasing")
        if np.any(v < 0) or self.tail_value < 0:
            raise ValueError("values must be non-negative")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "breakpoints", t)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "tail_value", float(self.tail_value))

    @property
    def is_nonincreasing(self) -> bool:
        seq = np.append(self.values, self.tail_value)
        return bool(np.all(np.diff(seq) <= 0))

    @property
    def support_end(self) -> float:
        return float(self.breakpoints[-1]) if self.breakpoints.size else 0.0

    def __call__(self, t):
        """Evaluate at ``t > 0`` (scalar or array)."""
        t = np.asarray(t, dtype=float)
        idx = np.searchsorted(self.breakpoints, t, side="left")
        padded = np.append(self.values, self.tail_value)
        out = padded[idx]
        return float(out) if out.ndim == 0 else out

    def level_measure(self, lam: float) -> float:
        """Lebesgue measure of ``{t > 0 : self(t) > lam}`` for a non-increasing step."""
        if self.tail_value > lam:
            return math.inf
        k = int(np.count_nonzero(self.values > lam))
        return float(self.breakpoints[k - 1]) if k else 0.0

    def total_integral(self) -> float:
        if self.tail_value > 0:
            return math.inf
        return cumulative(self, self.support_end) if self.breakpoints.size else 0.0


def rearrange(f: TailedFunction) -> StepFunction:
    """Non-increasing rearrangement ``f*`` of ``|f|``.

    Atoms are sorted by modulus, largest first (stable in atom index).
    Atoms not exceeding the tail modulus are absorbed by the tail, and
    adjacent equal steps are merged, so the output is canonical.
    """
    tail = abs(f.tail_value)
    a = np.abs(f.atom_values)
    w = f.space.atom_weights
    keep = a > tail
    a, w = a[keep], w[keep]
    order = np.argsort(-a, kind="stable")
    a, w = a[order], w[order]
    if not a.size:
        return StepFunction([], [], tail)
    # last index of every run of equal values; fsum makes each breakpoint
    # bit-identical to distribution() at the matching level
    ends = np.flatnonzero(np.append(a[1:] != a[:-1], True))
    t = [math.fsum(w[: j + 1]) for j in ends]
    return StepFunction(t, a[ends], tail)


def cumulative(sf: StepFunction, s):
    """Exact ``int_0^s sf(t) dt`` for ``s > 0`` (scalar or array)."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(s_arr < 0):
        raise ValueError("s must be >= 0")
    t = sf.breakpoints
    left = np.concatenate([[0.0], t[:-1]])
    # areas of the full rectangles up to each breakpoint
    full = np.concatenate([[0.0], np.cumsum(sf.values * (t - left))])
    k = np.searchsorted(t, s_arr, side="left")
    base = full[k]
    start = np.concatenate([[0.0], t])[k]
    height = np.append(sf.values, sf.tail_value)[k]
    out = base + height * (s_arr - start)
    return float(out) if out.ndim == 0 else out


def _probe_points(fs: StepFunction, gs: StepFunction) -> np.ndarray:
    kinks = np.union1d(fs.breakpoints, gs.breakpoints)
    beyond = (kinks[-1] if kinks.size else 0.0) + 1.0
    return np.append(kinks, beyond)


def majorizes(f: TailedFunction, g: TailedFunction, tol: float = 1e-12) -> bool:
    """Whether ``g << f``, i.e. ``int_0^s g* <= int_0^s f*`` for every ``s > 0``.

    Both sides are piecewise linear in ``s`` with kinks at breakpoints, so
    the comparison is made at the merged kinks, one exterior point, and on
    the terminal slopes (the tail values).
    """
    fs, gs = rearrange(f), rearrange(g)
    if gs.tail_value > fs.tail_value + tol:
        return False
    s = _probe_points(fs, gs)
    return bool(np.all(cumulative(gs, s) <= cumulative(fs, s) + tol))


def tmu_contains(f: TailedFunction, eps: float, delta: float) -> bool:
    """Membership of ``f`` in the measure-topology neighbourhood ``N(eps, delta)``."""
    if eps <= 0 or delta <= 0:
        raise ValueError("eps and delta must be > 0")
    return distribution(f, delta) <= eps


def step_to_json(sf: StepFunction) -> dict:
    return {
        "t": [float(x) for x in sf.breakpoints],
        "v": [float(x) for x in sf.values],
        "tail": sf.tail_value,
    }


def step_from_json(doc: dict) -> StepFunction:
    return StepFunction(doc["t"], doc["v"], doc.get("tail", 0.0))
