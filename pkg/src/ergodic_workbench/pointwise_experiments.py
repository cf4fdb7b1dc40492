"""Orbit averages of measure-preserving maps at fixed base points.

Two exact systems are provided: the shift on a window of the integers with
counting measure (infinite, sigma-finite) and rotations of the cyclic group
Z_N.  Results are per base point; the full-measure sets of the pointwise
theorems are never constructed, and every report says so in its ``note``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .averaging import _beta_values
from .measure_model import TailedFunction, TailedMeasureSpace

__all__ = [
    "OrbitEscapeError",
    "IntegerShift",
    "CyclicRotation",
    "ProductSystem",
    "OrbitSeries",
    "OscillationReport",
    "SweepRow",
    "orbit_weighted_avg",
    "oscillation",
    "window_oscillation",
    "wiener_wintner_sweep",
    "return_times_avg",
    "parse_system",
]

PER_POINT_NOTE = (
    "per-point finite-horizon result; full-measure exceptional sets are not constructed"
)


class OrbitEscapeError(ValueError):
    """An orbit segment left the finite window of an integer-shift system."""


@dataclass(frozen=True)
class IntegerShift:
    """``tau(w) = w + 1`` on the integers with counting measure.

    Only the window ``lo, ..., lo + size - 1`` is materialized; functions
    vanish off it (the tail of the tailed model) and any orbit that would
    leave it is an error rather than being wrapped.
    """

    lo: int = 0
    size: int = 1

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("window size must be >= 1")

    @classmethod
    def for_horizon(cls, base: int, horizon: int, lo: int | None = None) -> "IntegerShift":
        lo = base if lo is None else lo
        return cls(lo, base - lo + horizon + 1)

    def space(self) -> TailedMeasureSpace:
        return TailedMeasureSpace(np.ones(self.size), True)

    def index(self, point: int) -> int:
        return int(point) - self.lo

    def orbit(self, point: int, n: int) -> np.ndarray:
        start = self.index(point)
        if start < 0 or start + n > self.size:
            raise OrbitEscapeError(
                f"orbit of {point} over {n} steps leaves the window "
                f"[{self.lo}, {self.lo + self.size - 1}]"
            )
        return np.arange(start, start + n)


@dataclass(frozen=True)
class CyclicRotation:
    """``tau(i) = i + r mod N`` on ``Z_N`` with unit weights."""

    N: int
    r: int = 1

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be >= 1")

    def space(self) -> TailedMeasureSpace:
        return TailedMeasureSpace(np.ones(self.N), False)

    def index(self, point: int) -> int:
        return int(point) % self.N

    def orbit(self, point: int, n: int) -> np.ndarray:
        return (self.index(point) + self.r * np.arange(n)) % self.N

    @property
    def period(self) -> int:
        return self.N // np.gcd(self.N, self.r % self.N or self.N)


@dataclass(frozen=True)
class ProductSystem:
    """Coordinatewise action on a pair of systems; points are pairs."""

    first: object
    second: object

    def orbit(self, point, n: int) -> tuple[np.ndarray, np.ndarray]:
        return self.first.orbit(point[0], n), self.second.orbit(point[1], n)


@dataclass(frozen=True)
class OrbitSeries:
    """Partial averages ``A_n`` at the requested ``ns`` for one base point."""

    base_point: object
    ns: tuple
    values: tuple
    note: str = PER_POINT_NOTE

    def __post_init__(self):
        if len(self.ns) != len(self.values):
            raise ValueError("ns and values differ in length")
        if not np.all(np.isfinite(np.asarray(self.values, dtype=complex))):
            raise ValueError("non-finite partial average")

    @property
    def horizon(self) -> int:
        return self.ns[-1]

    def at(self, n: int) -> complex:
        return self.values[self.ns.index(n)]


@dataclass(frozen=True)
class OscillationReport:
    delta_real: float
    delta_imag: float

    @property
    def delta(self) -> float:
        return max(self.delta_real, self.delta_imag)


def _values_on(sys, f) -> np.ndarray:
    if isinstance(f, TailedFunction):
        if f.tail_value != 0 and isinstance(sys, IntegerShift):
            raise ValueError("integer-shift functions must vanish off the window")
        return np.asarray(f.atom_values, dtype=complex)
    return np.asarray(f, dtype=complex)


def _partial_averages(terms: np.ndarray) -> np.ndarray:
    return np.cumsum(terms) / np.arange(1, terms.size + 1)


def _select(avgs: np.ndarray, ns: Sequence[int]) -> tuple:
    return tuple(complex(avgs[n - 1]) for n in ns)


def _check_ns(n_list) -> tuple:
    ns = tuple(sorted(set(int(n) for n in n_list)))
    if not ns or ns[0] < 1:
        raise ValueError("n_list must contain positive integers")
    return ns


def _orbit_terms(sys, f, omega, beta, n_max: int) -> np.ndarray:
    vals = _values_on(sys, f)
    idx = sys.orbit(omega, n_max)
    terms = vals[idx]
    weights, _ = _beta_values(beta, n_max)
    return terms if weights is None else weights * terms


def orbit_weighted_avg(sys, f, beta, omega, n_list) -> OrbitSeries:
    """``A_n(beta, f)(omega) = (1/n) sum_{k<n} beta_k f(tau^k omega)``.

    ``beta=None`` is the unweighted average; otherwise a
    :class:`BesicovitchSequence` or an explicit array of weights.
    """
    ns = _check_ns(n_list)
    avgs = _partial_averages(_orbit_terms(sys, f, omega, beta, ns[-1]))
    return OrbitSeries(omega, ns, _select(avgs, ns))


def oscillation(series: OrbitSeries) -> OscillationReport:
    """Max minus min of real and imaginary parts over entries with ``n >= n_max/2``."""
    if len(series.ns) < 4:
        raise ValueError("oscillation needs a series with at least 4 entries")
    ns = np.asarray(series.ns)
    vals = np.asarray(series.values, dtype=complex)[ns >= ns[-1] / 2]
    return OscillationReport(float(np.ptp(vals.real)), float(np.ptp(vals.imag)))


def window_oscillation(avgs: np.ndarray, n: int) -> OscillationReport:
    """Oscillation of dense partial averages ``avgs[m-1] = A_m`` over ``n/2 <= m <= n``."""
    lo = int(np.ceil(n / 2))
    window = avgs[lo - 1 : n]
    return OscillationReport(float(np.ptp(window.real)), float(np.ptp(window.imag)))


@dataclass(frozen=True)
class SweepRow:
    lam: complex
    n: int
    average: complex
    report: OscillationReport


def wiener_wintner_sweep(sys, f, omega, lam_grid, n_list) -> list[SweepRow]:
    """Averages with weights ``lambda**k`` for every ``lambda`` in the grid.

    All frequencies share the single base point ``omega``.  For each
    horizon ``n`` the row carries ``A_n`` and the oscillation of the dense
    partial averages over ``[n/2, n]``.
    """
    lam_grid = np.atleast_1d(np.asarray(lam_grid, dtype=complex))
    if lam_grid.size == 0:
        raise ValueError("lambda grid must be non-empty")
    ns = _check_ns(n_list)
    n_max = ns[-1]
    terms = _orbit_terms(sys, f, omega, None, n_max)
    k = np.arange(n_max)
    rows = []
    for lam in lam_grid:
        weights = np.exp(1j * np.angle(lam) * k)
        avgs = _partial_averages(weights * terms)
        for n in ns:
            rows.append(SweepRow(complex(lam), n, complex(avgs[n - 1]), window_oscillation(avgs, n)))
    return rows


def return_times_avg(sys_omega, f, sys_x, g, omega, x, n_list) -> OrbitSeries:
    """``A_n(f, g)(omega, x) = (1/n) sum_{k<n} g(phi^k x) f(tau^k omega)``."""
    ns = _check_ns(n_list)
    n_max = ns[-1]
    fv = _values_on(sys_omega, f)[sys_omega.orbit(omega, n_max)]
    gv = _values_on(sys_x, g)[sys_x.orbit(x, n_max)]
    avgs = _partial_averages(fv * gv)
    return OrbitSeries((omega, x), ns, _select(avgs, ns))


def parse_system(text: str):
    """``"cyclic:N=257,r=100"`` or ``"shift:lo=0,size=10001"``."""
    head, _, rest = text.partition(":")
    params = {}
    for item in filter(None, rest.split(",")):
        key, sep, val = item.partition("=")
        if not sep:
            raise ValueError(f"bad system parameter {item!r}")
        params[key.strip()] = int(val)
    head = head.strip().lower()
    if head == "cyclic":
        return CyclicRotation(**params)
    if head in ("shift", "integer-shift"):
        return IntegerShift(**params)
    raise ValueError(f"unknown system {head!r}")
