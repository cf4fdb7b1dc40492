"""Desk model of a sigma-finite infinite measure space and of L1 + Linf.

A space is a finite list of atoms with positive weights, optionally joined
by one region of infinite measure (the *tail*).  Functions take one complex
value per atom and a single constant value on the tail.  This is the
smallest model where the constant function ``1`` fails to lie in R_mu while
every function supported on atoms belongs to it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "TailedMeasureSpace",
    "TailedFunction",
    "distribution",
    "in_r_mu",
    "split_r_mu",
    "norm_lp",
    "sample_paper_example",
    "function_to_json",
    "function_from_json",
]


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TailedMeasureSpace:
    """Finite atoms of positive mass plus an optional infinite-measure tail.

    Parameters
    ----------
    atom_weights : sequence of float
        Measure of each atom; finite and strictly positive.
    has_infinite_tail : bool
        Whether the space carries an extra region of infinite measure.
    """

    atom_weights: np.ndarray
    has_infinite_tail: bool = True

    def __post_init__(self):
        w = np.asarray(self.atom_weights, dtype=float).ravel()
        if w.size < 1:
            raise ValueError("a space needs at least one atom")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("atom weights must be finite and > 0")
        object.__setattr__(self, "atom_weights", _frozen(w))
        object.__setattr__(self, "has_infinite_tail", bool(self.has_infinite_tail))

    @property
    def n_atoms(self) -> int:
        return self.atom_weights.size

    @property
    def atom_mass(self) -> float:
        return math.fsum(self.atom_weights)

    @property
    def total_mass(self) -> float:
        return math.inf if self.has_infinite_tail else self.atom_mass

    def same_as(self, other: "TailedMeasureSpace") -> bool:
        return (
            self is other
            or (
                self.has_infinite_tail == other.has_infinite_tail
                and self.n_atoms == other.n_atoms
                and np.array_equal(self.atom_weights, other.atom_weights)
            )
        )

    @classmethod
    def uniform(cls, n: int, weight: float = 1.0, tail: bool = True) -> "TailedMeasureSpace":
        return cls(np.full(n, float(weight)), tail)


@dataclass(frozen=True, eq=False)
class TailedFunction:
    """A function in L1 + Linf on a :class:`TailedMeasureSpace`.

    ``tail_value`` is the constant taken on the infinite tail.  On spaces
    without a tail it is forced to zero.
    """

    space: TailedMeasureSpace
    atom_values: np.ndarray
    tail_value: complex = 0j

    def __post_init__(self):
        v = np.asarray(self.atom_values, dtype=complex).ravel()
        if v.size != self.space.n_atoms:
            raise ValueError(
                f"expected {self.space.n_atoms} atom values, got {v.size}"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("atom values must be finite")
        tail = complex(self.tail_value) if self.space.has_infinite_tail else 0j
        if not _isfinite(tail):
            raise ValueError("tail value must be finite")
        object.__setattr__(self, "atom_values", _frozen(v))
        object.__setattr__(self, "tail_value", tail)

    # constructors -------------------------------------------------------
    @classmethod
    def one(cls, space: TailedMeasureSpace) -> "TailedFunction":
        return cls(space, np.ones(space.n_atoms), 1.0)

    @classmethod
    def zero(cls, space: TailedMeasureSpace) -> "TailedFunction":
        return cls(space, np.zeros(space.n_atoms), 0.0)

    @classmethod
    def indicator(cls, space: TailedMeasureSpace, atoms) -> "TailedFunction":
        v = np.zeros(space.n_atoms)
        v[np.asarray(atoms, dtype=int)] = 1.0
        return cls(space, v, 0.0)

    # arithmetic ---------------------------------------------------------
    def _check(self, other: "TailedFunction"):
        if not self.space.same_as(other.space):
            raise ValueError("functions live on different spaces")

    def __add__(self, other):
        self._check(other)
        return TailedFunction(
            self.space, self.atom_values + other.atom_values, self.tail_value + other.tail_value
        )

    def __sub__(self, other):
        self._check(other)
        return TailedFunction(
            self.space, self.atom_values - other.atom_values, self.tail_value - other.tail_value
        )

    def __mul__(self, c):
        c = complex(c)
        return TailedFunction(self.space, c * self.atom_values, c * self.tail_value)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __abs__(self):
        return TailedFunction(self.space, np.abs(self.atom_values), abs(self.tail_value))

    @property
    def is_tail_free(self) -> bool:
        return self.tail_value == 0

    def sup_distance(self, other: "TailedFunction") -> float:
        """``||self - other||_inf`` including the tail."""
        return norm_lp(self - other, math.inf)


def _isfinite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)


def distribution(f: TailedFunction, lam: float) -> float:
    """Return ``mu{|f| > lam}`` (possibly ``inf``)."""
    if lam < 0:
        raise ValueError("lam must be >= 0")
    if f.space.has_infinite_tail and abs(f.tail_value) > lam:
        return math.inf
    mask = np.abs(f.atom_values) > lam
    # correctly rounded, hence independent of summation order
    return math.fsum(f.space.atom_weights[mask])


def in_r_mu(f: TailedFunction) -> bool:
    """Whether every super-level set ``{|f| > lam}``, ``lam > 0``, has finite measure."""
    return (not f.space.has_infinite_tail) or f.tail_value == 0


def split_r_mu(f: TailedFunction, eps: float) -> tuple[TailedFunction, TailedFunction]:
    """Split ``f = g + h`` with ``g`` in L1 and ``||h||_inf <= eps``.

    ``g`` is ``f`` restricted to ``{|f| > eps}`` and ``h`` is the rest.

    Raises
    ------
    ValueError
        If ``f`` is not in R_mu, or ``eps <= 0``.
    """
    if eps <= 0:
        raise ValueError("eps must be > 0")
    if not in_r_mu(f):
        raise ValueError("f is not in R_mu: its tail value is non-zero on infinite measure")
    big = np.abs(f.atom_values) > eps
    zero = np.zeros_like(f.atom_values)
    g = TailedFunction(f.space, np.where(big, f.atom_values, zero), 0.0)
    h = TailedFunction(f.space, np.where(big, zero, f.atom_values), f.tail_value)
    return g, h


def norm_lp(f: TailedFunction, p: float) -> float:
    """Standard ``L^p`` norm, ``1 <= p <= inf``; may be ``inf``."""
    if not p >= 1:
        raise ValueError("p must be >= 1")
    a = np.abs(f.atom_values)
    tail = abs(f.tail_value) if f.space.has_infinite_tail else 0.0
    if math.isinf(p):
        return max(float(a.max(initial=0.0)), tail)
    if tail > 0:
        return math.inf
    if p == 1:
        return float(np.sum(f.space.atom_weights * a))
    # scale out the max to keep a**p finite
    m = a.max(initial=0.0)
    if m == 0:
        return 0.0
    return float(m * np.sum(f.space.atom_weights * (a / m) ** p) ** (1.0 / p))


def paper_example_values(K: int, omega) -> np.ndarray:
    """``sum_{k=1}^K 2^{-k} omega^{-1/k}`` evaluated pointwise."""
    omega = np.asarray(omega, dtype=float)
    out = np.zeros_like(omega)
    for k in range(K, 0, -1):
        out += 2.0 ** (-k) * omega ** (-1.0 / k)
    return out


def sample_paper_example(K: int, grid: Sequence[float]) -> TailedFunction:
    """Discretize ``f(w) = sum_k 2^-k w^(-1/k)`` on ``[1, max(grid)]``.

    The function is bounded and tends to zero at infinity, so it lies in
    R_mu while escaping every ``L^p``, ``p < inf``.  Each grid point becomes
    an atom whose weight is the length of its cell in the partition of
    ``[1, w_max]`` cut at midpoints between neighbouring grid points.  A
    single-point grid gets a unit cell.  The tail (the rest of the
    half-line) carries value zero.

    Parameters
    ----------
    K : int
        Number of series terms kept.
    grid : sequence of float
        Strictly increasing points, all ``>= 1``.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    g = np.asarray(grid, dtype=float).ravel()
    if g.size == 0:
        raise ValueError("grid must be non-empty")
    if np.any(g < 1) or np.any(np.diff(g) <= 0):
        raise ValueError("grid must be strictly increasing with all points >= 1")
    if g.size == 1:
        weights = np.ones(1)
    else:
        edges = np.concatenate([[1.0], 0.5 * (g[1:] + g[:-1]), [g[-1]]])
        weights = np.diff(edges)
    space = TailedMeasureSpace(weights, True)
    return TailedFunction(space, paper_example_values(K, g), 0.0)


# -- JSON ------------------------------------------------------------------

def _pair(z: complex) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _complex(x) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValueError(f"complex value must be [re, im], got {x!r}")
        return complex(float(x[0]), float(x[1]))
    return complex(float(x))


def function_to_json(f: TailedFunction) -> dict:
    return {
        "weights": [float(w) for w in f.space.atom_weights],
        "tail": f.space.has_infinite_tail,
        "values": [_pair(v) for v in f.atom_values],
        "tail_value": _pair(f.tail_value),
    }


def function_from_json(doc) -> TailedFunction:
    """Inverse of :func:`function_to_json`; accepts a dict or a JSON string."""
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    space = TailedMeasureSpace(doc["weights"], bool(doc.get("tail", True)))
    values = [_complex(v) for v in doc["values"]]
    return TailedFunction(space, values, _complex(doc.get("tail_value", 0.0)))
