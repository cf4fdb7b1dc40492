"""Fully symmetric norms evaluated through the rearrangement.

Orlicz functions and concave weights come from small fixed catalogs so that
their behaviour at zero and infinity is known exactly instead of being
guessed by extrapolation.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .measure_model import TailedFunction, TailedMeasureSpace, norm_lp
from .rearrangement import StepFunction, cumulative, rearrange

__all__ = [
    "OrliczFunction",
    "ConcaveWeight",
    "NormSpec",
    "norm_l1_cap_linf",
    "norm_l1_plus_linf",
    "luxemburg_norm",
    "lorentz_norm",
    "marcinkiewicz_norm",
    "space_excludes_one",
    "compute_norm",
    "parse_norm_spec",
]


@dataclass(frozen=True)
class OrliczFunction:
    """Catalog Orlicz function.

    ``kind`` is ``"power"`` (``u**p``, ``p >= 1``), ``"exp"`` (``e**u - 1``)
    or ``"linlog"`` (``u*log(1 + u)``).
    """

    kind: str = "power"
    p: float = 2.0

    def __post_init__(self):
        if self.kind not in ("power", "exp", "linlog"):
            raise ValueError(f"unknown Orlicz function {self.kind!r}")
        if self.kind == "power" and not self.p >= 1:
            raise ValueError("power Orlicz functions need p >= 1")

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(over="ignore"):
            if self.kind == "power":
                return u**self.p
            if self.kind == "exp":
                return np.expm1(u)
            return u * np.log1p(u)

    @property
    def label(self) -> str:
        return f"power(p={self.p:g})" if self.kind == "power" else self.kind

    def is_valid(self, lo: float = 1e-6, hi: float = 1e3, n: int = 400) -> bool:
        """Numerical check of ``Phi(0) = 0``, positivity and convexity on a log grid."""
        if self(0.0) != 0:
            return False
        u = np.geomspace(lo, hi, n)
        vals = self(u)
        if np.any(vals[np.isfinite(vals)] <= 0):
            return False
        # convexity on a non-uniform grid: slopes must not decrease
        fin = np.isfinite(vals)
        slopes = np.diff(vals[fin]) / np.diff(u[fin])
        return bool(np.all(np.diff(slopes) >= -1e-9 * np.maximum(1.0, np.abs(slopes[1:]))))


@dataclass(frozen=True)
class ConcaveWeight:
    """Catalog concave weight ``phi`` for Lorentz and Marcinkiewicz norms.

    ``kind`` is ``"power"`` (``t**alpha``, ``0 < alpha <= 1``), ``"log"``
    (``log(1 + t)``) or ``"saturating"`` (``t/(1 + t)``, bounded).
    """

    kind: str = "power"
    alpha: float = 0.5

    def __post_init__(self):
        if self.kind not in ("power", "log", "saturating"):
            raise ValueError(f"unknown concave weight {self.kind!r}")
        if self.kind == "power" and not 0 < self.alpha <= 1:
            raise ValueError("power weights need 0 < alpha <= 1")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "power":
            return t**self.alpha
        if self.kind == "log":
            return np.log1p(t)
        return t / (1.0 + t)

    @property
    def label(self) -> str:
        return f"power(alpha={self.alpha:g})" if self.kind == "power" else self.kind

    @property
    def phi_at_infinity_infinite(self) -> bool:
        return self.kind in ("power", "log")

    @property
    def value_at_infinity(self) -> float:
        return math.inf if self.phi_at_infinity_infinite else 1.0

    @property
    def phi_over_t_vanishes(self) -> bool:
        """Whether ``phi(t)/t -> 0`` as ``t -> inf``."""
        return not (self.kind == "power" and self.alpha == 1)

    @property
    def slope_at_zero(self) -> float:
        """``phi'(0+)``, possibly infinite."""
        if self.kind == "power" and self.alpha < 1:
            return math.inf
        return 1.0

    def is_valid(self, lo: float = 1e-6, hi: float = 1e6, n: int = 400) -> bool:
        if self(0.0) != 0:
            return False
        t = np.geomspace(lo, hi, n)
        vals = self(t)
        slopes = np.diff(vals) / np.diff(t)
        return bool(
            np.all(np.diff(vals) > 0)
            and np.all(np.diff(slopes) <= 1e-9 * np.maximum(1.0, np.abs(slopes[:-1])))
        )


_KINDS = ("L1", "Linf", "L1capLinf", "L1plusLinf", "Orlicz", "Lorentz", "Marcinkiewicz")


@dataclass(frozen=True)
class NormSpec:
    kind: str
    orlicz: OrliczFunction | None = None
    weight: ConcaveWeight | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown norm kind {self.kind!r}")
        needs_orlicz = self.kind == "Orlicz"
        needs_weight = self.kind in ("Lorentz", "Marcinkiewicz")
        if needs_orlicz != (self.orlicz is not None) or needs_weight != (self.weight is not None):
            raise ValueError(f"wrong parameters for norm kind {self.kind}")

    @property
    def label(self) -> str:
        if self.orlicz is not None:
            return f"Orlicz[{self.orlicz.label}]"
        if self.weight is not None:
            return f"{self.kind}[{self.weight.label}]"
        return self.kind


def norm_l1_cap_linf(f: TailedFunction) -> float:
    return max(norm_lp(f, 1), norm_lp(f, math.inf))


def norm_l1_plus_linf(f: TailedFunction) -> float:
    """``inf{||g||_1 + ||h||_inf : f = g + h}``, equal to ``int_0^1 f*``."""
    return cumulative(rearrange(f), 1.0)


def luxemburg_norm(f: TailedFunction, phi: OrliczFunction, tol: float = 1e-12) -> float:
    """Luxemburg norm ``inf{a > 0 : sum_i w_i Phi(|f_i|/a) <= 1}`` by bisection.

    Returns ``inf`` when ``f`` is non-zero on the infinite tail, since then
    the modular is infinite for every ``a``.

    Parameters
    ----------
    f : TailedFunction
    phi : OrliczFunction
    tol : float
        Absolute width of the final bracket.

    Raises
    ------
    RuntimeError
        If no bracket is found within 200 doublings (malformed ``phi``).
    """
    if tol <= 0:
        raise ValueError("tol must be > 0")
    if f.space.has_infinite_tail and f.tail_value != 0:
        return math.inf
    a_abs = np.abs(f.atom_values)
    mask = a_abs > 0
    if not mask.any():
        return 0.0
    a_abs, w = a_abs[mask], f.space.atom_weights[mask]

    def modular(a):
        return float(np.sum(w * phi(a_abs / a)))

    hi = max(1.0, float(a_abs.max()) * max(1.0, float(w.sum())))
    for _ in range(200):
        if modular(hi) <= 1:
            break
        hi *= 2
    else:
        raise RuntimeError("Luxemburg bracket expansion failed; check the Orlicz function")
    lo = min(tol, hi / 2)
    for _ in range(2000):
        if modular(lo) > 1:
            break
        lo /= 2
        if lo == 0:
            return 0.0
    else:
        raise RuntimeError("Luxemburg bracket contraction failed")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if modular(mid) <= 1:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def _lorentz_from_step(sf: StepFunction, phi: ConcaveWeight) -> float:
    if sf.tail_value > 0 and phi.phi_at_infinity_infinite:
        return math.inf
    t = np.concatenate([[0.0], sf.breakpoints])
    pt = phi(t)
    total = float(np.sum(sf.values * np.diff(pt)))
    if sf.tail_value > 0:
        total += sf.tail_value * (phi.value_at_infinity - float(pt[-1]))
    return total


def lorentz_norm(f: TailedFunction, phi: ConcaveWeight) -> float:
    """``int_0^inf f*(t) d phi(t)`` as a finite Stieltjes sum."""
    return _lorentz_from_step(rearrange(f), phi)


def _golden_max(fun, a: float, b: float, tol: float = 1e-10, maxiter: int = 200) -> tuple[float, float]:
    invphi = (math.sqrt(5) - 1) / 2
    c, d = b - invphi * (b - a), a + invphi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(maxiter):
        if b - a <= tol * max(1.0, abs(a)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(d)
    x = 0.5 * (a + b)
    return x, fun(x)


def _marcinkiewicz_from_step(sf: StepFunction, phi: ConcaveWeight, tol: float = 1e-10) -> float:
    tail = sf.tail_value
    if tail > 0 and phi.phi_over_t_vanishes:
        return math.inf
    if sf.breakpoints.size == 0:
        # f* is the constant tail; a positive tail reaches here only for phi(t) = t
        return tail

    def psi(s):
        return cumulative(sf, s) / phi(s)

    cands = []
    v1 = float(sf.values[0])
    cands.append(v1 / phi.slope_at_zero if math.isfinite(phi.slope_at_zero) else 0.0)
    total = cumulative(sf, sf.support_end)
    if tail > 0:
        # only phi(t) = t survives here: psi -> tail
        cands.append(tail)
    elif math.isfinite(phi.value_at_infinity):
        cands.append(total / phi.value_at_infinity)
    t = sf.breakpoints
    at_kinks = np.asarray(psi(t), dtype=float)
    cands.append(float(at_kinks.max()))

    # 64-point pre-grid on every inter-kink interval, then golden refinement
    # of the most promising intervals
    edges = np.concatenate([[0.0], t])
    frac = np.linspace(0.0, 1.0, 66)[1:-1]
    left, right = edges[:-1], edges[1:]
    grid = left[:, None] + (right - left)[:, None] * frac[None, :]
    vals = np.asarray(psi(grid.ravel()), dtype=float).reshape(grid.shape)
    best_grid = vals.max(axis=1)
    cands.append(float(best_grid.max()))
    for i in np.argsort(-best_grid)[:8]:
        j = int(np.argmax(vals[i]))
        step = (right[i] - left[i]) * (frac[1] - frac[0])
        a = max(left[i], grid[i, j] - step)
        b = min(right[i], grid[i, j] + step)
        if b > a:
            _, fx = _golden_max(lambda s: float(psi(s)), a, b, tol)
            cands.append(fx)
    return max(cands)


def marcinkiewicz_norm(f: TailedFunction, phi: ConcaveWeight, tol: float = 1e-10) -> float:
    """``sup_{s > 0} phi(s)^{-1} int_0^s f*``, possibly ``inf``."""
    return _marcinkiewicz_from_step(rearrange(f), phi, tol)


def space_excludes_one(spec: NormSpec, space: TailedMeasureSpace) -> bool:
    """Whether the constant ``1`` lies outside the space ``E`` given by ``spec``.

    For a symmetric ``E`` on an infinite measure space this is exactly the
    condition ``E`` is contained in R_mu.
    """
    if not space.has_infinite_tail:
        raise ValueError("the criterion concerns infinite measure spaces only")
    if spec.kind in ("Orlicz", "L1", "L1capLinf"):
        return True
    if spec.kind in ("Linf", "L1plusLinf"):
        return False
    if spec.kind == "Lorentz":
        return spec.weight.phi_at_infinity_infinite
    return spec.weight.phi_over_t_vanishes


def compute_norm(f: TailedFunction, spec: NormSpec, tol: float = 1e-12) -> float:
    if spec.kind == "L1":
        return norm_lp(f, 1)
    if spec.kind == "Linf":
        return norm_lp(f, math.inf)
    if spec.kind == "L1capLinf":
        return norm_l1_cap_linf(f)
    if spec.kind == "L1plusLinf":
        return norm_l1_plus_linf(f)
    if spec.kind == "Orlicz":
        return luxemburg_norm(f, spec.orlicz, tol)
    if spec.kind == "Lorentz":
        return lorentz_norm(f, spec.weight)
    return marcinkiewicz_norm(f, spec.weight)


_SIMPLE = {
    "l1": "L1",
    "linf": "Linf",
    "l1caplinf": "L1capLinf",
    "l1pluslinf": "L1plusLinf",
}


def _parse_weight(arg: str) -> ConcaveWeight:
    arg = arg.strip().lower()
    if arg in ("sqrt", ""):
        return ConcaveWeight("power", 0.5)
    if arg in ("t", "id", "linear"):
        return ConcaveWeight("power", 1.0)
    if arg in ("log", "saturating"):
        return ConcaveWeight(arg)
    m = re.fullmatch(r"(?:power|alpha)=([0-9.eE+-]+)", arg)
    if m:
        return ConcaveWeight("power", float(m.group(1)))
    raise ValueError(f"unknown concave weight {arg!r}")


def _parse_orlicz(arg: str) -> OrliczFunction:
    arg = arg.strip().lower()
    if arg in ("exp", "linlog"):
        return OrliczFunction(arg)
    m = re.fullmatch(r"(?:p|power)=([0-9.eE+-]+)", arg)
    if m:
        return OrliczFunction("power", float(m.group(1)))
    raise ValueError(f"unknown Orlicz function {arg!r}")


def parse_norm_spec(text: str) -> NormSpec:
    """Parse strings such as ``"l1"``, ``"orlicz:p=2"``, ``"lorentz:sqrt"``,
    ``"marcinkiewicz:power=0.3"`` or ``"lorentz:log"``."""
    head, _, arg = text.strip().partition(":")
    key = head.lower()
    if key in _SIMPLE and not arg:
        return NormSpec(_SIMPLE[key])
    if key == "orlicz":
        return NormSpec("Orlicz", orlicz=_parse_orlicz(arg))
    if key == "lorentz":
        return NormSpec("Lorentz", weight=_parse_weight(arg))
    if key == "marcinkiewicz":
        return NormSpec("Marcinkiewicz", weight=_parse_weight(arg))
    raise ValueError(f"cannot parse norm spec {text!r}")
