"""Cesaro and Besicovitch-weighted ergodic averages of DS operators.

Also: truncated maximal functions with the weak (1,1) checks they satisfy,
the bounded-weight decomposition identity used to pass from plain to
weighted averages, and finite-horizon witnesses of almost uniform
convergence (:func:`egorov_certify`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .ds_operator import DSOperator, modulus
from .measure_model import TailedFunction, distribution, norm_lp

__all__ = [
    "TrigPolynomial",
    "Perturbation",
    "BesicovitchSequence",
    "AveragesTrace",
    "EgorovCertificate",
    "WeakTypeCheck",
    "PerturbationReport",
    "cesaro_avg",
    "weighted_avg",
    "averages_trace",
    "maximal_fn",
    "check_weak11",
    "check_weighted_weak11",
    "decomposition_identity_residual",
    "besicovitch_defect",
    "limit_candidate",
    "egorov_certify",
    "au_perturbation_check",
]


@dataclass(frozen=True, eq=False)
class TrigPolynomial:
    """``P(k) = sum_j z_j lambda_j**k`` with unimodular ``lambda_j``."""

    coefficients: np.ndarray
    frequencies: np.ndarray

    def __post_init__(self):
        z = np.atleast_1d(np.asarray(self.coefficients, dtype=complex))
        lam = np.atleast_1d(np.asarray(self.frequencies, dtype=complex))
        if z.size != lam.size or z.size < 1:
            raise ValueError("need as many coefficients as frequencies, at least one")
        if np.any(np.abs(np.abs(lam) - 1) > 1e-12):
            raise ValueError("frequencies must lie on the unit circle")
        z.setflags(write=False)
        lam.setflags(write=False)
        object.__setattr__(self, "coefficients", z)
        object.__setattr__(self, "frequencies", lam)

    @classmethod
    def constant(cls, c: complex = 1.0) -> "TrigPolynomial":
        return cls([c], [1.0])

    @classmethod
    def character(cls, lam: complex, z: complex = 1.0) -> "TrigPolynomial":
        return cls([z], [lam])

    def __call__(self, k) -> np.ndarray:
        k = np.asarray(k)
        # lambda**k through the angle keeps |lambda**k| = 1 for large k
        theta = np.angle(self.frequencies)
        phase = np.exp(1j * np.multiply.outer(k, theta))
        return phase @ self.coefficients

    @property
    def sup_bound(self) -> float:
        return float(np.sum(np.abs(self.coefficients)))


@dataclass(frozen=True)
class Perturbation:
    """Decaying additive perturbation: ``zero``, ``harmonic`` ``c/(k+1)``
    or ``geometric`` ``c*r**k`` with ``|r| < 1``."""

    kind: str = "zero"
    c: complex = 0.0
    r: complex = 0.0

    def __post_init__(self):
        if self.kind not in ("zero", "harmonic", "geometric"):
            raise ValueError(f"unknown perturbation {self.kind!r}")
        if self.kind == "geometric" and not abs(self.r) < 1:
            raise ValueError("geometric perturbation needs |r| < 1")

    def __call__(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        if self.kind == "zero":
            return np.zeros(k.shape, dtype=complex)
        if self.kind == "harmonic":
            return complex(self.c) / (k + 1.0)
        return complex(self.c) * complex(self.r) ** k

    @property
    def sup(self) -> float:
        return 0.0 if self.kind == "zero" else abs(self.c)

    def defect_bound(self, n: int) -> float:
        """Upper bound for ``(1/n) sum_{k<n} |perturbation(k)|``."""
        if self.kind == "zero":
            return 0.0
        if self.kind == "harmonic":
            return abs(self.c) * (1.0 + math.log(n)) / n
        return abs(self.c) / (n * (1.0 - abs(self.r)))


@dataclass(frozen=True, eq=False)
class BesicovitchSequence:
    """``beta_k = P(k) + perturbation(k)`` with a declared bound ``C >= sup |beta_k|``.

    When ``bound`` is omitted it is ``sum |z_j| + sup |perturbation|``.
    """

    base: TrigPolynomial
    perturbation: Perturbation = field(default_factory=Perturbation)
    bound: float | None = None

    def __post_init__(self):
        auto = self.base.sup_bound + self.perturbation.sup
        C = auto if self.bound is None else float(self.bound)
        if not C > 0:
            raise ValueError("the bound C must be > 0")
        object.__setattr__(self, "bound", C)

    @classmethod
    def ones(cls) -> "BesicovitchSequence":
        return cls(TrigPolynomial.constant(1.0))

    def __call__(self, k) -> np.ndarray:
        return self.base(k) + self.perturbation(k)

    def values(self, n: int) -> np.ndarray:
        """``beta_0, ..., beta_{n-1}``, checking the bound on this horizon."""
        beta = self(np.arange(n))
        if n and np.abs(beta).max() > self.bound * (1 + 1e-12):
            raise ValueError("declared bound C is exceeded on the evaluation horizon")
        return beta


def _beta_values(beta, n: int) -> tuple[np.ndarray | None, float]:
    """Weights and a bound C; ``beta=None`` means the constant sequence 1."""
    if beta is None:
        return None, 1.0
    if isinstance(beta, BesicovitchSequence):
        vals, C = beta.values(n), beta.bound
    else:
        vals = np.asarray(beta, dtype=complex).ravel()
        if vals.size < n:
            raise ValueError(f"need {n} weights, got {vals.size}")
        vals = vals[:n]
        C = float(np.abs(vals).max(initial=0.0)) or 1.0
    # all-ones weights take the unweighted path so the results agree bit for bit
    return (None, C) if np.all(vals == 1) else (vals, C)


def _powers(T: DSOperator, f: TailedFunction, n: int):
    """Yield ``(k, atoms, tail)`` for ``T^k f``, ``k = 0..n-1``."""
    K, b, eta = T.kernel, T.tail_injection, T.tail_coeff
    v = np.array(f.atom_values, dtype=complex)
    t = complex(f.tail_value)
    for k in range(n):
        yield k, v, t
        if k + 1 < n:
            v = K @ v + b * t
            t = eta * t


@dataclass(frozen=True, eq=False)
class AveragesTrace:
    """Averages ``f_n`` (Cesaro or weighted) recorded at increasing ``ns``."""

    ns: tuple
    functions: tuple
    operator: DSOperator | None = None
    weights: BesicovitchSequence | None = None
    source: TailedFunction | None = None

    def __post_init__(self):
        ns = tuple(int(n) for n in self.ns)
        if len(ns) != len(self.functions):
            raise ValueError("ns and functions differ in length")
        if any(b <= a for a, b in zip(ns, ns[1:])):
            raise ValueError("index set must be strictly increasing")
        object.__setattr__(self, "ns", ns)
        object.__setattr__(self, "functions", tuple(self.functions))

    def __len__(self):
        return len(self.ns)

    @property
    def last(self) -> TailedFunction:
        return self.functions[-1]


def averages_trace(
    T: DSOperator, f: TailedFunction, ns: Sequence[int], beta=None
) -> AveragesTrace:
    """``B_n(T) f = (1/n) sum_{k<n} beta_k T^k f`` for every ``n`` in ``ns``.

    ``beta=None`` gives the Cesaro averages ``A_n(T) f``.  Powers are formed
    by repeated application, never by diagonalization.
    """
    ns = sorted(set(int(n) for n in ns))
    if not ns or ns[0] < 1:
        raise ValueError("ns must be non-empty positive integers")
    n_max = ns[-1]
    weights, _ = _beta_values(beta, n_max)
    wanted = set(ns)
    sv = np.zeros(f.space.n_atoms, dtype=complex)
    st = 0j
    out = []
    for k, v, t in _powers(T, f, n_max):
        c = 1.0 if weights is None else weights[k]
        sv = sv + c * v
        st = st + c * t
        if k + 1 in wanted:
            out.append(TailedFunction(f.space, sv / (k + 1), st / (k + 1)))
    return AveragesTrace(tuple(ns), tuple(out), T, beta, f)


def weighted_avg(T: DSOperator, f: TailedFunction, beta, n: int) -> TailedFunction:
    return averages_trace(T, f, [n], beta).last


def cesaro_avg(T: DSOperator, f: TailedFunction, n: int) -> TailedFunction:
    return averages_trace(T, f, [n]).last


def _maximal(T: DSOperator, f: TailedFunction, N: int, weights=None) -> TailedFunction:
    if N < 1:
        raise ValueError("N must be >= 1")
    sv = np.zeros(f.space.n_atoms, dtype=complex)
    st = 0j
    mv = np.zeros(f.space.n_atoms)
    mt = 0.0
    for k, v, t in _powers(T, f, N):
        c = 1.0 if weights is None else weights[k]
        sv = sv + c * v
        st = st + c * t
        mv = np.maximum(mv, np.abs(sv) / (k + 1))
        mt = max(mt, abs(st) / (k + 1))
    return TailedFunction(f.space, mv, mt)


def maximal_fn(T: DSOperator, f: TailedFunction, N: int) -> TailedFunction:
    """Truncated maximal function ``max_{1 <= n <= N} |A_n(T) f|``."""
    return _maximal(T, f, N)


@dataclass(frozen=True)
class WeakTypeCheck:
    lhs: float
    rhs: float
    ok: bool


def _require_tail_free(f: TailedFunction):
    if f.tail_value != 0:
        raise ValueError("weak type checks need an L1 function (tail value 0)")


def check_weak11(T: DSOperator, f: TailedFunction, lam: float, N: int, tol: float = 1e-12) -> WeakTypeCheck:
    """``mu{max_{n<=N} A_n(T)|f| > lam} <= ||f||_1 / lam`` for positive ``T``.

    Truncating the sup to ``n <= N`` only shrinks the left side, so the
    inequality must hold for every ``N``.
    """
    if not T.is_positive:
        raise ValueError("check_weak11 needs a positive operator; pass modulus(T)")
    if lam <= 0:
        raise ValueError("lam must be > 0")
    _require_tail_free(f)
    lhs = distribution(_maximal(T, abs(f), N), lam)
    rhs = norm_lp(f, 1) / lam
    return WeakTypeCheck(lhs, rhs, lhs <= rhs + tol)


def check_weighted_weak11(
    T: DSOperator, f: TailedFunction, beta, lam: float, N: int, tol: float = 1e-12
) -> WeakTypeCheck:
    """``mu{max_{n<=N} |B_n(|T|)|f|| > lam} <= 6 C ||f||_1 / lam``."""
    if lam <= 0:
        raise ValueError("lam must be > 0")
    _require_tail_free(f)
    weights, C = _beta_values(beta, N)
    lhs = distribution(_maximal(modulus(T), abs(f), N, weights), lam)
    rhs = 6.0 * C * norm_lp(f, 1) / lam
    return WeakTypeCheck(lhs, rhs, lhs <= rhs + tol)


def decomposition_identity_residual(T: DSOperator, f: TailedFunction, beta, n: int) -> float:
    """Sup-norm gap between ``B_n(T) f`` and its split into positive weights.

    The right side is
    ``(1/n) sum (Re b_k + C) T^k f + (i/n) sum (Im b_k + C) T^k f - C (1+i) A_n(T) f``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    weights, C = _beta_values(beta, n)
    if weights is None:
        weights = np.ones(n, dtype=complex)
    m = f.space.n_atoms
    acc = {key: [np.zeros(m, dtype=complex), 0j] for key in ("B", "re", "im", "A")}
    for k, v, t in _powers(T, f, n):
        bk = weights[k]
        for key, c in (("B", bk), ("re", bk.real + C), ("im", bk.imag + C), ("A", 1.0)):
            acc[key][0] = acc[key][0] + c * v
            acc[key][1] = acc[key][1] + c * t
    lhs_v, lhs_t = acc["B"][0] / n, acc["B"][1] / n
    rhs_v = (acc["re"][0] + 1j * acc["im"][0] - C * (1 + 1j) * acc["A"][0]) / n
    rhs_t = (acc["re"][1] + 1j * acc["im"][1] - C * (1 + 1j) * acc["A"][1]) / n
    return max(float(np.abs(lhs_v - rhs_v).max(initial=0.0)), abs(lhs_t - rhs_t))


def besicovitch_defect(beta, P: TrigPolynomial, n: int) -> float:
    """``(1/n) sum_{k<n} |beta_k - P(k)|``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k = np.arange(n)
    b = beta(k) if callable(beta) else np.asarray(beta, dtype=complex)[:n]
    return float(np.mean(np.abs(b - P(k))))


# -- almost uniform convergence witnesses ----------------------------------

FINITE_HORIZON_NOTE = (
    "finite-horizon witness: decay is asserted on the observed window only"
)


@dataclass(frozen=True)
class EgorovCertificate:
    exceptional_atoms: tuple
    tail_exceptional: bool
    exceptional_measure: float
    sup_decay: tuple
    eps: float
    tol: float
    limit_rule: str = "given"
    note: str = FINITE_HORIZON_NOTE

    @property
    def ok(self) -> bool:
        return self.exceptional_measure <= self.eps

    def as_dict(self) -> dict:
        return {
            "exceptional_atoms": list(self.exceptional_atoms),
            "tail_exceptional": self.tail_exceptional,
            "exceptional_measure": self.exceptional_measure,
            "sup_decay": [[n, d] for n, d in self.sup_decay],
            "eps": self.eps,
            "tol": self.tol,
            "limit_rule": self.limit_rule,
            "certified": self.ok,
            "note": self.note,
        }


def _orbit_mean(T: DSOperator, f: TailedFunction) -> TailedFunction | None:
    perm = T.permutation_map()
    if perm is None:
        return None
    n = perm.size
    out = np.zeros(n, dtype=complex)
    seen = np.zeros(n, dtype=bool)
    for start in range(n):
        if seen[start]:
            continue
        cycle = [start]
        seen[start] = True
        j = perm[start]
        while j != start:
            cycle.append(j)
            seen[j] = True
            j = perm[j]
        out[cycle] = f.atom_values[cycle].mean()
    tail = f.tail_value if T.tail_coeff == 1 else 0j
    return TailedFunction(f.space, out, tail)


def limit_candidate(trace: AveragesTrace) -> tuple[TailedFunction, str]:
    """Best available stand-in for the a.u. limit of a trace.

    Cesaro traces of a permutation converge to the mean over each cycle;
    otherwise the last recorded average is used.
    """
    if trace.weights is None and trace.operator is not None and trace.source is not None:
        lim = _orbit_mean(trace.operator, trace.source)
        if lim is not None:
            return lim, "orbit-mean"
    return trace.last, "last-element"


def egorov_certify(
    trace: AveragesTrace,
    limit: TailedFunction | None,
    eps: float,
    tol: float,
    limit_rule: str = "given",
) -> EgorovCertificate:
    """Finite-horizon witness that ``trace`` converges almost uniformly to ``limit``.

    Atoms whose deviation from ``limit`` over the last half of the window
    (``n >= n_max/2``) exceeds ``tol`` are declared exceptional, as is the
    tail when its values have not settled.  The certificate holds when the
    exceptional measure is at most ``eps``.  An all-exceptional certificate
    is a valid negative answer.
    """
    if not len(trace):
        raise ValueError("empty trace")
    if limit is None:
        limit, limit_rule = limit_candidate(trace)
    if not limit.space.same_as(trace.last.space):
        raise ValueError("limit lives on a different space")
    ns = np.asarray(trace.ns)
    dev_atoms = np.array([np.abs(g.atom_values - limit.atom_values) for g in trace.functions])
    dev_tail = np.array([abs(g.tail_value - limit.tail_value) for g in trace.functions])
    late = ns >= ns[-1] / 2
    d = dev_atoms[late].max(axis=0)
    bad = d > tol
    tail_bad = bool(limit.space.has_infinite_tail and dev_tail[late].max() > tol)
    measure = math.inf if tail_bad else float(limit.space.atom_weights[bad].sum())
    good_dev = dev_atoms[:, ~bad]
    decay = good_dev.max(axis=1, initial=0.0)
    if not tail_bad:
        decay = np.maximum(decay, dev_tail)
    return EgorovCertificate(
        exceptional_atoms=tuple(int(i) for i in np.flatnonzero(bad)),
        tail_exceptional=tail_bad,
        exceptional_measure=measure,
        sup_decay=tuple((int(n), float(x)) for n, x in zip(ns, decay)),
        eps=float(eps),
        tol=float(tol),
        limit_rule=limit_rule,
    )


@dataclass(frozen=True)
class PerturbationReport:
    """Outcome of :func:`au_perturbation_check`.

    ``hypothesis_ok`` is the proximity assumption; the certificates are
    only produced when it holds, so a hypothesis failure is never reported
    as a certification failure.
    """

    hypothesis_ok: bool
    max_gap: float
    approx_certificate: EgorovCertificate | None = None
    certificate: EgorovCertificate | None = None

    @property
    def certified(self) -> bool:
        return bool(
            self.hypothesis_ok
            and self.approx_certificate is not None
            and self.approx_certificate.ok
            and self.certificate.ok
        )


def au_perturbation_check(
    target: AveragesTrace,
    approx: AveragesTrace,
    eps: float,
    approx_limit: TailedFunction | None = None,
    tol: float = 1e-8,
    budget: float = 0.0,
) -> PerturbationReport:
    """Transfer a.u. convergence from ``approx`` to ``target``.

    If ``||b_n - a_n||_inf <= eps`` on the late window and ``a_n``
    converges a.u., then ``b_n`` stays within ``tol + 2 eps`` of the limit
    of ``a_n`` off the same small set.

    Parameters
    ----------
    target, approx : AveragesTrace
        ``{b_n}`` and ``{a_n}``, recorded at the same ``ns``.
    eps : float
        Sup-norm proximity bound.
    approx_limit : TailedFunction, optional
        Limit of ``a_n``; defaults to :func:`limit_candidate`.
    tol : float
        Convergence tolerance for ``a_n``.
    budget : float
        Allowed exceptional measure.
    """
    if target.ns != approx.ns:
        raise ValueError("traces must share their index set")
    ns = np.asarray(target.ns)
    late = ns >= ns[-1] / 2
    gaps = [b.sup_distance(a) for b, a, keep in zip(target.functions, approx.functions, late) if keep]
    gap = max(gaps)
    if gap > eps + 1e-12:
        return PerturbationReport(False, gap)
    rule = "given"
    if approx_limit is None:
        approx_limit, rule = limit_candidate(approx)
    a_cert = egorov_certify(approx, approx_limit, budget, tol, rule)
    b_cert = egorov_certify(target, approx_limit, budget, tol + 2 * eps, rule)
    return PerturbationReport(True, gap, a_cert, b_cert)
