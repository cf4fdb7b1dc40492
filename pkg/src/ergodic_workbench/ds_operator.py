"""Dunford-Schwartz operators on the tailed desk model.

An operator acts on a :class:`TailedFunction` by

    (Tf)_i  = sum_j K[i, j] f_j + b[i] * f_tail
    (Tf)_tail = eta * f_tail

so ``K`` is its action on L1, while ``b`` and ``eta`` describe how it acts on
the constant part living on the infinite tail.  Being a DS operator means
the two substochasticity conditions checked by :func:`verify_ds`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .measure_model import TailedFunction, TailedMeasureSpace, _complex, _pair
from .rearrangement import majorizes

__all__ = [
    "DSOperator",
    "DSReport",
    "verify_ds",
    "apply",
    "modulus",
    "adjoint",
    "extend_from_l1",
    "check_majorization_contract",
    "random_ds_operator",
    "operator_to_json",
    "operator_from_json",
]

MAX_ATOMS = 512


@dataclass(frozen=True, eq=False)
class DSOperator:
    kernel: np.ndarray
    tail_injection: np.ndarray | None = None
    tail_coeff: complex = 1.0

    def __post_init__(self):
        K = np.array(self.kernel, dtype=complex)
        if K.ndim != 2 or K.shape[0] != K.shape[1]:
            raise ValueError("kernel must be a square matrix")
        if K.shape[0] > MAX_ATOMS:
            raise ValueError(f"kernels are capped at {MAX_ATOMS} atoms")
        b = (
            np.zeros(K.shape[0], dtype=complex)
            if self.tail_injection is None
            else np.array(self.tail_injection, dtype=complex).ravel()
        )
        if b.size != K.shape[0]:
            raise ValueError("tail injection length must match the kernel")
        K.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "kernel", K)
        object.__setattr__(self, "tail_injection", b)
        object.__setattr__(self, "tail_coeff", complex(self.tail_coeff))

    @property
    def n_atoms(self) -> int:
        return self.kernel.shape[0]

    @property
    def is_positive(self) -> bool:
        parts = np.concatenate([self.kernel.ravel(), self.tail_injection, [self.tail_coeff]])
        return bool(np.all(parts.imag == 0) and np.all(parts.real >= 0))

    @classmethod
    def identity(cls, n: int) -> "DSOperator":
        return cls(np.eye(n))

    @classmethod
    def permutation(cls, perm) -> "DSOperator":
        """``(Tf)_i = f_{perm[i]}``."""
        perm = np.asarray(perm, dtype=int)
        K = np.zeros((perm.size, perm.size))
        K[np.arange(perm.size), perm] = 1.0
        return cls(K)

    @classmethod
    def cyclic_shift(cls, n: int, r: int = 1) -> "DSOperator":
        """``(Tf)_i = f_{i - r mod n}``, so ``(1, 2, 3) -> (3, 1, 2)`` for ``r = 1``."""
        return cls.permutation((np.arange(n) - r) % n)

    def __call__(self, f: TailedFunction) -> TailedFunction:
        return apply(self, f)

    def permutation_map(self) -> np.ndarray | None:
        """The index map if the kernel is a 0/1 permutation matrix, else ``None``."""
        K = self.kernel
        if not (np.all((K == 0) | (K == 1))):
            return None
        if not (np.all(K.real.sum(axis=0) == 1) and np.all(K.real.sum(axis=1) == 1)):
            return None
        return np.argmax(K.real, axis=1)


@dataclass(frozen=True)
class DSReport:
    l1_ok: bool
    linf_ok: bool
    positive: bool
    max_column_ratio: float
    max_row_sum: float

    @property
    def ok(self) -> bool:
        return self.l1_ok and self.linf_ok

    def as_dict(self) -> dict:
        return {
            "l1_ok": self.l1_ok,
            "linf_ok": self.linf_ok,
            "positive": self.positive,
            "max_column_ratio": self.max_column_ratio,
            "max_row_sum": self.max_row_sum,
        }


def _check_shape(T: DSOperator, space: TailedMeasureSpace):
    if T.n_atoms != space.n_atoms:
        raise ValueError(f"operator has {T.n_atoms} atoms, space has {space.n_atoms}")


def verify_ds(T: DSOperator, space: TailedMeasureSpace, tol: float = 1e-12) -> DSReport:
    """Check the L1 (weighted column) and Linf (row) contraction conditions."""
    _check_shape(T, space)
    w = space.atom_weights
    absK = np.abs(T.kernel)
    col_ratio = (w @ absK) / w
    row = absK.sum(axis=1) + np.abs(T.tail_injection)
    max_col = float(col_ratio.max())
    max_row = float(row.max())
    return DSReport(
        l1_ok=max_col <= 1 + tol,
        linf_ok=max_row <= 1 + tol and abs(T.tail_coeff) <= 1 + tol,
        positive=T.is_positive,
        max_column_ratio=max_col,
        max_row_sum=max(max_row, abs(T.tail_coeff)),
    )


def apply(T: DSOperator, f: TailedFunction) -> TailedFunction:
    _check_shape(T, f.space)
    v = T.kernel @ f.atom_values + T.tail_injection * f.tail_value
    return TailedFunction(f.space, v, T.tail_coeff * f.tail_value)


def modulus(T: DSOperator) -> DSOperator:
    """Linear modulus ``|T|``; on a matrix kernel this is the entrywise modulus."""
    return DSOperator(np.abs(T.kernel), np.abs(T.tail_injection), abs(T.tail_coeff))


def adjoint(T: DSOperator, space: TailedMeasureSpace) -> DSOperator:
    """Adjoint for the pairing ``<u, v> = sum_i w_i u_i conj(v_i)`` on tail-free functions.

    ``K*[i, j] = (w_j / w_i) conj(K[j, i])``; the tail data become ``b* = 0``
    and ``eta* = conj(eta)``.
    """
    _check_shape(T, space)
    w = space.atom_weights
    Kstar = (T.kernel.conj().T * w[None, :]) / w[:, None]
    return DSOperator(Kstar, None, np.conj(T.tail_coeff))


def extend_from_l1(K, space: TailedMeasureSpace, tol: float = 1e-12) -> DSOperator:
    """Canonical extension of an L1 kernel to L1 + Linf (``b = 0``, ``eta = 1``).

    Raises
    ------
    ValueError
        If ``K`` violates either contraction condition.
    """
    T = DSOperator(K)
    report = verify_ds(T, space, tol)
    if not report.ok:
        raise ValueError(f"kernel is not Dunford-Schwartz: {report.as_dict()}")
    return T


def check_majorization_contract(T: DSOperator, f: TailedFunction, tol: float = 1e-12) -> bool:
    """Whether ``T f << f``."""
    return majorizes(f, apply(T, f), tol)


# -- generators ------------------------------------------------------------

def _scale_to_ds(A: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Scale a non-negative matrix so both contraction conditions hold."""
    row = A.sum(axis=1).max()
    col = ((w @ A) / w).max()
    s = max(row, col)
    return A / s if s > 0 else A


def random_ds_operator(
    space: TailedMeasureSpace,
    rng: np.random.Generator,
    kind: str = "positive",
    with_tail: bool = False,
) -> DSOperator:
    """Random DS operator for tests and suites.

    Parameters
    ----------
    kind : {"positive", "permutation", "birkhoff", "phase"}
        ``permutation`` and ``birkhoff`` only permute atoms of equal weight,
        so they stay measure preserving (resp. doubly stochastic) on
        non-uniform spaces.  ``phase`` multiplies a positive kernel by
        random unimodular factors.
    with_tail : bool
        Also draw random tail data ``b``, ``eta`` within the row budget.
    """
    w = space.atom_weights
    n = w.size
    if kind in ("permutation", "birkhoff"):
        n_perm = 1 if kind == "permutation" else int(rng.integers(2, 6))
        coeffs = rng.dirichlet(np.ones(n_perm))
        K = np.zeros((n, n))
        for c in coeffs:
            perm = np.arange(n)
            for val in np.unique(w):
                idx = np.flatnonzero(w == val)
                perm[idx] = rng.permutation(idx)
            K[np.arange(n), perm] += c
    elif kind in ("positive", "phase"):
        A = rng.random((n, n)) * (rng.random((n, n)) < rng.uniform(0.2, 1.0))
        K = _scale_to_ds(A, w)
        if kind == "phase":
            K = K * np.exp(2j * np.pi * rng.random((n, n)))
    else:
        raise ValueError(f"unknown generator kind {kind!r}")
    if not with_tail:
        return DSOperator(K)
    slack = np.clip(1.0 - np.abs(K).sum(axis=1), 0.0, None)
    b = slack * rng.random(n)
    eta = rng.random()
    if kind == "phase":
        b = b * np.exp(2j * np.pi * rng.random(n))
        eta = eta * np.exp(2j * np.pi * rng.random())
    return DSOperator(K, b, eta)


# -- JSON ------------------------------------------------------------------

def operator_to_json(T: DSOperator) -> dict:
    return {
        "K": [[_pair(z) for z in row] for row in T.kernel],
        "b": [_pair(z) for z in T.tail_injection],
        "eta": _pair(T.tail_coeff),
    }


def operator_from_json(doc) -> DSOperator:
    """Read ``{"K": [[..]], "b": [..], "eta": [re, im]}``; entries may be reals or pairs."""
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    K = [[_complex(z) for z in row] for row in doc["K"]]
    b = [_complex(z) for z in doc["b"]] if "b" in doc else None
    return DSOperator(K, b, _complex(doc.get("eta", 1.0)))
