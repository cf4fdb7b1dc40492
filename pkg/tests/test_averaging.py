import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ergodic_workbench import (
    BesicovitchSequence,
    DSOperator,
    Perturbation,
    TailedFunction,
    TailedMeasureSpace,
    TrigPolynomial,
    au_perturbation_check,
    averages_trace,
    besicovitch_defect,
    cesaro_avg,
    check_weak11,
    check_weighted_weak11,
    decomposition_identity_residual,
    distribution,
    egorov_certify,
    in_r_mu,
    maximal_fn,
    norm_lp,
    random_ds_operator,
    split_r_mu,
    weighted_avg,
)
from ergodic_workbench.averaging import AveragesTrace
from ergodic_workbench.suites import instance_rng, random_besicovitch, random_function, random_space

from conftest import functions

GOLDEN = np.exp(2j * np.pi * 0.381966)


def shift3(values=(3, 0, 0)):
    sp = TailedMeasureSpace.uniform(3)
    return DSOperator.cyclic_shift(3), TailedFunction(sp, values)


@st.composite
def instances(draw, kinds=("positive", "permutation", "birkhoff", "phase"), max_atoms=12):
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    space = random_space(rng, max_atoms)
    T = random_ds_operator(space, rng, draw(st.sampled_from(kinds)), with_tail=draw(st.booleans()))
    f = random_function(space, rng, tail=draw(st.booleans()))
    return T, f, rng


def test_cesaro_examples():
    T, f = shift3()
    assert cesaro_avg(T, f, 1).sup_distance(f) == 0
    assert cesaro_avg(DSOperator.identity(3), f, 17).sup_distance(f) < 1e-15
    np.testing.assert_allclose(cesaro_avg(T, f, 3).atom_values, [1, 1, 1], rtol=1e-15)


def test_weighted_examples():
    T, f = shift3((1, -2j, 0.5))
    I = DSOperator.identity(3)
    ones = BesicovitchSequence.ones()
    assert weighted_avg(T, f, ones, 11).sup_distance(cesaro_avg(T, f, 11)) == 0
    beta = BesicovitchSequence(TrigPolynomial.character(GOLDEN))
    n = 50
    expected = f.atom_values * (GOLDEN**n - 1) / (n * (GOLDEN - 1))
    np.testing.assert_allclose(weighted_avg(I, f, beta, n).atom_values, expected, atol=1e-13)
    one = BesicovitchSequence(TrigPolynomial.character(1.0))
    assert weighted_avg(I, f, one, 9).sup_distance(f) < 1e-15


def test_maximal_examples():
    T, f = shift3()
    np.testing.assert_allclose(maximal_fn(T, f, 3).atom_values, [3, 1.5, 1], rtol=1e-15)
    g = TailedFunction(f.space, [1, -4, 2j])
    np.testing.assert_array_equal(maximal_fn(DSOperator.identity(3), g, 9).atom_values, [1, 4, 2])
    np.testing.assert_array_equal(maximal_fn(T, g, 1).atom_values, [1, 4, 2])


def test_weak11_examples():
    sp = TailedMeasureSpace([0.5, 1, 2])
    f = TailedFunction(sp, [3, -1, 0.2])
    r = check_weak11(DSOperator.identity(3), f, 0.5, 10)
    assert r.ok and r.lhs == distribution(f, 0.5)
    z = TailedFunction.zero(sp)
    r = check_weak11(DSOperator.identity(3), z, 1.0, 5)
    assert r.ok and r.lhs == 0 and r.rhs == 0
    r = check_weighted_weak11(DSOperator.identity(3), f, None, 0.5, 10)
    assert r.ok and r.rhs == 6 * norm_lp(f, 1) / 0.5
    assert check_weighted_weak11(DSOperator.identity(3), z, None, 1.0, 5).ok


def test_weak11_preconditions():
    T, f = shift3()
    with pytest.raises(ValueError):
        check_weak11(DSOperator([[0, -1, 0], [1, 0, 0], [0, 0, 1]]), f, 1, 3)
    with pytest.raises(ValueError):
        check_weak11(T, TailedFunction(f.space, [1, 0, 0], 1), 1, 3)
    with pytest.raises(ValueError):
        check_weak11(T, f, 0, 3)


def test_decomposition_identity_zero_function():
    T, f = shift3()
    beta = BesicovitchSequence(TrigPolynomial.character(GOLDEN, 2 - 1j))
    assert decomposition_identity_residual(T, TailedFunction.zero(f.space), beta, 20) == 0


def test_besicovitch_defect_examples():
    P = TrigPolynomial([1, 0.5j], [1, GOLDEN])
    assert besicovitch_defect(BesicovitchSequence(P), P, 1000) == 0
    for n in (10, 100, 1000):
        b = BesicovitchSequence(P, Perturbation("harmonic", 0.7))
        assert besicovitch_defect(b, P, n) <= 0.7 * (1 + math.log(n)) / n * (1 + 1e-12)
        g = BesicovitchSequence(P, Perturbation("geometric", 2.0, -0.8))
        assert besicovitch_defect(g, P, n) <= 2.0 / (n * 0.2) * (1 + 1e-12)


def test_besicovitch_bound_enforced():
    with pytest.raises(ValueError):
        BesicovitchSequence(TrigPolynomial.constant(2.0), bound=1.0).values(3)
    with pytest.raises(ValueError):
        TrigPolynomial([1], [1.01])
    with pytest.raises(ValueError):
        Perturbation("geometric", 1.0, 1.0)


def test_egorov_constant_trace():
    sp = TailedMeasureSpace.uniform(3)
    f = TailedFunction(sp, [1, 2, 3])
    cert = egorov_certify(AveragesTrace((1, 2, 4), (f, f, f)), f, 0.1, 1e-12)
    assert cert.ok and cert.exceptional_measure == 0 and not cert.exceptional_atoms


def test_egorov_uniform_rate():
    sp = TailedMeasureSpace.uniform(4)
    lim = TailedFunction(sp, [1, 2, 3, 4])
    ns = (10, 100, 1000)
    trace = AveragesTrace(ns, tuple(lim + TailedFunction.one(sp) * (1 / n) for n in ns))
    cert = egorov_certify(trace, lim, 0.0, 2 / ns[-1])
    assert cert.ok and cert.exceptional_measure == 0


def test_egorov_cyclic_orbit():
    T, f = shift3()
    ns = list(range(1, 10001))
    trace = averages_trace(T, f, ns)
    lim = TailedFunction(f.space, [1, 1, 1])
    cert = egorov_certify(trace, lim, 0.0, 0.01)
    assert cert.exceptional_measure == 0
    assert all(d <= 4 / n + 1e-12 for n, d in cert.sup_decay)


def test_egorov_reports_failure():
    sp = TailedMeasureSpace.uniform(2)
    a = TailedFunction(sp, [0, 0])
    b = TailedFunction(sp, [1, 0])
    trace = AveragesTrace((1, 2, 3, 4), (a, b, a, b))
    cert = egorov_certify(trace, a, 0.5, 0.1)
    assert cert.exceptional_atoms == (0,) and cert.exceptional_measure == 1 and not cert.ok


def test_egorov_default_limit_is_orbit_mean():
    T, f = shift3()
    cert = egorov_certify(averages_trace(T, f, [1000, 2000]), None, 0.0, 1e-2)
    assert cert.limit_rule == "orbit-mean" and cert.ok


def test_perturbation_examples():
    T, f = shift3()
    ns = [100, 1000, 10000]
    a = averages_trace(T, f, ns)
    report = au_perturbation_check(a, a, 0.0, tol=1e-2)
    assert report.certified
    offset = TailedFunction(f.space, [0.05, 0.05, 0.05])
    b = AveragesTrace(tuple(ns), tuple(g + offset for g in a.functions))
    assert au_perturbation_check(b, a, 0.05, tol=1e-2).certified
    assert not au_perturbation_check(b, a, 0.01, tol=1e-2).hypothesis_ok


def test_perturbation_proof_pattern():
    # f = g + h with a small bounded h: averages of f stay close to those of g
    rng = np.random.default_rng(7)
    space = TailedMeasureSpace.uniform(16)
    T = random_ds_operator(space, rng, "permutation")
    f = TailedFunction(space, rng.standard_normal(16) * rng.exponential(1, 16))
    beta = BesicovitchSequence(TrigPolynomial([1, 0.5], [1, GOLDEN]))
    C = beta.bound
    delta = 0.3
    g, h = split_r_mu(f, delta / (3 * C))
    ns = [2000, 4000, 8000]
    bf, bg = averages_trace(T, f, ns, beta), averages_trace(T, g, ns, beta)
    report = au_perturbation_check(bf, bg, delta / 3, approx_limit=bg.last, tol=0.05)
    assert report.certified


@given(instances(), st.floats(-3, 3), st.floats(-3, 3))
def test_linearity(inst, a, b):
    T, f, rng = inst
    g = random_function(f.space, rng, tail=True)
    beta = random_besicovitch(rng)
    for avg in (lambda u: cesaro_avg(T, u, 13), lambda u: weighted_avg(T, u, beta, 13)):
        lhs = avg(f * a + g * b)
        rhs = avg(f) * a + avg(g) * b
        assert lhs.sup_distance(rhs) <= 1e-12 * (1 + norm_lp(f, math.inf) + norm_lp(g, math.inf)) * 10


@given(instances())
def test_weighted_with_ones_is_cesaro(inst):
    T, f, _ = inst
    assert weighted_avg(T, f, BesicovitchSequence.ones(), 20).sup_distance(cesaro_avg(T, f, 20)) == 0


@given(instances(), st.integers(1, 30))
def test_maximal_monotone_and_bounded(inst, N):
    T, f, _ = inst
    m1, m2 = maximal_fn(T, f, N), maximal_fn(T, f, N + 3)
    assert np.all(m2.atom_values.real >= m1.atom_values.real)
    assert norm_lp(m2, math.inf) <= norm_lp(f, math.inf) + 1e-12


@given(instances(kinds=("positive", "permutation", "birkhoff")), st.floats(0.05, 1.0))
def test_weak11_property(inst, frac):
    T, f, _ = inst
    f = TailedFunction(f.space, f.atom_values)
    lam = frac * max(norm_lp(f, math.inf), 1e-3)
    assert check_weak11(T, f, lam, 50).ok


@given(instances(), st.floats(0.05, 1.0))
def test_weighted_weak11_property(inst, frac):
    T, f, rng = inst
    f = TailedFunction(f.space, f.atom_values)
    lam = frac * max(norm_lp(f, math.inf), 1e-3)
    assert check_weighted_weak11(T, f, random_besicovitch(rng), lam, 50).ok


@given(instances(), st.integers(1, 100))
def test_decomposition_identity(inst, n):
    T, f, rng = inst
    beta = random_besicovitch(rng)
    scale = 1 + norm_lp(f, math.inf)
    assert decomposition_identity_residual(T, f, beta, n) <= 1e-12 * scale


def test_r_mu_limits_are_certified():
    for i in range(12):
        rng = instance_rng(2024, i)
        space = random_space(rng, 12)
        T = random_ds_operator(space, rng, ["positive", "permutation", "birkhoff"][i % 3])
        f = random_function(space, rng)
        trace = averages_trace(T, f, [2500, 5000, 7500, 10000])
        tol = 10 * norm_lp(f, math.inf) * space.n_atoms / 5000
        cert = egorov_certify(trace, None, 0.0, tol)
        assert cert.ok, (i, cert.as_dict())
        assert in_r_mu(limit := trace.last) and limit.tail_value == 0
