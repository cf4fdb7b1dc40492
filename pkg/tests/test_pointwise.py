import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ergodic_workbench import (
    BesicovitchSequence,
    CyclicRotation,
    IntegerShift,
    OrbitEscapeError,
    Perturbation,
    TailedFunction,
    TrigPolynomial,
    besicovitch_defect,
    orbit_weighted_avg,
    oscillation,
    return_times_avg,
    split_r_mu,
    wiener_wintner_sweep,
)
from ergodic_workbench.pointwise_experiments import OrbitSeries, parse_system, window_oscillation

GOLDEN = np.exp(2j * np.pi * 0.381966)


def fourier_oracle(f_values, N, r, omega, m):
    """A_{qN} for lambda = exp(2 pi i m / N) on Z_N rotated by r (gcd(r, N) = 1).

    Reindexing k -> j = k r mod N turns one period of the orbit sum into a
    discrete Fourier coefficient of f shifted by omega.
    """
    r_inv = pow(r, -1, N)
    shifted = np.roll(np.asarray(f_values, dtype=complex), -omega)
    return N * np.fft.ifft(shifted)[(m * r_inv) % N] / N


def test_shift_indicator():
    sys = IntegerShift.for_horizon(0, 1000)
    f = TailedFunction.indicator(sys.space(), [sys.index(0)])
    ns = [1, 2, 10, 999, 1000]
    s = orbit_weighted_avg(sys, f, None, 0, ns)
    np.testing.assert_allclose(s.values, [1 / n for n in ns], rtol=1e-15)
    beta = BesicovitchSequence(TrigPolynomial.character(GOLDEN))
    s = orbit_weighted_avg(sys, f, beta, 0, ns)
    np.testing.assert_allclose(np.abs(s.values), [1 / n for n in ns], rtol=1e-14)


def test_cyclic_orbit_mean():
    sys = CyclicRotation(4, 1)
    s = orbit_weighted_avg(sys, np.array([1, 0, 1, 0]), None, 0, [4])
    assert s.values[0] == 0.5


def test_shift_escape_is_an_error():
    sys = IntegerShift(0, 100)
    with pytest.raises(OrbitEscapeError):
        orbit_weighted_avg(sys, np.zeros(100), None, 0, [101])
    with pytest.raises(OrbitEscapeError):
        sys.orbit(-1, 3)


def test_shift_rejects_nonzero_tail():
    sys = IntegerShift(0, 10)
    with pytest.raises(ValueError):
        orbit_weighted_avg(sys, TailedFunction(sys.space(), np.zeros(10), 1.0), None, 0, [5])


def test_oscillation_examples():
    ns = tuple(range(1, 1001))
    r = oscillation(OrbitSeries(0, ns, tuple(1 / n for n in ns)))
    assert r.delta_real == pytest.approx(0.001, rel=1e-12) and r.delta_imag == 0
    assert oscillation(OrbitSeries(0, (1, 2, 3, 4), (2j,) * 4)).delta == 0
    with pytest.raises(ValueError):
        oscillation(OrbitSeries(0, (1, 2), (0, 0)))


def test_sweep_zero_function():
    sys = CyclicRotation(11, 3)
    rows = wiener_wintner_sweep(sys, np.zeros(11), 0, np.exp(2j * np.pi * np.arange(8) / 8), [10, 100])
    assert all(r.report.delta == 0 and r.average == 0 for r in rows)


def test_sweep_shift_indicator_uniform_in_lambda():
    sys = IntegerShift.for_horizon(0, 10000)
    f = TailedFunction.indicator(sys.space(), [0])
    grid = np.exp(2j * np.pi * np.arange(64) / 64)
    for row in wiener_wintner_sweep(sys, f, 0, grid, [100, 1000, 10000]):
        assert row.report.delta <= 2 / (row.n / 2) + 1e-15


def test_sweep_cyclic_matches_fourier_oracle():
    N, r = 31, 7
    rng = np.random.default_rng(3)
    f = rng.uniform(-1, 1, N) + 1j * rng.uniform(-1, 1, N)
    sys = CyclicRotation(N, r)
    grid = np.exp(2j * np.pi * np.arange(N) / N)
    ns = [N * 10, N * 100]
    for row in wiener_wintner_sweep(sys, f, 5, grid, ns):
        m = int(round(np.angle(row.lam) / (2 * np.pi) * N)) % N
        assert abs(row.average - fourier_oracle(f, N, r, 5, m)) <= 1e-10
        assert row.report.delta <= 4 * N * np.abs(f).max() / row.n


def test_return_times_examples():
    p, q = 5, 7
    s1, s2 = CyclicRotation(p, 1), CyclicRotation(q, 1)
    f = TailedFunction.indicator(s1.space(), [0])
    g = TailedFunction.indicator(s2.space(), [0])
    series = return_times_avg(s1, f, s2, g, 0, 0, [35, 350, 3500])
    np.testing.assert_allclose(series.values, 1 / (p * q), rtol=1e-13)
    ones = TailedFunction.one(s2.space())
    rt = return_times_avg(s1, f, s2, ones, 2, 0, [40])
    assert rt.values == orbit_weighted_avg(s1, f, None, 2, [40]).values
    sh = IntegerShift.for_horizon(0, 500)
    chi = TailedFunction.indicator(sh.space(), [0])
    gv = np.random.default_rng(0).uniform(-3, 3, q)
    for n, v in zip(*_pairs(return_times_avg(sh, chi, s2, gv, 0, 0, [1, 10, 500]))):
        assert abs(v) <= np.abs(gv).max() / n + 1e-15


def _pairs(series):
    return series.ns, series.values


def test_parse_system():
    assert parse_system("cyclic:N=257,r=100") == CyclicRotation(257, 100)
    assert parse_system("shift:lo=0,size=10001") == IntegerShift(0, 10001)
    for bad in ("torus:N=3", "cyclic:N"):
        with pytest.raises(ValueError):
            parse_system(bad)


def test_window_oscillation():
    avgs = np.array([4, 3, 2, 1, 0.5, 0.25], dtype=complex)
    assert window_oscillation(avgs, 6).delta_real == pytest.approx(1.75)


@given(st.integers(2, 40), st.integers(1, 60), st.integers(0, 2**32 - 1))
def test_cyclic_error_bound(N, r, seed):
    rng = np.random.default_rng(seed)
    f = rng.uniform(-1, 1, N)
    sys = CyclicRotation(N, r)
    ns = list(range(1, 20 * N))
    s = orbit_weighted_avg(sys, f, None, 0, ns)
    orbit = sys.orbit(0, sys.period)
    mean, spread = f[orbit].mean(), np.ptp(f[orbit])
    for n, v in zip(s.ns, s.values):
        assert abs(v - mean) <= spread * N / n + 1e-12


@given(st.integers(2, 40), st.integers(0, 2**32 - 1), st.complex_numbers(max_magnitude=10))
def test_scaling_equivariance(N, seed, c):
    rng = np.random.default_rng(seed)
    f = rng.standard_normal(N)
    sys = CyclicRotation(N, 3)
    beta = BesicovitchSequence(TrigPolynomial([1, 0.5], [1, GOLDEN]))
    a = orbit_weighted_avg(sys, f, beta, 1, [5, 50])
    b = orbit_weighted_avg(sys, c * f, beta, 1, [5, 50])
    np.testing.assert_allclose(b.values, c * np.asarray(a.values), rtol=1e-12, atol=1e-12)


@given(st.integers(0, 2**32 - 1), st.sampled_from(["harmonic", "geometric"]))
def test_weighted_oscillation_follows_defect(seed, kind):
    rng = np.random.default_rng(seed)
    N = 29
    f = rng.uniform(-1, 1, N)
    sys = CyclicRotation(N, 11)
    P = TrigPolynomial([1, 0.5j], [np.exp(2j * np.pi * 3 / N), GOLDEN])
    beta = BesicovitchSequence(P, Perturbation(kind, 1.5, 0.5))
    ns = list(range(500, 2001))
    d_beta = oscillation(orbit_weighted_avg(sys, f, beta, 0, ns))
    d_poly = oscillation(orbit_weighted_avg(sys, f, BesicovitchSequence(P), 0, ns))
    k = np.arange(2000)
    running = np.cumsum(np.abs(beta(k) - P(k))) / (k + 1)
    defect = running[999:].max()
    assert running[-1] == pytest.approx(besicovitch_defect(beta, P, 2000), rel=1e-12)
    bound = 2 * np.abs(f).max() * defect + 1e-12
    assert d_beta.delta_real <= d_poly.delta_real + bound
    assert d_beta.delta_imag <= d_poly.delta_imag + bound


@given(st.integers(0, 2**32 - 1), st.floats(0.01, 1.0))
def test_truncation_residue_averages(seed, eps):
    rng = np.random.default_rng(seed)
    sys = IntegerShift.for_horizon(0, 400)
    f = TailedFunction(sys.space(), rng.standard_normal(sys.size) * (rng.random(sys.size) < 0.2))
    g, h = split_r_mu(f, eps)
    res = orbit_weighted_avg(sys, abs(f - g), None, 0, range(1, 401))
    assert max(abs(v) for v in res.values) <= eps
