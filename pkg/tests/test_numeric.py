import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from posa.numeric import (AT_LEAST_3, DegreeSupport, NoRootError, RootNotBracketed,
                          bisect_newton, conditioned_mean, critical_constants, d_coeff,
                          d_series, d_taylor, exponent_functions, expand_bracket,
                          log_c_nm, log_double_factorial, log_end_ratio, log_tail_exp,
                          model_params, solve_lambda, split_entropy, tail_exp, thresholds,
                          trunc_poisson_stats)

mp.mp.dps = 40


def mp_tail(k, x):
    x = mp.mpf(x)
    if x > 1:
        return mp.e**x - sum(x**j / mp.factorial(j) for j in range(k))
    # direct series from x^k/k!; the complement cancels badly at small x
    return sum(x**j / mp.factorial(j) for j in range(k, k + 60))


# frozen from the mpmath evaluation in test_eps0_matches_mpmath
EPS0_AT_LSS = 0.0117472
LSS = 4.789767956


# -- tail_exp ------------------------------------------------------------------

def test_tail_exp_small_values():
    assert tail_exp(1, 1.0) == pytest.approx(math.e - 1, rel=1e-15)
    assert tail_exp(3, 0.0) == 0.0
    assert tail_exp(0, 2.5) == pytest.approx(math.exp(2.5), rel=1e-15)
    assert tail_exp(3, 1.0) == pytest.approx(0.218281828459045, rel=1e-13)


@pytest.mark.parametrize("k", [0, 1, 2, 3, 4, 7])
@pytest.mark.parametrize("x", [1e-6, 0.3, 2.0, 3.0, 4.79, 12.0, 40.0])
def test_tail_exp_against_mpmath(k, x):
    assert tail_exp(k, x) == pytest.approx(float(mp_tail(k, x)), rel=1e-12)


@given(st.integers(1, 12), st.floats(0.0, 50.0))
def test_tail_recursion(k, x):
    # the subtraction is done in extended precision to avoid cancellation
    with mp.workdps(800):
        y = mp.mpf(x)
        rhs = mp_tail(k - 1, y) - y ** (k - 1) / mp.factorial(k - 1)
    assert tail_exp(k, x) == pytest.approx(float(rhs), rel=1e-12, abs=1e-300)


@pytest.mark.parametrize("x", np.linspace(0.5, 20, 20))
def test_tail_derivative(x):
    h = 1e-6 * max(1.0, x)
    fd = (tail_exp(3, x + h) - tail_exp(3, x - h)) / (2 * h)
    assert fd == pytest.approx(tail_exp(2, x), rel=1e-6)
    assert tail_exp(3, x, deriv=1) == pytest.approx(tail_exp(2, x), rel=1e-14)


def test_log_tail_big_argument():
    # e^800 overflows; the log form must not
    assert log_tail_exp(3, 800.0) == pytest.approx(float(mp.log(mp_tail(3, 800))), rel=1e-14)
    assert log_tail_exp(3, 1e-3) == pytest.approx(float(mp.log(mp_tail(3, "1e-3"))), rel=1e-10)


def test_support_parse():
    assert DegreeSupport.parse(">=3") == AT_LEAST_3
    d = DegreeSupport.parse("3,4")
    assert d.is_finite and d.max_degree == 4
    lam = 2.0
    assert d.f(lam) == pytest.approx(lam**3 / 6 + lam**4 / 24)
    assert d.f(lam, 1) == pytest.approx(lam**2 / 2 + lam**3 / 6)
    assert d.f(lam, 2) == pytest.approx(lam + lam**2 / 2)


# -- roots ---------------------------------------------------------------------

def test_bisect_newton_sqrt2():
    r = bisect_newton(lambda x: x * x - 2, 0.0, 2.0, dfunc=lambda x: 2 * x,
                      width=1e-8, ftol=1e-14)
    assert r == pytest.approx(math.sqrt(2), abs=1e-14)


def test_bracket_errors():
    with pytest.raises(RootNotBracketed):
        bisect_newton(lambda x: x * x + 1, -1.0, 1.0)
    with pytest.raises(RootNotBracketed):
        expand_bracket(lambda x: -1.0, 0.0, 1.0, cap=100)


# -- conditioned Poisson -------------------------------------------------------

def test_solve_lambda_at_critical_mean():
    assert solve_lambda(5.323132) == pytest.approx(4.789771, abs=1e-5)


def test_solve_lambda_near_three():
    lam = solve_lambda(3 + 1e-6)
    assert 0 < lam < 1e-4
    # mean = 3 + lam/4 + O(lam^2)
    assert lam == pytest.approx(4e-6, rel=1e-3)


@pytest.mark.parametrize("c", [3.1, 4.0, 5.4, 6.0, 8.0, 12.0])
def test_solve_lambda_round_trip(c):
    lam = solve_lambda(c)
    assert abs(conditioned_mean(lam) - c) < 1e-10
    x = mp.mpf(lam)
    assert float(x * mp_tail(2, x) / mp_tail(3, x)) == pytest.approx(c, abs=1e-10)


def test_solve_lambda_finite_support():
    # D = {3,4}: mean = 3 + lam/(4+lam), so mean 3.5 needs lam = 4
    assert solve_lambda(3.5, "3,4") == pytest.approx(4.0, abs=1e-9)
    with pytest.raises(NoRootError):
        solve_lambda(4.0, "3,4")
    with pytest.raises(NoRootError):
        solve_lambda(3.0)


def test_stats_point_mass_limit():
    st0 = trunc_poisson_stats(0.0)
    assert st0.mean == 3 and st0.variance == 0
    st1 = trunc_poisson_stats(1e-7)
    assert st1.mean == pytest.approx(3, abs=1e-6)
    assert st1.variance < 1e-6


def test_stats_at_critical_tilt():
    assert trunc_poisson_stats(4.789771).mean == pytest.approx(5.323132, abs=1e-5)


@pytest.mark.parametrize("lam", [0.5, 2.0, 4.79, 9.0])
def test_stats_against_mpmath(lam):
    x = mp.mpf(lam)
    w = [x**j / mp.factorial(j) for j in range(3, 200)]
    z = sum(w)
    mean = sum(j * p for j, p in zip(range(3, 200), w)) / z
    var = sum(j * j * p for j, p in zip(range(3, 200), w)) / z - mean**2
    st_ = trunc_poisson_stats(lam)
    assert st_.mean == pytest.approx(float(mean), rel=1e-12)
    assert st_.variance == pytest.approx(float(var), rel=1e-9)
    # eta = E[Z(Z-1)] / (2 E[Z])... checked through its definition
    fz = sum(j * (j - 1) * p for j, p in zip(range(3, 200), w)) / z
    assert st_.factorial2 == pytest.approx(float(fz), rel=1e-11)


def test_stats_monte_carlo():
    rng = np.random.default_rng(12)
    lam = 2.0
    draws = rng.poisson(lam, size=4_000_000)
    z = draws[draws >= 3][:1_000_000]
    assert z.size == 1_000_000
    st_ = trunc_poisson_stats(lam)
    se = math.sqrt(st_.variance / z.size)
    assert abs(z.mean() - st_.mean) < 4 * se
    assert z.var() == pytest.approx(st_.variance, rel=0.01)


# -- thresholds ----------------------------------------------------------------

def test_delta_at_e_to_e4():
    n = math.exp(math.exp(4))
    th = thresholds(int(round(n)), 5.0)
    assert th.delta_n == pytest.approx(0.5, abs=1e-9)


def test_sigma_schedule():
    prev_rho = 1.0
    for e in range(3, 10):
        n = 10**e
        th = thresholds(n, 5.0)
        lnln = math.log(math.log(n))
        assert th.sigma_n * math.log(n) / lnln == pytest.approx(lnln)
        assert th.rho_n < prev_rho
        prev_rho = th.rho_n


def test_eps0_matches_mpmath():
    lam = mp.mpf(LSS)
    b = 27 * mp_tail(3, 8 * lam) / (2**10 * lam * mp_tail(2, lam))
    oracle = float(1 / (3 * mp.log(b)))
    assert oracle == pytest.approx(EPS0_AT_LSS, abs=1e-7)
    assert thresholds(1000, LSS).eps0 == pytest.approx(EPS0_AT_LSS, abs=1e-7)


def test_thresholds_invalid():
    with pytest.raises(ValueError):
        thresholds(10, 5.0)


# -- counting ------------------------------------------------------------------

def test_log_double_factorial():
    assert log_double_factorial(0) == 0.0
    assert math.exp(log_double_factorial(3)) == pytest.approx(15)
    assert math.exp(log_double_factorial(6)) == pytest.approx(10395)


def test_log_c_nm_decomposition():
    p = model_params(1000, 2700)
    st_ = trunc_poisson_stats(p.lam)
    base = log_double_factorial(p.m) + p.n * math.log(tail_exp(3, p.lam)) - 2 * p.m * math.log(p.lam)
    extra = -0.5 * math.log(2 * math.pi * p.n * st_.variance) - st_.eta - st_.eta**2 / 2
    assert log_c_nm(p) - base == pytest.approx(extra, abs=1e-9)


def test_log_c_nm_k4():
    # only K4 has 4 vertices, 6 edges and min degree 3
    p = model_params(4, 6)
    assert p.is_regular_boundary
    assert abs(log_c_nm(p)) < math.log(3)


def test_log_c_nm_linear_growth():
    c = 5.4
    vals = []
    for n in (1000, 2000, 10000):
        p = model_params(n, int(c * n / 2))
        vals.append((n, log_c_nm(p), p))
    # after removing the (2m-1)!! part the rest is linear in n up to O(log n)
    rest = [(n, v - log_double_factorial(p.m)) for n, v, p in vals]
    lam = vals[0][2].lam
    slope = math.log(tail_exp(3, lam)) - c * math.log(lam)
    for (n1, r1), (n2, r2) in zip(rest, rest[1:]):
        assert (r2 - r1) / (n2 - n1) == pytest.approx(slope, abs=1e-3)


# -- critical constants --------------------------------------------------------

def test_critical_constants_default():
    cc = critical_constants()
    assert cc.lambda_star_star == pytest.approx(4.789771, abs=1e-5)
    assert cc.c_star_star == pytest.approx(5.323132, abs=1e-5)
    assert cc.a_star == pytest.approx(2.6616, abs=1e-3)
    assert cc.lambda_star == pytest.approx(5.162717, abs=1e-5)
    assert cc.a_star == cc.c_star_star / 2


def test_critical_constants_against_mpmath():
    def end(x):
        return x**3 * mp_tail(1, x) / mp_tail(2, x) ** 2 - 1

    def peak(x):
        r = x * mp_tail(1, x) / mp_tail(2, x)
        return x**2 / mp_tail(2, x) * (1 + r) - 1

    lss = float(mp.findroot(end, 4.8))
    ls = float(mp.findroot(peak, 5.1))
    cc = critical_constants()
    assert cc.lambda_star_star == pytest.approx(lss, abs=1e-10)
    assert cc.lambda_star == pytest.approx(ls, abs=1e-10)
    assert cc.lambda_star_star == pytest.approx(LSS, abs=1e-8)


def test_critical_constants_three_four():
    cc = critical_constants("3,4")
    assert cc.a_star == pytest.approx(17 / 9, abs=0.02)


def test_end_ratio_decreasing():
    grid = np.linspace(0.5, 20, 200)
    vals = np.array([log_end_ratio(x) for x in grid])
    assert np.all(np.diff(vals) < 0)


# -- exponent functions --------------------------------------------------------

def test_split_entropy_values():
    assert split_entropy(3.0, 3.0) == 0.0
    assert split_entropy(3.0, 6.0) == 0.0
    assert split_entropy(2.0, 3.0) == pytest.approx(2 * math.log(2))
    with pytest.raises(ValueError):
        split_entropy(2.0, 5.0)


@given(st.floats(0.1, 100.0), st.floats(0.0, 1.0))
def test_split_entropy_bound(s, u):
    t = s * (1 + u)
    h = split_entropy(s, t)
    assert -1e-12 <= h <= s * math.log(2) + 1e-9
    if abs(u - 0.5) < 1e-12:
        assert h == pytest.approx(s * math.log(2))


def test_h2_end_value():
    ef = exponent_functions(LSS)
    assert abs(ef.h2(2.0)) < 1e-8
    for lam in (3.0, 5.0, 7.0):
        ef = exponent_functions(lam)
        x = mp.mpf(lam)
        want = float(mp.log(x**3 * mp_tail(1, x) / mp_tail(2, x) ** 2))
        assert ef.h2(2.0) == pytest.approx(want, abs=1e-12)
        assert ef.end_value() == pytest.approx(want, abs=1e-12)


@pytest.mark.parametrize("lam", [5.0, 5.33, 6.0])
def test_h1_unimodal(lam):
    ef = exponent_functions(lam)
    x = np.linspace(1e-3, 2.0, 1000)
    y = ef.h1(x)
    signs = np.sign(np.diff(y))
    assert np.count_nonzero(signs[1:] != signs[:-1]) == 1
    step = x[1] - x[0]
    assert abs(x[np.argmax(y)] - ef.x_star) <= step
    assert ef.h1(ef.x_star) == pytest.approx(ef.h1_peak(), abs=1e-12)


@pytest.mark.parametrize("lam", [2.0, 5.0, 9.0])
def test_h2_affine(lam):
    x = np.linspace(0.01, 2.0, 50)
    y = exponent_functions(lam).h2(x)
    assert np.max(np.abs(np.diff(y, 2))) < 1e-12


@given(st.floats(0.5, 30.0), st.floats(1.001, 1.999))
def test_h1_is_h2_plus_entropy(lam, x):
    ef = exponent_functions(lam)
    assert ef.h1(x) == pytest.approx(ef.h2(x) + split_entropy(1.0, x), abs=1e-10)


@given(st.floats(0.5, 30.0))
def test_x_star_range(lam):
    ef = exponent_functions(lam)
    if ef.r > 2:
        assert 5 / 3 < ef.x_star < 2


# -- D(lambda) -----------------------------------------------------------------

def test_d_coefficients():
    assert d_coeff(4) == -2
    assert d_coeff(5) == -10
    assert all(d_coeff(j) < 0 for j in range(4, 65))
    assert d_series(0.0) == 0.0


def test_d_series_normalisation():
    # the coefficients scale with 1/j!, checked against an exact expansion
    x = mp.mpf(1)
    ser = mp.taylor(lambda y: (3 - y) * mp.e ** (2 * y) - (6 + y**2) * mp.e**y + y + 3, 0, 12)
    for j in range(4, 13):
        assert float(ser[j] * mp.factorial(j)) == pytest.approx(d_coeff(j), abs=1e-20 + 1e-9)
    for lam in (0.5, 2.0, 5.0):
        assert d_taylor(lam) == pytest.approx(d_series(lam), rel=1e-10)
        assert d_series(lam) < 0
    del x


@settings(max_examples=50)
@given(st.floats(0.01, 30.0))
def test_d_series_negative(lam):
    assert d_series(lam) < 0
