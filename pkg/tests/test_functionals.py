import math

import mpmath
import numpy as np
import pytest

from hardyverify.functionals import (CRITICAL, StabilityParams, c_p_constant,
                                     d_C, d_C_power, d_H, d_H_power, golden_section, lambda_constant,
                                     r_p, r_p_weighted, stability_constant, sup_over_R)
from hardyverify.manifold import ModelError, Region, euclidean, hyperbolic, sphere_area
from hardyverify.prober import CorpusSpec, generate_corpus


def grid_cp(p, n=1_000_000):
    """Independent brute-force oracle for c_p."""
    t = np.linspace(0.0, 0.5, n + 1)[1:]
    return float(np.min((1 - t) ** p - t ** p + p * t ** (p - 1)))


def test_c2_is_one():
    assert abs(c_p_constant(2.0) - 1.0) <= 1e-12


def test_c3_against_oracles():
    assert abs(c_p_constant(3.0) - (2 - math.sqrt(2))) <= 1e-12  # 1 - 3t + 6t^2 - 2t^3 at t = 1 - 1/sqrt 2
    assert abs(c_p_constant(3.0) - grid_cp(3.0)) <= 1e-6


def test_cp_continuity_and_domain():
    for p in (2.2, 3.5, 5.0):
        assert abs(c_p_constant(p) - c_p_constant(p + 1e-6)) <= 1e-4
    with pytest.raises(ValueError):
        c_p_constant(1.5)
    assert stability_constant(2.0) == pytest.approx(0.25, rel=1e-12)


def test_lambda_constant():
    assert lambda_constant(-1, 8, 2, 0) == 1.0
    assert lambda_constant(1, 8, 2, 0) == pytest.approx(25.0)
    with pytest.raises(ValueError):
        lambda_constant(0, 3, 2, -5)


def test_r2_weighted_is_half_square_distance(rng):
    z = rng.normal(size=100) + 1j * rng.normal(size=100)
    e = rng.normal(size=100) + 1j * rng.normal(size=100)
    np.testing.assert_allclose(r_p_weighted(2.0, z, e), 0.5 * np.abs(z - e) ** 2, rtol=1e-14, atol=1e-14)
    assert r_p_weighted(3.0, 0.0, 2.0) == pytest.approx(8 / 3)
    assert r_p(3.0, 1.5, 1.5) == pytest.approx(1.5)


def test_golden_section():
    x, v = golden_section(lambda s: (s - 0.3) ** 2, 0, 1)
    assert abs(x - 0.3) < 1e-8


def test_sup_over_R():
    R, v = sup_over_R(lambda R: math.exp(-math.log(R) ** 2))
    assert abs(R - 1.0) <= 1e-6 and v == pytest.approx(1.0)
    R, v = sup_over_R(lambda R: 3.0)
    assert v == 3.0
    with pytest.raises(ValueError):
        sup_over_R(lambda R: 0.0)
    with pytest.raises(ValueError):
        sup_over_R(lambda R: math.inf)


def simpson(fn, a, b, n=200_000):
    x = np.linspace(a, b, n + 1)
    y = fn(x)
    h = (b - a) / n
    return h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())


@pytest.fixture(scope="module")
def f1():
    return generate_corpus(CorpusSpec(seed=0, count=1, support=Region.annulus(0.2, 3.0)))[0]


@pytest.fixture(scope="module")
def fball():
    return generate_corpus(CorpusSpec(seed=0, count=1, support=Region.annulus(0.1, 0.95)))[0]


@pytest.mark.parametrize("N", [3, 4])
def test_d_H_trapezoid_oracle(f1, N):
    p, R = 2.0, 1.0
    kappa = (N - p) / p
    A = R ** kappa * f1.value(R)
    s0, s1 = f1.support.r0, f1.support.r1

    def g(r):
        return np.abs(f1.value(r) - A * r ** -kappa) ** p / np.abs(np.log(R / r)) ** p * r ** (N - 1 - p)

    eps = 1e-7  # step over the removable point
    inner = simpson(g, s0, R - eps) + simpson(g, R + eps, s1)
    c = abs(A) ** p
    # tails in u = log(R/r); in r the mass sits too close to 0 and infinity for quad
    tail = lambda u: c * abs(u) ** -p
    tails = float(mpmath.quad(tail, [math.log(R / s0), mpmath.inf])
                  + mpmath.quad(tail, [-mpmath.inf, math.log(R / s1)]))
    oracle = sphere_area(N) * (inner + tails)
    got = d_H_power(euclidean(N), f1, R, StabilityParams(p, 0.0, N)).value
    assert got == pytest.approx(oracle, rel=1e-4)


def test_d_C_trapezoid_oracle(fball):
    N, p, R = 3, 2.0, 1.0
    tau = math.exp(-1 / R)
    e = (p - 1) / p
    C = R ** e * fball.value(tau)
    s0, s1 = fball.support.r0, fball.support.r1

    def g(r):
        L = np.log(1 / r)
        return np.abs(fball.value(r) - L ** e * C) ** p / (np.abs(np.log(R * L)) ** p * r * L ** p)

    inner = simpson(g, s0, tau - 1e-7) + simpson(g, tau + 1e-7, s1)
    c = abs(C) ** p
    # tails in v = log(R log(1/r))
    tail = lambda v: c * abs(v) ** -p
    tails = float(mpmath.quad(tail, [math.log(R * math.log(1 / s0)), mpmath.inf])
                  + mpmath.quad(tail, [-mpmath.inf, math.log(R * math.log(1 / s1))]))
    oracle = sphere_area(N) * (inner + tails)
    got = d_C_power(euclidean(N), fball, R, StabilityParams(p, 0.0, N, CRITICAL)).value
    assert got == pytest.approx(oracle, rel=1e-4)


def test_distances_are_homogeneous(f1, fball):
    lam = 0.7 - 1.3j
    sp = StabilityParams(2.0, 0.0, 3)
    assert d_H(euclidean(3), f1.scaled(lam), 1.3, sp) == pytest.approx(abs(lam) * d_H(euclidean(3), f1, 1.3, sp),
                                                                       rel=1e-10)
    sc = StabilityParams(2.0, 0.0, 3, CRITICAL)
    assert d_C(euclidean(3), fball.scaled(lam), 0.8, sc) == pytest.approx(
        abs(lam) * d_C(euclidean(3), fball, 0.8, sc), rel=1e-10)


def test_trace_outside_support_and_non_euclidean(f1):
    sp = StabilityParams(2.0, 0.0, 3)
    # R outside the support: no trace term, finite value
    assert math.isfinite(d_H_power(euclidean(3), f1, 10.0, sp).value)
    assert d_H_power(hyperbolic(3), f1, 1.0, sp).value == math.inf
    assert math.isfinite(d_H_power(hyperbolic(3), f1, 50.0, sp).value)
    with pytest.raises(ModelError):
        d_C_power(hyperbolic(3), f1, 1.0, StabilityParams(2.0, 0.0, 3, CRITICAL))


def test_stability_params_validation():
    assert StabilityParams(2.0, 0.0, 4).violations() == []
    assert StabilityParams(1.5, 0.0, 4).violations()
    assert StabilityParams(2.0, 2.5, 4).violations()
    with pytest.raises(ValueError):
        StabilityParams(5.0, 0.0, 4).validate()


@pytest.mark.parametrize("p", [1.2, 2.0, 3.0, 4.0])
def test_r_p_accurate_near_diagonal(p, rng):
    mpmath.mp.dps = 50
    for _ in range(200):
        z = complex(*rng.normal(size=2))
        e = z + complex(*rng.normal(size=2)) * 10 ** rng.uniform(-12, -1)
        Z, E, P = mpmath.mpc(z), mpmath.mpc(e), mpmath.mpf(p)
        exact = abs(E) ** P / P + (P - 1) / P * abs(Z) ** P - abs(Z) ** (P - 2) * mpmath.re(Z * mpmath.conj(E))
        assert r_p_weighted(p, z, e) == pytest.approx(float(exact), rel=1e-11)
    mpmath.mp.dps = 15
