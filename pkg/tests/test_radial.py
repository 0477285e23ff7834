import math

import numpy as np
import pytest

from hardyverify import jets as jx
from hardyverify.manifold import ModelError, Region, euclidean, hyperbolic
from hardyverify.radial import (CutoffSpec, SmoothnessError, extremal_boundary_family,
                                extremal_log_family, from_callables, from_jet, iterate_operator,
                                radial_laplacian, scaling_trace, smooth_cutoff, step_values,
                                _step_jet)
from hardyverify.jets import Jet

ANN = Region.annulus(0.1, 5.0)


@pytest.mark.parametrize("N", [3, 4, 5])
def test_laplacian_of_r_squared(N):
    f = from_jet("r2", ANN, lambda x: x * x)
    r = np.array([0.3, 1.0, 2.5])
    np.testing.assert_allclose(radial_laplacian(euclidean(N), f, r), 2 * N, rtol=1e-13)


def test_fundamental_solution_is_harmonic():
    f = from_jet("r^-3", ANN, lambda x: x ** -3.0)
    r = np.array([0.4, 1.3])
    assert np.max(np.abs(radial_laplacian(euclidean(5), f, r))) < 1e-11


def test_hyperbolic_laplacian_of_distance():
    f = from_jet("r", ANN, lambda x: x)
    r = np.array([0.5, 1.0, 2.0])
    np.testing.assert_allclose(radial_laplacian(hyperbolic(3), f, r), 2 / np.tanh(r), rtol=1e-13)


def test_laplacian_rejects_pole():
    f = from_jet("r", ANN, lambda x: x)
    with pytest.raises(ModelError):
        radial_laplacian(euclidean(3), f, 0.0)


def test_iterated_operator_on_polynomial():
    f = from_jet("r4", ANN, lambda x: x ** 4.0)
    r = np.array([0.5, 2.0])
    m = euclidean(3)
    np.testing.assert_allclose(iterate_operator(m, f, 1).value(r), 4 * r ** 3, rtol=1e-13)
    np.testing.assert_allclose(iterate_operator(m, f, 2).value(r), 20 * r ** 2, rtol=1e-13)
    np.testing.assert_allclose(iterate_operator(m, f, 3).value(r), 40 * r, rtol=1e-13)
    np.testing.assert_allclose(iterate_operator(m, f, 4).value(r), 120.0, rtol=1e-12)


def test_finite_difference_fallback_matches_jets():
    jf = from_jet("g", ANN, lambda x: jx.exp(x * -1.0) * x)
    cf = from_callables("g", ANN, lambda r: np.exp(-r) * r)
    r = np.array([0.7, 1.5])
    np.testing.assert_allclose(cf.d1(r), jf.d1(r), rtol=1e-8)
    m = hyperbolic(3)
    np.testing.assert_allclose(iterate_operator(m, cf, 2).value(r), iterate_operator(m, jf, 2).value(r),
                               rtol=1e-5)


def test_kink_fails_richardson_check():
    kink = from_callables("kink", ANN, lambda r: np.abs(r - 1.0))
    with pytest.raises(SmoothnessError):
        kink.d1(np.array([1.0 + 1e-5]))


def test_cutoff_and_step_twins():
    spec = CutoffSpec(0.5, 0.75, "inner")
    chi = smooth_cutoff(spec)
    assert chi.value(0.4) == 1.0 and chi.value(0.8) == 0.0
    assert chi.check_support() == 0.0
    x = np.linspace(-0.2, 1.2, 1001)
    np.testing.assert_allclose(step_values(x), _step_jet(Jet.variable(x, 0)).value, rtol=0, atol=1e-15)
    slopes = [np.max(np.abs(smooth_cutoff(CutoffSpec(1 - 2 * d, 1 - d, "outer")).d1(
        np.linspace(1 - 2 * d, 1 - d, 2001)))) * d for d in (0.1, 0.01)]
    assert slopes[0] == pytest.approx(slopes[1], rel=1e-6)


def test_extremal_families():
    f = extremal_log_family(2.0, 2.0, 0.0, 1.0)
    assert f.value(0.25) == pytest.approx(math.sqrt(math.log(4)), rel=1e-14)
    assert f.value(0.8) == 0.0
    g = extremal_boundary_family(1.0, 1.0, 0.05)
    assert g.value(0.97) == pytest.approx(0.03, rel=1e-12)
    assert g.value(0.85) == 0.0
    with pytest.raises(ValueError):
        extremal_log_family(2.0, 2.0, 0.6)


def test_richardson_slope_is_two():
    f = from_jet("e", ANN, lambda x: jx.exp(x))
    assert f.richardson_slope(1.0) == pytest.approx(2.0, abs=0.05)


def test_scaling_and_trace():
    f = from_jet("r2", ANN, lambda x: x * x)
    assert scaling_trace(f, 0.5) == pytest.approx(0.25)
    g = f.scaled(2 - 1j)
    assert g.value(2.0) == pytest.approx(4 * (2 - 1j))
