import math

import numpy as np
import pytest

from hardyverify import jets as jx
from hardyverify.manifold import (ModelError, Region, check_cartan_hadamard, comparison_C,
                                  comparison_D, density, euclidean, hyperbolic,
                                  log_density_derivative, mean_curvature_jet, parse_model,
                                  sectional_curvature_bound, sphere_area, warped)


def test_sphere_area():
    assert sphere_area(2) == pytest.approx(2 * math.pi, rel=1e-15)
    assert sphere_area(3) == pytest.approx(4 * math.pi, rel=1e-15)
    assert sphere_area(4) == pytest.approx(2 * math.pi ** 2, rel=1e-15)
    with pytest.raises(ModelError):
        sphere_area(1)


def test_comparison_functions():
    t = np.array([1e-6, 0.5, 2.0, 30.0])
    assert np.all(comparison_D(1.0, t) >= 0)
    np.testing.assert_allclose(comparison_C(0.0, t), 1 / t)
    np.testing.assert_allclose(comparison_C(4.0, t[1:]), 2 / np.tanh(2 * t[1:]))
    np.testing.assert_allclose(comparison_D(1.0, t), t * comparison_C(1.0, t) - 1, atol=1e-12)
    assert comparison_D(1.0, np.array([0.0]))[0] == 0.0
    with pytest.raises(ModelError):
        comparison_C(-1.0, t)


def test_density_and_log_derivative_against_fd():
    m = hyperbolic(4, 2.0)
    r = np.array([0.01, 0.5, 3.0])
    np.testing.assert_allclose(density(m, r), (np.sinh(np.sqrt(2) * r) / (np.sqrt(2) * r)) ** 3,
                               rtol=1e-12)
    h = 1e-6
    fd = (np.log(density(m, r + h)) - np.log(density(m, r - h))) / (2 * h)
    np.testing.assert_allclose(log_density_derivative(m, r), fd, rtol=1e-6, atol=1e-8)
    assert np.all(density(euclidean(3), r) == 1.0)


def test_mean_curvature():
    r = np.array([0.2, 1.0, 4.0])
    h = mean_curvature_jet(hyperbolic(3), r, 1)
    np.testing.assert_allclose(h.value, 2 / np.tanh(r), rtol=1e-13)
    np.testing.assert_allclose(h.derivative(1), -2 / np.sinh(r) ** 2, rtol=1e-12)
    w = warped(3, lambda x: jx.sinh(x), "sinh")
    np.testing.assert_allclose(mean_curvature_jet(w, r, 0).value, 2 / np.tanh(r), rtol=1e-12)


def test_parse_model():
    assert parse_model("euclidean:3").is_euclidean
    m = parse_model("hyperbolic:3:1")
    assert m.curvature_bound == 1.0 and m.N == 3
    assert sectional_curvature_bound(parse_model("warped:3:sinh2")) == pytest.approx(4.0, rel=1e-9)
    for bad in ("euclid:3", "euclidean", "hyperbolic:3:-1", "warped:3:nope", "euclidean:1"):
        with pytest.raises(ModelError):
            parse_model(bad)


def test_cartan_hadamard_check_rejects_positive_curvature():
    sphere_like = warped(3, lambda x: jx.sinh(x * 1j) * (-1j) if False else x - x * x * x / 6.0, "s")
    assert check_cartan_hadamard(sphere_like, r_max=1.0)
    assert not check_cartan_hadamard(hyperbolic(3))


def test_region():
    b = Region.ball(1.0)
    assert b.contains(np.array([0.0, 0.5]))[1]
    assert str(Region.exterior(1.0)) == "Exterior(1)"
    assert b.intersect(Region.annulus(0.5, 2.0)).bounds == (0.5, 1.0)
    with pytest.raises(ModelError):
        Region.annulus(1.0, 0.5)
