import numpy as np

from hardyverify import jets as jx
from hardyverify.jets import Jet

R = np.array([0.3, 0.7, 1.9])


def taylor(f, order=4):
    return f(Jet.variable(R, order))


def test_exp_log_derivatives():
    e = taylor(jx.exp)
    for k in range(5):
        np.testing.assert_allclose(e.derivative(k), np.exp(R), rtol=1e-13)
    lg = taylor(jx.log)
    np.testing.assert_allclose(lg.derivative(1), 1 / R, rtol=1e-13)
    np.testing.assert_allclose(lg.derivative(3), 2 / R ** 3, rtol=1e-13)


def test_power_and_reciprocal():
    p = taylor(lambda x: x ** 2.5)
    np.testing.assert_allclose(p.derivative(2), 2.5 * 1.5 * R ** 0.5, rtol=1e-13)
    q = taylor(lambda x: x.reciprocal())
    np.testing.assert_allclose(q.derivative(3), -6 / R ** 4, rtol=1e-12)


def test_hyperbolic_functions():
    s = taylor(jx.sinh)
    np.testing.assert_allclose(s.derivative(3), np.cosh(R), rtol=1e-13)
    c = taylor(jx.coth, 2)
    np.testing.assert_allclose(c.derivative(1), -1 / np.sinh(R) ** 2, rtol=1e-12)


def test_product_rule_and_d():
    j = taylor(lambda x: jx.exp(x) * x * x)
    exact = np.exp(R) * (R * R + 4 * R + 2)
    np.testing.assert_allclose(j.derivative(2), exact, rtol=1e-13)
    np.testing.assert_allclose(j.d().derivative(1), exact, rtol=1e-13)


def test_complex_coefficients():
    j = taylor(lambda x: jx.exp(x * 1j))
    np.testing.assert_allclose(j.derivative(2), -np.exp(1j * R), rtol=1e-13)


def test_where_selects_pointwise():
    a = Jet.variable(R, 2)
    out = jx.where(R > 1, a * 2.0, a * 0.0)
    np.testing.assert_allclose(out.value, np.where(R > 1, 2 * R, 0.0))
