"""Property-based checks with hypothesis."""
import json
import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from hardyverify import jets as jx
from hardyverify.catalog import ParamSet, evaluate
from hardyverify.functionals import c_p_constant, r_p, r_p_weighted
from hardyverify.jets import Jet
from hardyverify.manifold import Region, euclidean, hyperbolic, density
from hardyverify.prober import CorpusSpec, generate_corpus
from hardyverify.quadrature import integrate_adaptive
from hardyverify.report import dumps

finite = st.floats(-50, 50, allow_nan=False, allow_infinity=False)
cplx = st.builds(complex, finite, finite)


@given(cplx, cplx, st.sampled_from([2.0, 2.5, 3.0, 4.0]))
def test_rp_nonnegative_complex(z, e, p):
    assert r_p_weighted(p, z, e) >= -1e-12 * (1 + abs(z) ** p + abs(e) ** p)


@given(finite, finite, st.sampled_from([1.2, 1.5, 1.8]))
def test_rp_nonnegative_real(z, e, p):
    assert r_p_weighted(p, z, e) >= -1e-12 * (1 + abs(z) ** p + abs(e) ** p)


@given(cplx, cplx)
def test_r2_is_half(z, e):
    assert math.isclose(float(r_p(2.0, z, e)), 0.5, rel_tol=1e-9)


@given(st.floats(2.0, 6.0))
def test_cp_in_unit_interval(p):
    c = c_p_constant(p)
    assert 0 < c <= 1 + 1e-12


@given(st.floats(0.2, 3.0), st.floats(-2, 2), st.floats(-2, 2))
def test_jet_arithmetic_matches_closed_form(x, a, b):
    t = Jet.variable(np.array([x]), 2)
    f = jx.exp(t * a) * (t * t + b)
    v = math.exp(a * x)
    assert math.isclose(f.c[0][0], v * (x * x + b), rel_tol=1e-12, abs_tol=1e-12)
    d1 = v * (a * (x * x + b) + 2 * x)
    assert math.isclose(f.c[1][0], d1, rel_tol=1e-10, abs_tol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 6), st.floats(0.1, 1.0), st.floats(1.5, 4.0))
def test_polynomials_integrate_exactly(n, a, b):
    res = integrate_adaptive(lambda r: r ** n, a, b)
    assert math.isclose(res.value, (b ** (n + 1) - a ** (n + 1)) / (n + 1), rel_tol=1e-12)


@given(st.integers(2, 7), st.floats(0.01, 5.0))
def test_density_positive_and_flat_limit(N, r):
    assert density(euclidean(N), r) == 1.0
    d = float(density(hyperbolic(N), r))
    assert d >= 1.0 and math.isclose(d, (math.sinh(r) / r) ** (N - 1), rel_tol=1e-12)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([3, 4, 5]))
def test_subcritical_hardy_holds(seed, N):
    f = generate_corpus(CorpusSpec(seed=seed, count=1, value_field="complex"))[0]
    rep = evaluate("SUBCRIT_HARDY", ParamSet(p=2.0, beta=0.0), euclidean(N), f)
    assert rep.passed


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000), st.floats(1.2, 2.0), st.floats(0.5, 3.0))
def test_double_weight_holds(seed, b, c):
    N, p = 5, 2.0
    a = N - (b - 1) * c - 0.1
    f = generate_corpus(CorpusSpec(seed=seed, count=1, support=Region.annulus(0.1, 0.95)))[0]
    rep = evaluate("DOUBLE_WEIGHT", ParamSet(p=p, a=a, b=b, c=c), euclidean(N), f)
    assert rep.passed


@given(st.dictionaries(st.text(max_size=5), st.one_of(finite, st.integers(), st.booleans(), st.none()),
                       max_size=6))
def test_dumps_is_canonical(d):
    text = dumps(d)
    assert json.loads(text) == d
    assert list(json.loads(text)) == sorted(d)
