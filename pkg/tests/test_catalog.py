import math

import numpy as np
import pytest

from hardyverify.catalog import (CASE_IDS, AdmissibilityError, HypothesisError, ParamSet,
                                 UnknownCaseError, admissible, build_case, chain_evaluate,
                                 ckn_evaluate, default_support, evaluate, get_case,
                                 higher_order_constant, higher_order_evaluate, identity_terms,
                                 resolve_params, rellich_constant, run_case, sharp_constant,
                                 validate_params)
from hardyverify.functionals import lambda_constant
from hardyverify.manifold import Region, euclidean, hyperbolic, sphere_area
from hardyverify.prober import CorpusSpec, generate_corpus
from hardyverify.radial import from_jet

BALL = Region.annulus(0.1, 0.95)


def corpus(support, count=3, seed=0, field="real"):
    return generate_corpus(CorpusSpec(seed=seed, count=count, support=support, value_field=field))


def simpson(fn, a, b, n=100_000):
    x = np.linspace(a, b, n + 1)
    y = fn(x)
    h = (b - a) / n
    return float(np.real(h / 3 * (y[0] + y[-1] + 4 * y[1:-1:2].sum() + 2 * y[2:-1:2].sum())))


def test_registry_is_complete():
    assert len(CASE_IDS) == 20
    for cid in CASE_IDS:
        assert get_case(cid).id == cid
    with pytest.raises(UnknownCaseError):
        get_case("NOPE")


def test_validate_params_examples():
    ok = ParamSet(N=5, p=2.0, a=2.0, b=2.0, c=3.0)
    assert validate_params("DOUBLE_WEIGHT", ok) == []
    assert any("1 < b" in m for m in validate_params("DOUBLE_WEIGHT", ParamSet(N=5, p=2.0, a=2.0, b=1.0, c=3.0)))
    assert any("a <= N" in m for m in validate_params("DOUBLE_WEIGHT", ParamSet(N=5, p=2.0, a=4.0, b=2.0, c=3.0)))
    assert validate_params("CRIT_LOG_GENERAL", ParamSet(N=3, p=2.0, gamma=4.0, R=1.0))
    assert validate_params("SUBCRIT_HARDY", ParamSet(N=3, p=3.0, beta=0.0))
    assert validate_params("DOUBLE_WEIGHT", ParamSet(N=5, p=2.0)) == ["missing parameter(s): a, b, c"]
    with pytest.raises(HypothesisError):
        build_case("DOUBLE_WEIGHT", ParamSet(N=5, p=2.0, a=2.0, b=1.0, c=3.0))
    assert build_case("DOUBLE_WEIGHT", ok).sharp_constant == pytest.approx(2.25)


def test_resolve_params_dimension_mismatch():
    with pytest.raises(HypothesisError):
        resolve_params("SUBCRIT_HARDY", ParamSet(N=4), euclidean(3))
    ps = resolve_params("EXTERIOR_CHAIN", None, hyperbolic(3, 2.0))
    assert ps.b_curv == pytest.approx(2.0)


def test_classical_hardy_closed_form():
    f = from_jet("r(1-r)", Region.ball(1.0), lambda x: x * (1.0 - x))
    rep = evaluate("CLASSICAL_HARDY", None, euclidean(3), f)
    assert rep.lhs == pytest.approx(2 * math.pi / 15, rel=1e-10)
    assert rep.rhs == pytest.approx(8 * math.pi / 15, rel=1e-10)
    assert rep.rhs / rep.lhs == pytest.approx(4.0, rel=1e-10)
    assert rep.constant == 0.25
    assert rep.passed


def test_plugin_constants():
    assert rellich_constant(6, 2.0, 0.0) == pytest.approx(1 / 9)
    assert higher_order_constant(3, 8, 2.0, 0.0, 1.0) == pytest.approx(25 / 16)
    assert higher_order_constant(3, 8, 2.0, 0.0, 1.0) == pytest.approx(
        (1 / 2) ** 4 * lambda_constant(1, 8, 2.0, 0.0))
    assert sharp_constant("CRIT_LOG_GENERAL", ParamSet(N=3, p=3.0, gamma=3.0, R=1.0)) == pytest.approx(8 / 27)


def test_k1_reduces_to_double_weight():
    # k = 1: constant ((p-1)c/p)^p, same as DOUBLE_WEIGHT with a = p + beta, b = p
    N, p, beta, c = 8, 2.0, 0.0, 1.0
    f = corpus(BALL, 1)[0]
    ho = run_case("HIGHER_ODD", ParamSet(k=1, p=p, beta=beta, c=c), euclidean(N), f)[0]
    dw = evaluate("DOUBLE_WEIGHT", ParamSet(p=p, a=p + beta, b=p, c=c), euclidean(N), f)
    assert ho.constant == pytest.approx(dw.constant)
    assert ho.lhs == pytest.approx(dw.lhs, rel=1e-10)
    assert ho.rhs == pytest.approx(dw.rhs, rel=1e-10)


def test_k2_matches_rellich_chain_constant():
    # k = 2 with c = (N-2p-beta)/(p-1): constant is 1/K of the Rellich chain
    N, p, beta = 6, 2.0, 0.0
    c = (N - 2 * p - beta) / (p - 1)
    assert higher_order_constant(2, N, p, beta, c) == pytest.approx(1 / rellich_constant(N, p, beta))


def test_ckn_endpoints_and_hoelder():
    m = euclidean(5)
    base = dict(p=2.0, q=2.0, eta_exp=2.0, a=2.0, b=2.0, c=3.0, alpha_ckn=-1.0, beta=0.0)
    for f in corpus(BALL, 3):
        r0 = ckn_evaluate(ParamSet(delta_interp=0.0, **base), m, f)
        assert r0.lhs == pytest.approx(r0.rhs, rel=1e-12) and r0.constant == 1.0
        r1 = ckn_evaluate(ParamSet(delta_interp=1.0, **base), m, f)
        dw = evaluate("DOUBLE_WEIGHT", ParamSet(p=2.0, a=2.0, b=2.0, c=3.0), m, f)
        assert r1.lhs ** 2 * r1.constant ** 2 == pytest.approx(dw.lhs * dw.constant, rel=1e-9)
        assert r1.rhs ** 2 == pytest.approx(dw.rhs, rel=1e-9)
        # delta = 1/2: gamma = -1, so lhs^2 = int w^-2 |f|^2 <= ||w^-2 f|| ||f|| (Hoelder, w^(alpha-1) = w^-2)
        rh = ckn_evaluate(ParamSet(delta_interp=0.5, **base), m, f)
        area = sphere_area(5)
        w = lambda r: r ** 0.5 * (1 - r ** 3) ** 0.5  # r^(a/(p(1-alpha))) (1-r^c)^(b/(p(1-alpha)))
        lo, hi = f.support.r0, f.support.r1
        dens = lambda r: area * r ** 4
        I_g = simpson(lambda r: np.abs(w(r) ** -1 * f.value(r)) ** 2 * dens(r), lo, hi)
        I_a = simpson(lambda r: np.abs(w(r) ** -2 * f.value(r)) ** 2 * dens(r), lo, hi)
        I_0 = simpson(lambda r: np.abs(f.value(r)) ** 2 * dens(r), lo, hi)
        assert rh.lhs == pytest.approx(math.sqrt(I_g), rel=1e-7)
        assert I_g <= math.sqrt(I_a * I_0) * (1 + 1e-12)
        assert rh.passed


def test_admissibility():
    whole = corpus(Region.annulus(0.2, 3.0), 1)[0]
    ok, why = admissible("DOUBLE_WEIGHT", None, euclidean(3), whole)
    assert not ok and "unit ball" in why
    assert not admissible("STAB_SUBCRIT", None, hyperbolic(3))[0]
    assert not admissible("HIGHER_ODD", None, euclidean(3))[0]
    assert admissible("CLASSICAL_HARDY", None, euclidean(3), whole)[0]
    with pytest.raises(AdmissibilityError):
        evaluate("DOUBLE_WEIGHT", None, euclidean(3), whole)
    touching = from_jet("r^2", Region.ball(0.5), lambda x: x * x)
    with pytest.raises(AdmissibilityError):
        evaluate("CRIT_DUAL_LOG", None, euclidean(3), touching)


def test_unchecked_run_records_violation():
    f = corpus(BALL, 1)[0]
    with pytest.raises(HypothesisError):
        higher_order_evaluate(ParamSet(k=4, p=2.0, beta=0.0, c=1.0), euclidean(8), f)
    rep = higher_order_evaluate(ParamSet(k=4, p=2.0, beta=0.0, c=1.0), euclidean(8), f, check=False)
    assert any("hypotheses not satisfied" in n for n in rep.notes)


@pytest.mark.parametrize("cid", ["SUBCRIT_HARDY", "DOUBLE_WEIGHT", "CRIT_LOG_GENERAL", "CRIT_BALL_HARDY"])
def test_complex_scaling(cid):
    lam = 1.7 - 0.4j
    f = corpus(default_support(cid), 1, field="complex")[0]
    r1 = evaluate(cid, None, euclidean(4), f)
    r2 = evaluate(cid, None, euclidean(4), f.scaled(lam))
    s = abs(lam) ** r1.params.get("p", 2.0)
    assert r2.lhs == pytest.approx(s * r1.lhs, rel=1e-9)
    assert r2.rhs == pytest.approx(s * r1.rhs, rel=1e-9)


def test_identity_p2_remainder_closed_form():
    N = 3
    f = corpus(Region.annulus(0.2, 3.0), 1)[0]
    res = identity_terms(ParamSet(p=2.0), euclidean(N), f)
    assert res.residual <= 1e-7

    def kernel(r):
        zeta = r ** (-N / 2) * f.value(r)
        eta = -2 * np.log(r) * r ** (-(N - 2) / 2) * f.d1(r)
        return 0.5 * np.abs(zeta - eta) ** 2 * sphere_area(N) * r ** (N - 1)

    assert res.t3 == pytest.approx(2 * simpson(kernel, 0.2, 3.0), rel=1e-7)
    assert res.t2 == 0.0


def test_identity_zero_function():
    zero = from_jet("0", Region.annulus(0.5, 2.0), lambda x: x * 0.0)
    assert identity_terms(ParamSet(p=3.0), hyperbolic(3), zero).residual == 0.0
    with pytest.raises(HypothesisError):
        identity_terms(ParamSet(p=1.0), euclidean(3), zero)


def test_chains_give_two_links():
    f = corpus(BALL, 1)[0]
    reps = chain_evaluate("RELLICH_CHAIN", ParamSet(beta=0.0), euclidean(6), f)
    assert [r.link for r in reps] == [1, 2]
    assert reps[1].constant == pytest.approx(9.0)
    assert all(r.passed for r in reps)
    assert reps[0].to_dict()["case"] == "RELLICH_CHAIN#1"
    with pytest.raises(ValueError):
        chain_evaluate("DOUBLE_WEIGHT", None, euclidean(6), f)
