"""Registry of inequality cases and their evaluators.

Every case is checked in the normalized form ``constant * lhs <= rhs``.  A
report passes when the deficit ``rhs - constant * lhs`` is at least
``-slack`` with ``slack = 10 (rhs_err + constant * lhs_err) + 1e-9 |rhs|``.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields, replace
from typing import Callable

import numpy as np

from . import jets as jx
from .functionals import (CRITICAL, SUBCRITICAL, SearchRange, StabilityParams,
                          _quotient_near, c_p_constant, d_C_power, d_H_power,
                          lambda_constant, r_p_weighted, sup_over_R)
from .jets import Jet
from .manifold import (ManifoldModel, Region, comparison_D, log_density_derivative,
                       mean_curvature_jet, sectional_curvature_bound, sphere_area)
from .quadrature import IntegralResult, QuadratureSpec, ball_integral
from .radial import RadialFunction, iterate_operator


class UnknownCaseError(KeyError):
    pass


class HypothesisError(ValueError):
    """Parameters violate the hypotheses of a case."""


class AdmissibilityError(ValueError):
    """The (model, function) pair is outside the scope of a case."""


# ---------------------------------------------------------------- parameters


@dataclass(frozen=True)
class ParamSet:
    N: int | None = None
    p: float | None = None
    gamma: float | None = None
    beta: float | None = None
    a: float | None = None
    b: float | None = None
    c: float | None = None
    R: float | None = None
    q: float | None = None
    eta_exp: float | None = None
    delta_interp: float | None = None
    alpha_ckn: float | None = None
    k: int | None = None
    b_curv: float | None = None

    def merged(self, other: "ParamSet | dict") -> "ParamSet":
        """Fields set in ``other`` override ours."""
        d = other if isinstance(other, dict) else asdict(other)
        return replace(self, **{k: v for k, v in d.items() if v is not None})

    def as_dict(self, keys=None) -> dict:
        d = asdict(self)
        if keys is not None:
            d = {k: d[k] for k in keys}
        return {k: v for k, v in d.items() if v is not None}


PARAM_FIELDS = tuple(f.name for f in fields(ParamSet))


@dataclass(frozen=True)
class CaseDef:
    id: str
    title: str
    kind: str  # single | chain | identity | stability | ckn | higher
    uses: tuple[str, ...]
    defaults: dict
    domain: str  # whole | ball | exterior
    euclidean_only: bool = False
    default_support: tuple[float, float] | None = None


@dataclass(frozen=True)
class InequalityCase:
    id: str
    params: ParamSet
    domain: Region | None
    lhs: str
    rhs: str
    sharp_constant: float


WHOLE_SUPPORT = (0.2, 3.0)
BALL_SUPPORT = (0.1, 0.95)
EXTERIOR_SUPPORT = (1.2, 5.0)

_C = CaseDef
CASES: dict[str, CaseDef] = {c.id: c for c in [
    _C("CLASSICAL_HARDY", "((N-2)/2)^2 int |f|^2/r^2 <= int |f'|^2", "single",
       ("N",), {}, "whole"),
    _C("CRIT_LOG_GENERAL", "((g-1)/p)^p int |f-f(R)|^p/(r^N |log R/r|^g) <= int r^(p-N) |log R/r|^(p-g) |f'|^p",
       "single", ("N", "p", "gamma", "R"), {"p": 2.0, "gamma": 2.0, "R": 1.0}, "whole"),
    _C("CRIT_LOG_REMAINDER", "A/(p L^(p-1)) + ((g-1)/p) L <= G (norm form with density remainder)",
       "single", ("N", "p", "gamma", "R"), {"p": 2.0, "gamma": 2.0, "R": 1.0}, "whole"),
    _C("CRIT_LOG_P", "((p-1)/p)^p int |f-f(R)|^p/(r^N |log R/r|^p) <= int r^(p-N) |f'|^p",
       "single", ("N", "p", "R"), {"p": 2.0, "R": 1.0}, "whole"),
    _C("CRIT_IDENTITY", "p^-p int |f|^p/r^N [1 + p r (J'/J) ln r] <= int |ln r|^p r^(p-N) |f'|^p",
       "single", ("N", "p"), {"p": 2.0}, "whole"),
    _C("CRIT_DUAL_LOG", "p^-p int |f|^p/r^N <= int |ln r|^p r^(p-N) |f'|^p",
       "single", ("N", "p"), {"p": 2.0}, "whole", euclidean_only=True),
    _C("EXTERIOR_CHAIN", "int_ext |f|^p/r^N <= int_ext |f|^p/r^N [1 + p(N-1) D^b ln r] <= p^p int_ext |ln r|^p r^(p-N) |f'|^p",
       "chain", ("N", "p", "b_curv"), {"p": 2.0}, "exterior"),
    _C("SUBCRIT_HARDY", "((N-p-beta)/p)^p int |f|^p/r^(p+beta) <= int |f'|^p/r^beta",
       "single", ("N", "p", "beta"), {"p": 2.0, "beta": 0.0}, "whole"),
    _C("STAB_SUBCRIT", "c_p ((p-1)/p)^p sup_R d_H(f,R)^p <= sub-critical Hardy deficit",
       "stability", ("N", "p", "beta"), {"p": 2.0, "beta": 0.0}, "whole", euclidean_only=True),
    _C("CRIT_BALL_HARDY", "((p-1)/p)^p int_B1 |f|^p/(r^N log(1/r)^p) <= int_B1 |f'|^p/r^(N-p)",
       "single", ("N", "p"), {"p": 2.0}, "ball"),
    _C("STAB_CRIT", "c_p ((p-1)/p)^p sup_R d_C(f,R)^p <= critical ball Hardy deficit",
       "stability", ("N", "p"), {"p": 2.0}, "ball", euclidean_only=True),
    _C("DOUBLE_WEIGHT", "((b-1)c/p)^p int_B1 |f|^p/(r^a (1-r^c)^b) <= int_B1 |f'|^p/(r^(a-p) (1-r^c)^(b-p))",
       "single", ("N", "p", "a", "b", "c"), {"p": 2.0, "a": 2.0, "b": 2.0, "c": 1.0}, "ball"),
    _C("CKN", "||w^g f||_eta <= |p/(c(b-1))|^delta ||f'/(r^((a-p)/p) (1-r^c)^((b-p)/p))||_p^delta ||w^beta f||_q^(1-delta)",
       "ckn", ("N", "p", "q", "a", "b", "c", "beta", "gamma", "eta_exp", "delta_interp", "alpha_ckn"),
       {"p": 2.0, "q": 2.0, "eta_exp": 2.0, "delta_interp": 0.5, "alpha_ckn": -1.0, "beta": 0.0,
        "a": 2.0, "b": 2.0, "c": 1.0}, "ball"),
    _C("DW_CLASSICAL_CHAIN", "int |f|^p/r^a <= int |f|^p/(r^a (1-r^c)^p) <= (p/(N-a))^p int |f'|^p/r^(a-p), c=(N-a)/(p-1)",
       "chain", ("N", "p", "a"), {"p": 2.0, "a": 1.0}, "ball"),
    _C("DW_LOG_LIMIT", "((b-1)/p)^p int_B1 |f|^p/(r^a ln(1/r)^b) <= int_B1 |f'|^p/(r^(a-p) ln(1/r)^(b-p))",
       "chain", ("N", "p", "a", "b"), {"p": 2.0, "a": 2.0, "b": 2.0}, "ball"),
    _C("GEOM_CHAIN", "int |f|^p/(1-r)^b <= int |f|^p/(r^p (1-r)^b) <= (p/(b-1))^p int |f'|^p/(1-r)^(b-p)",
       "chain", ("N", "p", "b"), {"p": 2.0, "b": 2.0}, "ball"),
    _C("RELL_FIRST", "((N(p-1)+beta)/p)^p int |f|^p/r^(p+beta) <= int |f' + h f|^p/r^beta",
       "single", ("N", "p", "beta"), {"p": 2.0, "beta": 0.0}, "whole"),
    _C("RELLICH_CHAIN", "int |f|^p/r^(2p+beta) <= int |f|^p/(r^(2p+beta)(1-r^c)^p) <= K int |Lap f|^p/r^beta, c=(N-2p-beta)/(p-1)",
       "chain", ("N", "p", "beta"), {"p": 2.0, "beta": -2.0}, "ball"),
    _C("HIGHER_ODD", "((p-1)c/p)^(alpha p) prod Lambda_(2i-1) int |f|^p/(r^(kp+beta)(1-r^c)^p) <= int |d Lap^(alpha-1) f|^p/r^beta",
       "higher", ("N", "p", "beta", "c", "k"), {"p": 2.0, "beta": -3.0, "c": 1.0, "k": 3}, "ball"),
    _C("HIGHER_EVEN", "((p-1)c/p)^(alpha p) prod Lambda_(2i) int |f|^p/(r^(kp+beta)(1-r^c)^p) <= int |Lap^alpha f|^p/r^beta",
       "higher", ("N", "p", "beta", "c", "k"), {"p": 2.0, "beta": -2.0, "c": 1.0, "k": 2}, "ball"),
]}
CASE_IDS = tuple(sorted(CASES))
CHAIN_IDS = ("EXTERIOR_CHAIN", "DW_CLASSICAL_CHAIN", "GEOM_CHAIN", "RELLICH_CHAIN", "DW_LOG_LIMIT")


def get_case(case_id: str) -> CaseDef:
    try:
        return CASES[case_id]
    except KeyError:
        raise UnknownCaseError(f"unknown case id {case_id!r}; known: {', '.join(CASE_IDS)}") from None


def default_params(case_id: str, N: int | None = None) -> ParamSet:
    d = dict(get_case(case_id).defaults)
    if N is not None:
        d["N"] = N
    return ParamSet(**d)


def default_support(case_id: str, R: float = 1.0) -> Region:
    dom = get_case(case_id).domain
    lo, hi = {"whole": WHOLE_SUPPORT, "ball": BALL_SUPPORT, "exterior": EXTERIOR_SUPPORT}[dom]
    return Region.annulus(lo, hi)


def corpus_support(case_id: str, model: ManifoldModel, ps: ParamSet) -> Region:
    """Test-function support for ``case_id`` on ``model``.

    The log-weighted critical cases on curved models need supp f inside B_R.
    """
    if case_id in ("CRIT_LOG_GENERAL", "CRIT_LOG_REMAINDER", "CRIT_LOG_P") and not model.is_euclidean:
        return Region.annulus(0.1 * ps.R, 0.95 * ps.R)
    return default_support(case_id)


def resolve_params(case_id: str, params: ParamSet | None, model: ManifoldModel) -> ParamSet:
    """Defaults, overridden by ``params``, with N taken from the model."""
    ps = default_params(case_id).merged(params or ParamSet())
    if ps.N is not None and ps.N != model.N:
        raise HypothesisError(f"parameter N={ps.N} does not match model dimension {model.N}")
    ps = replace(ps, N=model.N)
    if case_id == "EXTERIOR_CHAIN" and ps.b_curv is None:
        ps = replace(ps, b_curv=sectional_curvature_bound(model))
    if case_id == "CKN" and ps.gamma is None and None not in (ps.delta_interp, ps.alpha_ckn, ps.beta):
        d = ps.delta_interp
        ps = replace(ps, gamma=d * (ps.alpha_ckn - 1) + ps.beta * (1 - d))
    return ps


# ---------------------------------------------------------------- hypotheses


def _need(out: list, ps: ParamSet, *names):
    miss = [n for n in names if getattr(ps, n) is None]
    if miss:
        out.append("missing parameter(s): " + ", ".join(miss))
    return not miss


def validate_params(case_id: str, params: ParamSet) -> list[str]:
    """All hypothesis violations of ``case_id`` at ``params`` (empty = ok)."""
    case = get_case(case_id)
    out: list[str] = []
    if not _need(out, params, *case.uses):
        return out
    ps = params
    N, p = ps.N, ps.p
    if N is not None and (int(N) != N or N < 2):
        out.append(f"N must be an integer >= 2 (N={N})")
    cid = case_id
    if cid == "CLASSICAL_HARDY":
        if N < 3:
            out.append("needs N >= 3")
        return out
    if not p > 1:
        out.append(f"needs p > 1 (p={p:g})")
    if cid in ("CRIT_LOG_GENERAL", "CRIT_LOG_REMAINDER"):
        g = ps.gamma
        if not g > 1:
            out.append(f"needs 1 < gamma (gamma={g:g})")
        if not p > max(1.0, g - 1):
            out.append(f"needs max(1, gamma-1) < p (gamma={g:g}, p={p:g})")
    if cid in ("CRIT_LOG_GENERAL", "CRIT_LOG_REMAINDER", "CRIT_LOG_P") and not ps.R > 0:
        out.append("needs R > 0")
    if cid == "EXTERIOR_CHAIN" and not ps.b_curv >= 0:
        out.append(f"needs b >= 0 (b={ps.b_curv:g})")
    if cid == "SUBCRIT_HARDY":
        if not 1 < p < N:
            out.append(f"needs 1 < p < N (p={p:g}, N={N})")
        if not p + ps.beta < N:
            out.append(f"needs p + beta < N (p+beta={p + ps.beta:g})")
    if cid == "STAB_SUBCRIT":
        out += StabilityParams(p, ps.beta, N, SUBCRITICAL).violations()
    if cid == "STAB_CRIT":
        out += StabilityParams(p, 0.0, N, CRITICAL).violations()
    if cid in ("DOUBLE_WEIGHT", "CKN"):
        out += _dw_violations(N, ps.a, ps.b, ps.c)
    if cid == "CKN":
        out += _ckn_violations(ps)
    if cid == "DW_CLASSICAL_CHAIN" and not ps.a < N:
        out.append(f"needs a < N so that c = (N-a)/(p-1) > 0 (a={ps.a:g})")
    if cid == "DW_LOG_LIMIT":
        if not ps.b > 1:
            out.append(f"needs 1 < b (b={ps.b:g})")
        if not ps.a <= N:
            out.append(f"needs a <= N (a={ps.a:g})")
    if cid == "GEOM_CHAIN":
        if not ps.b > 1:
            out.append(f"needs 1 < b (b={ps.b:g})")
        if not p <= N - ps.b + 1:
            out.append(f"needs p <= N - b + 1 (p={p:g}, b={ps.b:g})")
    if cid in ("RELL_FIRST", "RELLICH_CHAIN"):
        if not p < N:
            out.append(f"needs p < N (p={p:g})")
        if not -N * (p - 1) < ps.beta < N - p:
            out.append(f"needs -N(p-1) < beta < N-p (beta={ps.beta:g})")
    if cid == "RELLICH_CHAIN" and not N - 2 * p - ps.beta > 0:
        out.append(f"needs N - 2p - beta > 0 so that c > 0 (got {N - 2 * p - ps.beta:g})")
    if cid in ("HIGHER_ODD", "HIGHER_EVEN"):
        k = ps.k
        if int(k) != k or k < 1:
            out.append(f"k must be a positive integer (k={k})")
        elif (k % 2 == 1) != (cid == "HIGHER_ODD"):
            out.append(f"k={k} has the wrong parity for {cid}")
        if not p < N:
            out.append(f"needs p < N (p={p:g})")
        if not -N * (p - 1) < ps.beta < N - (k - 1) * p:
            out.append(f"needs -N(p-1) < beta < N-(k-1)p (beta={ps.beta:g}, bound {N - (k - 1) * p:g})")
        if not ps.c > 0:
            out.append("needs c > 0")
        if not k * p + ps.beta <= N - (p - 1) * ps.c + 1e-12:
            out.append(f"needs kp + beta <= N - (p-1)c ({k * p + ps.beta:g} > {N - (p - 1) * ps.c:g})")
    return out


def _dw_violations(N, a, b, c) -> list[str]:
    out = []
    if not b > 1:
        out.append(f"needs 1 < b (b={b:g})")
    if not c > 0:
        out.append(f"needs c > 0 (c={c:g})")
    if not a <= N - (b - 1) * c + 1e-12:
        out.append(f"needs a <= N - (b-1)c (a={a:g}, bound {N - (b - 1) * c:g})")
    return out


def _ckn_violations(ps: ParamSet) -> list[str]:
    out = []
    p, q, eta, d, al = ps.p, ps.q, ps.eta_exp, ps.delta_interp, ps.alpha_ckn
    if not q > 1:
        out.append(f"needs q > 1 (q={q:g})")
    if not eta > 0:
        out.append("needs eta > 0")
    if not p + q >= eta:
        out.append("needs p + q >= eta")
    lo, hi = max(0.0, (eta - q) / eta), min(1.0, p / eta)
    if not lo - 1e-12 <= d <= hi + 1e-12:
        out.append(f"needs delta in [0,1] and [(eta-q)/eta, p/eta] (delta={d:g})")
    if abs(d * eta / p + (1 - d) * eta / q - 1) > 1e-12:
        out.append("needs delta eta/p + (1-delta) eta/q = 1")
    if al == 1:
        out.append("needs alpha != 1 (the weight exponent divides by 1 - alpha)")
    g = d * (al - 1) + ps.beta * (1 - d)
    if ps.gamma is not None and abs(ps.gamma - g) > 1e-12:
        out.append(f"needs gamma = delta(alpha-1) + beta(1-delta) = {g:g} (gamma={ps.gamma:g})")
    return out


def build_case(case_id: str, params: ParamSet, check: bool = True) -> InequalityCase:
    case = get_case(case_id)
    if check:
        bad = validate_params(case_id, params)
        if bad:
            raise HypothesisError(f"{case_id}: " + "; ".join(bad))
    dom = {"whole": None, "ball": Region.ball(1.0), "exterior": Region.exterior(1.0)}[case.domain]
    lhs, rhs = case.title.split("<=", 1) if "<=" in case.title else (case.title, "")
    return InequalityCase(case_id, params, dom, lhs.strip(), rhs.strip(), sharp_constant(case_id, params))


def sharp_constant(case_id: str, ps: ParamSet) -> float:
    """Constant of the principal (last) inequality in normalized form."""
    p = ps.p
    if case_id == "CLASSICAL_HARDY":
        return (ps.N - 2) ** 2 / 4.0
    if case_id == "CRIT_LOG_GENERAL":
        return ((ps.gamma - 1) / p) ** p
    if case_id == "CRIT_LOG_REMAINDER":
        return 1.0
    if case_id in ("CRIT_LOG_P", "CRIT_BALL_HARDY"):
        return ((p - 1) / p) ** p
    if case_id in ("CRIT_IDENTITY", "CRIT_DUAL_LOG", "EXTERIOR_CHAIN"):
        return p ** (-p)
    if case_id == "SUBCRIT_HARDY":
        return ((ps.N - p - ps.beta) / p) ** p
    if case_id in ("STAB_SUBCRIT", "STAB_CRIT"):
        return c_p_constant(p) * ((p - 1) / p) ** p
    if case_id == "DOUBLE_WEIGHT":
        return ((ps.b - 1) * ps.c / p) ** p
    if case_id == "CKN":
        return abs(ps.c * (ps.b - 1) / p) ** ps.delta_interp
    if case_id == "DW_CLASSICAL_CHAIN":
        return ((ps.N - ps.a) / p) ** p
    if case_id == "DW_LOG_LIMIT":
        return ((ps.b - 1) / p) ** p
    if case_id == "GEOM_CHAIN":
        return ((ps.b - 1) / p) ** p
    if case_id == "RELL_FIRST":
        return lambda_constant(0, ps.N, p, ps.beta)
    if case_id == "RELLICH_CHAIN":
        return rellich_constant(ps.N, p, ps.beta) ** -1
    if case_id in ("HIGHER_ODD", "HIGHER_EVEN"):
        return higher_order_constant(ps.k, ps.N, p, ps.beta, ps.c)
    raise UnknownCaseError(case_id)


def rellich_constant(N: int, p: float, beta: float) -> float:
    """p^{2p} / ((N(p-1)+beta)^p (N-2p-beta)^p): the constant K in
    middle <= K int |Lap f|^p / r^beta."""
    return p ** (2 * p) / ((N * (p - 1) + beta) ** p * (N - 2 * p - beta) ** p)


def higher_order_constant(k: int, N: int, p: float, beta: float, c: float) -> float:
    alpha = (k + 1) // 2
    shift = -1 if k % 2 else 0
    prod = 1.0
    for i in range(alpha):
        prod *= lambda_constant(2 * i + shift, N, p, beta)
    return ((p - 1) * c / p) ** (alpha * p) * prod


# ---------------------------------------------------------------- reports


@dataclass
class VerificationReport:
    case: str
    params: dict
    model: str
    function: str
    lhs: float
    rhs: float
    constant: float
    lhs_error: float = 0.0
    rhs_error: float = 0.0
    link: int | None = None
    bound: float | None = None  # stability lower bound, when relevant
    notes: list[str] = field(default_factory=list)
    error: str | None = None

    @property
    def ratio(self) -> float:
        if self.lhs == 0:
            return math.inf if self.rhs > 0 else math.nan
        return self.rhs / self.lhs

    @property
    def deficit(self) -> float:
        return self.rhs - self.constant * self.lhs

    @property
    def margin(self) -> float:
        return self.deficit

    @property
    def slack(self) -> float:
        return 10.0 * (self.rhs_error + abs(self.constant) * self.lhs_error) + 1e-9 * abs(self.rhs)

    @property
    def passed(self) -> bool:
        if self.error is not None:
            return False
        d = self.deficit
        return bool(np.isfinite(d) and d >= -self.slack)

    def to_dict(self) -> dict:
        return {
            "case": self.case if self.link is None else f"{self.case}#{self.link}",
            "params": self.params,
            "model": self.model,
            "function": self.function,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "ratio": self.ratio,
            "constant": self.constant,
            "deficit": self.deficit,
            "margin": self.margin,
            "slack": self.slack,
            "error_estimates": {"lhs": self.lhs_error, "rhs": self.rhs_error},
            "pass": self.passed,
            "notes": list(self.notes) + ([self.error] if self.error else []),
        }


# ---------------------------------------------------------------- integration helpers


def _integral(model, lo, hi, fn, spec, splits=(), singular=(False, False)) -> IntegralResult:
    singular = (singular[0] or lo <= 0.0, singular[1])
    sp = spec.with_(split_points=tuple(s for s in splits if lo < s < hi), singular=singular)
    return ball_integral(model, Region.annulus(lo, hi), fn, sp)


def _real(res: IntegralResult) -> tuple[float, float]:
    return float(np.real(res.value)), float(res.error_estimate)


# cases whose weights or distances are only defined away from the pole
POLE_EXCLUDED = ("CRIT_LOG_GENERAL", "CRIT_LOG_REMAINDER", "CRIT_LOG_P", "CRIT_IDENTITY",
                 "CRIT_DUAL_LOG", "STAB_SUBCRIT", "STAB_CRIT")


def _support_in(case_id: str, f: RadialFunction, ps: ParamSet, model: ManifoldModel) -> tuple[float, float]:
    """Integration range for f on the case domain; raises if inadmissible."""
    case = get_case(case_id)
    s0, s1 = f.support.r0, f.support.r1
    if case.euclidean_only and not model.is_euclidean:
        raise AdmissibilityError(f"{case_id} needs a model with constant density (Euclidean)")
    if not math.isfinite(s1):
        raise AdmissibilityError(f"{f.label}: support must be bounded")
    if case.domain == "ball":
        if s1 > 1.0:
            raise AdmissibilityError(f"{f.label}: support must lie in the unit ball")
    elif case.domain == "exterior":
        if s0 < 1.0:
            raise AdmissibilityError(f"{f.label}: support must lie outside the unit ball")
    if s0 <= 0 and case_id in POLE_EXCLUDED:
        raise AdmissibilityError(f"{f.label}: support must stay away from the pole")
    if case_id in ("CRIT_LOG_GENERAL", "CRIT_LOG_REMAINDER", "CRIT_LOG_P") and not model.is_euclidean:
        if s1 > ps.R:
            raise AdmissibilityError(
                f"{case_id} on a non-Euclidean model needs supp f inside B_R (R={ps.R:g})")
    return s0, s1


def _is_real(f: RadialFunction, lo: float, hi: float) -> bool:
    r = np.linspace(lo, hi, 257)[1:-1]
    return not np.any(np.imag(f.value(r)))


def _ends(case_id: str, s0: float, s1: float) -> tuple[bool, bool]:
    # supports that touch the pole or the unit sphere carry the weight singularity
    dom = get_case(case_id).domain
    return (s0 <= 0.0, dom == "ball" and s1 >= 1.0)


# ---------------------------------------------------------------- measures

Measure = tuple  # (lhs, lhs_err, rhs, rhs_err, constant, notes)


def _m_classical(ps, model, f, spec):
    s0, s1 = _support_in("CLASSICAL_HARDY", f, ps, model)
    lhs = _integral(model, s0, s1, lambda r: np.abs(f.value(r)) ** 2 / r ** 2, spec)
    rhs = _integral(model, s0, s1, lambda r: np.abs(f.d1(r)) ** 2, spec)
    return [(*_real(lhs), *_real(rhs), sharp_constant("CLASSICAL_HARDY", ps), [])]


def _log_quotient(f: RadialFunction, R: float):
    """r -> (f(r) - f(R)) / log(R/r), Taylor-evaluated near r = R."""
    fR = complex(f.value(R))
    x = Jet.variable(np.array([R]), 3)
    num = f.jet(np.array([R]), 3) - fR
    den = (jx.log(x) * -1.0) + math.log(R)

    def q(r):
        lg = -np.log1p((r - R) / R)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (f.value(r) - fR) / lg
        near = np.abs(r - R) < 1e-5 * R
        if near.any():
            out = np.where(near, _quotient_near(num, den, r - R), out)
        return out
    return q, fR


def _crit_log_parts(case_id, ps, model, f, spec, gamma):
    """(L^p, err), (A, err), (G^p, err) for the log-weighted critical inequality."""
    p, R, N = ps.p, ps.R, model.N
    s0, s1 = _support_in(case_id, f, ps, model)
    q, fR = _log_quotient(f, R)
    lgabs = lambda r: np.abs(np.log1p((r - R) / R))

    def lhs_fn(r):
        return np.abs(q(r)) ** p * lgabs(r) ** (p - gamma) / r ** N

    def rhs_fn(r):
        return r ** (p - N) * lgabs(r) ** (p - gamma) * np.abs(f.d1(r)) ** p

    def rem_fn(r):
        return np.abs(q(r)) ** p * lgabs(r) ** (p - gamma + 1) * log_density_derivative(model, r) / r ** (N - 1)

    sing = _ends(case_id, s0, s1)
    L = _integral(model, s0, s1, lhs_fn, spec, (R,), sing)
    G = _integral(model, s0, s1, rhs_fn, spec, (R,), sing)
    A = _integral(model, s0, s1, rem_fn, spec, (R,), sing) if not model.is_euclidean else IntegralResult(0.0, 0.0)
    notes = []
    CA = abs(fR) ** p
    if CA > 0:
        # |f(R)|^p / (r |log R/r|^gamma) off the support: closed form (Euclidean only,
        # non-Euclidean models are restricted to supp f inside B_R)
        u0, u1 = math.log(R / s0), math.log(s1 / R)
        tail = sphere_area(N) * CA * (u0 ** (1 - gamma) + u1 ** (1 - gamma)) / (gamma - 1)
        L = IntegralResult(L.value + tail, L.error_estimate, L.subdivisions_used, tail)
        notes.append(f"analytic off-support tail {tail:.6g}")
    return _real(L), _real(A), _real(G), notes


def _m_crit_log(ps, model, f, spec, case_id="CRIT_LOG_GENERAL"):
    gamma = ps.p if case_id == "CRIT_LOG_P" else ps.gamma
    (L, Le), _, (G, Ge), notes = _crit_log_parts(case_id, ps, model, f, spec, gamma)
    return [(L, Le, G, Ge, sharp_constant(case_id, ps), notes)]


def _m_crit_log_remainder(ps, model, f, spec):
    p, g = ps.p, ps.gamma
    (Lp, Le), (A, Ae), (Gp, Ge), notes = _crit_log_parts("CRIT_LOG_REMAINDER", ps, model, f, spec, g)
    L = Lp ** (1 / p)
    G = Gp ** (1 / p)
    if L == 0:
        lhs, lhs_err = 0.0, 0.0
    else:
        lhs = A / (p * L ** (p - 1)) + (g - 1) / p * L
        dL = Le / (p * max(Lp, 1e-300)) * L  # first-order propagation
        lhs_err = Ae / (p * L ** (p - 1)) + abs(A) * (p - 1) / p * L ** (-p) * dL + (g - 1) / p * dL
    rhs_err = Ge / (p * max(Gp, 1e-300)) * G
    return [(lhs, lhs_err, G, rhs_err, 1.0, notes + ["norm form: lhs = A/(p L^(p-1)) + ((gamma-1)/p) L"])]


def _identity_terms(ps, model, f, spec, s0, s1):
    p, N = ps.p, model.N
    lhs = _integral(model, s0, s1, lambda r: np.abs(f.value(r)) ** p / r ** N, spec)
    t1 = _integral(model, s0, s1,
                   lambda r: np.abs(np.log(r)) ** p * r ** (p - N) * np.abs(f.d1(r)) ** p, spec)
    t2 = _integral(model, s0, s1, lambda r: np.abs(f.value(r)) ** p * log_density_derivative(model, r)
                   * np.log(r) * r ** (1 - N), spec)

    def t3_fn(r):
        zeta = r ** (-N / p) * f.value(r)
        eta = -p * np.log(r) * r ** (-(N - p) / p) * f.d1(r)
        return r_p_weighted(p, zeta, eta)

    t3 = _integral(model, s0, s1, t3_fn, spec)
    return lhs, t1, t2, t3


def _m_crit_identity(ps, model, f, spec):
    p, N = ps.p, model.N
    s0, s1 = _support_in("CRIT_IDENTITY", f, ps, model)
    if p < 2 and not _is_real(f, s0, s1):
        raise AdmissibilityError("for 1 < p < 2 the inequality is only claimed for real-valued f")
    lhs = _integral(model, s0, s1, lambda r: np.abs(f.value(r)) ** p / r ** N
                    * (1 + p * r * log_density_derivative(model, r) * np.log(r)), spec)
    rhs = _integral(model, s0, s1,
                    lambda r: np.abs(np.log(r)) ** p * r ** (p - N) * np.abs(f.d1(r)) ** p, spec)
    return [(*_real(lhs), *_real(rhs), p ** (-p), [])]


def _m_crit_dual_log(ps, model, f, spec):
    p, N = ps.p, model.N
    s0, s1 = _support_in("CRIT_DUAL_LOG", f, ps, model)
    lhs = _integral(model, s0, s1, lambda r: np.abs(f.value(r)) ** p / r ** N, spec)
    rhs = _integral(model, s0, s1,
                    lambda r: np.abs(np.log(r)) ** p * r ** (p - N) * np.abs(f.d1(r)) ** p, spec)
    return [(*_real(lhs), *_real(rhs), p ** (-p), [])]


def _m_exterior_chain(ps, model, f, spec):
    p, N, b = ps.p, model.N, ps.b_curv
    s0, s1 = _support_in("EXTERIOR_CHAIN", f, ps, model)
    if p < 2 and not _is_real(f, s0, s1):
        raise AdmissibilityError("for 1 < p < 2 the chain is only claimed for real-valued f")
    bound = sectional_curvature_bound(model)
    if b > bound + 1e-12:
        raise AdmissibilityError(f"curvature bound b={b:g} exceeds the model's ({bound:g})")
    first = _integral(model, s0, s1, lambda r: np.abs(f.value(r)) ** p / r ** N, spec)
    mid = _integral(model, s0, s1, lambda r: np.abs(f.value(r)) ** p / r ** N
                    * (1 + p * (N - 1) * comparison_D(b, r) * np.log(r)), spec)
    last = _integral(model, s0, s1,
                     lambda r: np.abs(np.log(r)) ** p * r ** (p - N) * np.abs(f.d1(r)) ** p, spec)
    return [(*_real(first), *_real(mid), 1.0, ["link 1: D^b >= 0 and ln r >= 0"]),
            (*_real(mid), *_real(last), p ** (-p), ["link 2: curvature comparison + identity"])]


def _hardy_parts(model, f, s0, s1, p, beta, spec):
    lhs = _integral(model, s0, s1, lambda r: np.abs(f.value(r)) ** p / r ** (p + beta), spec)
    rhs = _integral(model, s0, s1, lambda r: np.abs(f.d1(r)) ** p / r ** beta, spec)
    return _real(lhs), _real(rhs)


def _m_subcrit(ps, model, f, spec):
    s0, s1 = _support_in("SUBCRIT_HARDY", f, ps, model)
    (l, le), (r, re) = _hardy_parts(model, f, s0, s1, ps.p, ps.beta, spec)
    return [(l, le, r, re, sharp_constant("SUBCRIT_HARDY", ps), [])]


def _crit_ball_parts(model, f, s0, s1, p, spec, sing):
    N = model.N
    lhs = _integral(model, s0, s1, lambda r: np.abs(f.value(r)) ** p / (r ** N * np.log(1 / r) ** p),
                    spec, singular=sing)
    rhs = _integral(model, s0, s1, lambda r: np.abs(f.d1(r)) ** p / r ** (N - p), spec, singular=sing)
    return _real(lhs), _real(rhs)


def _m_crit_ball(ps, model, f, spec):
    s0, s1 = _support_in("CRIT_BALL_HARDY", f, ps, model)
    (l, le), (r, re) = _crit_ball_parts(model, f, s0, s1, ps.p, spec, _ends("CRIT_BALL_HARDY", s0, s1))
    return [(l, le, r, re, sharp_constant("CRIT_BALL_HARDY", ps), [])]


def stability_measure(case_id: str, ps: ParamSet, model, f, spec,
                      search: SearchRange | None = None) -> tuple[float, float, float, float, float, float]:
    """(sup_R d^p, its error, Hardy deficit, its error, R*, stability constant)."""
    s0, s1 = _support_in(case_id, f, ps, model)
    p = ps.p
    if case_id == "STAB_SUBCRIT":
        sp = StabilityParams(p, ps.beta, model.N, SUBCRITICAL)
        (l, le), (r, re) = _hardy_parts(model, f, s0, s1, p, ps.beta, spec)
        K = ((model.N - p - ps.beta) / p) ** p
        dist = lambda R: float(np.real(d_H_power(model, f, R, sp, spec).value))
        dist_full = lambda R: d_H_power(model, f, R, sp, spec)
    else:
        sp = StabilityParams(p, 0.0, model.N, CRITICAL)
        (l, le), (r, re) = _crit_ball_parts(model, f, s0, s1, p, spec, (False, False))
        K = ((p - 1) / p) ** p
        dist = lambda R: float(np.real(d_C_power(model, f, R, sp, spec).value))
        dist_full = lambda R: d_C_power(model, f, R, sp, spec)
    R_star, sup = sup_over_R(dist, search)
    sup_err = dist_full(R_star).error_estimate
    deficit = r - K * l
    deficit_err = re + K * le
    return sup, sup_err, deficit, deficit_err, R_star, c_p_constant(p) * ((p - 1) / p) ** p


def _m_stability(ps, model, f, spec, case_id="STAB_SUBCRIT"):
    sup, se, dfc, de, R_star, const = stability_measure(case_id, ps, model, f, spec)
    return [(sup, se, dfc, de, const, [f"sup attained near R*={R_star:.6g}"])]


def _dw_parts(model, f, s0, s1, p, a, b, c, spec, sing):
    lhs = _integral(model, s0, s1, lambda r: np.abs(f.value(r)) ** p / (r ** a * (1 - r ** c) ** b),
                    spec, singular=sing)
    rhs = _integral(model, s0, s1,
                    lambda r: np.abs(f.d1(r)) ** p / (r ** (a - p) * (1 - r ** c) ** (b - p)),
                    spec, singular=sing)
    return _real(lhs), _real(rhs)


def _m_double_weight(ps, model, f, spec):
    s0, s1 = _support_in("DOUBLE_WEIGHT", f, ps, model)
    (l, le), (r, re) = _dw_parts(model, f, s0, s1, ps.p, ps.a, ps.b, ps.c, spec,
                                 _ends("DOUBLE_WEIGHT", s0, s1))
    return [(l, le, r, re, sharp_constant("DOUBLE_WEIGHT", ps), [])]


def _m_ckn(ps, model, f, spec):
    s0, s1 = _support_in("CKN", f, ps, model)
    p, q, eta, d = ps.p, ps.q, ps.eta_exp, ps.delta_interp
    a, b, c, al, beta, gam = ps.a, ps.b, ps.c, ps.alpha_ckn, ps.beta, ps.gamma
    sing = _ends("CKN", s0, s1)
    ea, eb = a / (p * (1 - al)), b / (p * (1 - al))

    def wpow(r, s):
        return r ** (ea * s) * (1 - r ** c) ** (eb * s)

    I_eta = _integral(model, s0, s1, lambda r: np.abs(wpow(r, gam) * f.value(r)) ** eta, spec, singular=sing)
    I_p = _integral(model, s0, s1, lambda r: np.abs(f.d1(r)) ** p / (r ** (a - p) * (1 - r ** c) ** (b - p)),
                    spec, singular=sing)
    I_q = _integral(model, s0, s1, lambda r: np.abs(wpow(r, beta) * f.value(r)) ** q, spec, singular=sing)
    (Ie, Iee), (Ip, Ipe), (Iq, Iqe) = _real(I_eta), _real(I_p), _real(I_q)
    lhs = Ie ** (1 / eta)
    n1, n2 = Ip ** (1 / p), Iq ** (1 / q)
    rhs = n1 ** d * n2 ** (1 - d)
    lhs_err = lhs * Iee / (eta * max(Ie, 1e-300))
    rhs_err = rhs * (d * Ipe / (p * max(Ip, 1e-300)) + (1 - d) * Iqe / (q * max(Iq, 1e-300)))
    K = abs(p / (c * (b - 1))) ** d
    return [(lhs, lhs_err, rhs, rhs_err, 1.0 / K, [f"norm form, K = |p/(c(b-1))|^delta = {K:.6g}"])]


def _m_dw_classical_chain(ps, model, f, spec):
    p, a, N = ps.p, ps.a, model.N
    c = (N - a) / (p - 1)
    s0, s1 = _support_in("DW_CLASSICAL_CHAIN", f, ps, model)
    sing = _ends("DW_CLASSICAL_CHAIN", s0, s1)
    first = _integral(model, s0, s1, lambda r: np.abs(f.value(r)) ** p / r ** a, spec, singular=sing)
    mid = _integral(model, s0, s1, lambda r: np.abs(f.value(r)) ** p / (r ** a * (1 - r ** c) ** p),
                    spec, singular=sing)
    last = _integral(model, s0, s1, lambda r: np.abs(f.d1(r)) ** p / r ** (a - p), spec, singular=sing)
    return [(*_real(first), *_real(mid), 1.0, [f"c = (N-a)/(p-1) = {c:g}"]),
            (*_real(mid), *_real(last), ((N - a) / p) ** p, [])]


def _m_dw_log(ps, model, f, spec):
    p, a, b = ps.p, ps.a, ps.b
    s0, s1 = _support_in("DW_LOG_LIMIT", f, ps, model)
    sing = _ends("DW_LOG_LIMIT", s0, s1)
    lhs = _integral(model, s0, s1, lambda r: np.abs(f.value(r)) ** p / (r ** a * np.log(1 / r) ** b),
                    spec, singular=sing)
    rhs = _integral(model, s0, s1, lambda r: np.abs(f.d1(r)) ** p / (r ** (a - p) * np.log(1 / r) ** (b - p)),
                    spec, singular=sing)
    return [(*_real(lhs), *_real(rhs), ((b - 1) / p) ** p, [])]


def _m_geom_chain(ps, model, f, spec):
    p, b = ps.p, ps.b
    s0, s1 = _support_in("GEOM_CHAIN", f, ps, model)
    sing = _ends("GEOM_CHAIN", s0, s1)
    first = _integral(model, s0, s1, lambda r: np.abs(f.value(r)) ** p / (1 - r) ** b, spec, singular=sing)
    mid = _integral(model, s0, s1, lambda r: np.abs(f.value(r)) ** p / (r ** p * (1 - r) ** b),
                    spec, singular=sing)
    last = _integral(model, s0, s1, lambda r: np.abs(f.d1(r)) ** p / (1 - r) ** (b - p), spec, singular=sing)
    return [(*_real(first), *_real(mid), 1.0, ["a = p, c = 1"]),
            (*_real(mid), *_real(last), ((b - 1) / p) ** p, [])]


def _m_rell_first(ps, model, f, spec):
    p, beta = ps.p, ps.beta
    s0, s1 = _support_in("RELL_FIRST", f, ps, model)
    h = lambda r: mean_curvature_jet(model, r, 0).c[0]
    lhs = _integral(model, s0, s1, lambda r: np.abs(f.value(r)) ** p / r ** (p + beta), spec)
    rhs = _integral(model, s0, s1, lambda r: np.abs(f.d1(r) + h(r) * f.value(r)) ** p / r ** beta, spec)
    return [(*_real(lhs), *_real(rhs), lambda_constant(0, model.N, p, beta), [])]


def _m_rellich_chain(ps, model, f, spec):
    p, beta, N = ps.p, ps.beta, model.N
    c = (N - 2 * p - beta) / (p - 1)
    s0, s1 = _support_in("RELLICH_CHAIN", f, ps, model)
    sing = _ends("RELLICH_CHAIN", s0, s1)
    lap = iterate_operator(model, f, 2)
    w = 2 * p + beta
    first = _integral(model, s0, s1, lambda r: np.abs(f.value(r)) ** p / r ** w, spec, singular=sing)
    mid = _integral(model, s0, s1, lambda r: np.abs(f.value(r)) ** p / (r ** w * (1 - r ** c) ** p),
                    spec, singular=sing)
    last = _integral(model, s0, s1, lambda r: np.abs(lap.value(r)) ** p / r ** beta, spec, singular=sing)
    K = rellich_constant(N, p, beta)
    return [(*_real(first), *_real(mid), 1.0, [f"c = (N-2p-beta)/(p-1) = {c:g}"]),
            (*_real(mid), *_real(last), 1.0 / K, [f"K = {K:.10g}"])]


def _m_higher(ps, model, f, spec, case_id="HIGHER_ODD"):
    p, beta, c, k = ps.p, ps.beta, ps.c, int(ps.k)
    s0, s1 = _support_in(case_id, f, ps, model)
    sing = _ends(case_id, s0, s1)
    op = iterate_operator(model, f, k)
    lhs = _integral(model, s0, s1, lambda r: np.abs(f.value(r)) ** p / (r ** (k * p + beta) * (1 - r ** c) ** p),
                    spec, singular=sing)
    rhs = _integral(model, s0, s1, lambda r: np.abs(op.value(r)) ** p / r ** beta, spec, singular=sing)
    const = higher_order_constant(k, model.N, p, beta, c)
    return [(*_real(lhs), *_real(rhs), const, [f"k={k}, alpha={(k + 1) // 2}"])]


_MEASURES: dict[str, Callable] = {
    "CLASSICAL_HARDY": _m_classical,
    "CRIT_LOG_GENERAL": lambda *a: _m_crit_log(*a, case_id="CRIT_LOG_GENERAL"),
    "CRIT_LOG_P": lambda *a: _m_crit_log(*a, case_id="CRIT_LOG_P"),
    "CRIT_LOG_REMAINDER": _m_crit_log_remainder,
    "CRIT_IDENTITY": _m_crit_identity,
    "CRIT_DUAL_LOG": _m_crit_dual_log,
    "EXTERIOR_CHAIN": _m_exterior_chain,
    "SUBCRIT_HARDY": _m_subcrit,
    "STAB_SUBCRIT": lambda *a: _m_stability(*a, case_id="STAB_SUBCRIT"),
    "CRIT_BALL_HARDY": _m_crit_ball,
    "STAB_CRIT": lambda *a: _m_stability(*a, case_id="STAB_CRIT"),
    "DOUBLE_WEIGHT": _m_double_weight,
    "CKN": _m_ckn,
    "DW_CLASSICAL_CHAIN": _m_dw_classical_chain,
    "DW_LOG_LIMIT": _m_dw_log,
    "GEOM_CHAIN": _m_geom_chain,
    "RELL_FIRST": _m_rell_first,
    "RELLICH_CHAIN": _m_rellich_chain,
    "HIGHER_ODD": lambda *a: _m_higher(*a, case_id="HIGHER_ODD"),
    "HIGHER_EVEN": lambda *a: _m_higher(*a, case_id="HIGHER_EVEN"),
}


# ---------------------------------------------------------------- public evaluators


def run_case(case_id: str, params: ParamSet | None, model: ManifoldModel, f: RadialFunction,
             spec: QuadratureSpec | None = None, check: bool = True) -> list[VerificationReport]:
    """Evaluate any registry case; chains give one report per link.

    With ``check=False`` the hypotheses are not enforced; the violations are
    recorded in the report notes instead.
    """
    spec = spec or QuadratureSpec()
    case = get_case(case_id)
    ps = resolve_params(case_id, params, model)
    bad = validate_params(case_id, ps)
    if bad and check:
        raise HypothesisError(f"{case_id}: " + "; ".join(bad))
    measures = _MEASURES[case_id](ps, model, f, spec)
    shown = ps.as_dict(case.uses)
    reports = []
    for i, (l, le, r, re, const, notes) in enumerate(measures):
        rep = VerificationReport(case_id, shown, model.name, f.label, l, r, const, le, re,
                                 link=(i + 1) if case.kind == "chain" else None, notes=list(notes))
        if bad:
            rep.notes.append("hypotheses not satisfied: " + "; ".join(bad))
        reports.append(rep)
    return reports


def evaluate(case_id: str, params: ParamSet | None, model: ManifoldModel, f: RadialFunction,
             spec: QuadratureSpec | None = None) -> VerificationReport:
    """Single-inequality cases; use :func:`chain_evaluate` for chains."""
    if get_case(case_id).kind == "chain" and case_id != "DW_LOG_LIMIT":
        raise ValueError(f"{case_id} is a chain; use chain_evaluate")
    return run_case(case_id, params, model, f, spec)[0]


def chain_evaluate(case_id: str, params, model, f, spec=None) -> list[VerificationReport]:
    if case_id not in CHAIN_IDS:
        raise ValueError(f"{case_id} is not a chain case")
    return run_case(case_id, params, model, f, spec)


def ckn_evaluate(params, model, f, spec=None) -> VerificationReport:
    return run_case("CKN", params, model, f, spec)[0]


def higher_order_evaluate(params, model, f, spec=None, check: bool = True) -> VerificationReport:
    ps = params or ParamSet()
    k = ps.k if ps.k is not None else 3
    cid = "HIGHER_ODD" if k % 2 else "HIGHER_EVEN"
    return run_case(cid, ps, model, f, spec, check=check)[0]


@dataclass
class IdentityResult:
    residual: float
    lhs: float
    t1: float
    t2: float
    t3: float
    error_estimate: float


def identity_terms(params: ParamSet, model: ManifoldModel, f: RadialFunction,
                   spec: QuadratureSpec | None = None) -> IdentityResult:
    spec = spec or QuadratureSpec()
    p = params.p
    if p is None or not p > 1:
        raise HypothesisError("the identity needs 1 < p")
    s0, s1 = f.support.r0, f.support.r1
    if not (s0 > 0 and math.isfinite(s1)):
        raise AdmissibilityError(f"{f.label}: support must be bounded and away from the pole")
    lhs, t1, t2, t3 = _identity_terms(params, model, f, spec, s0, s1)
    L, T1, T2, T3 = (float(np.real(x.value)) for x in (lhs, t1, t2, t3))
    p_ = p
    rhs = p_ ** p_ * T1 - p_ * T2 - p_ * T3
    err = lhs.error_estimate + p_ ** p_ * t1.error_estimate + p_ * (t2.error_estimate + t3.error_estimate)
    scale = max(abs(L), 1e-300)
    res = 0.0 if L == 0 and rhs == 0 else abs(L - rhs) / scale
    return IdentityResult(res, L, p_ ** p_ * T1, p_ * T2, p_ * T3, err)


def identity_residual(params: ParamSet, model: ManifoldModel, f: RadialFunction,
                      spec: QuadratureSpec | None = None) -> float:
    """|LHS - (T1 - T2 - T3)| / max(|LHS|, eps) for the critical identity."""
    return identity_terms(params, model, f, spec).residual


def admissible(case_id: str, params: ParamSet | None, model: ManifoldModel,
               f: RadialFunction | None = None) -> tuple[bool, str]:
    """Whether the case applies to (model, f) at the resolved params."""
    try:
        ps = resolve_params(case_id, params, model)
    except HypothesisError as exc:
        return False, str(exc)
    bad = validate_params(case_id, ps)
    if bad:
        return False, "; ".join(bad)
    case = get_case(case_id)
    if case.euclidean_only and not model.is_euclidean:
        return False, f"{case_id} needs a model with constant density"
    if f is not None:
        try:
            _support_in(case_id, f, ps, model)
        except AdmissibilityError as exc:
            return False, str(exc)
    return True, ""
