"""Sharpness sweeps, seeded test-function corpora and stability scans."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import jets as jx
from .catalog import (AdmissibilityError, HypothesisError, ParamSet, VerificationReport,
                      resolve_params, run_case, stability_measure, validate_params)
from .functionals import SUBCRITICAL, stability_constant
from .jets import Jet
from .manifold import ManifoldModel, Region, density, sphere_area
from .quadrature import IntegralResult, QuadratureError, QuadratureSpec, ball_integral, integrate_adaptive
from .radial import CutoffSpec, RadialFunction, extremal_boundary_family

DEFAULT_LADDER = (1e-1, 5e-2, 2e-2, 1e-2, 5e-3, 2e-3)
SWEEP_CASES = ("CRIT_LOG_GENERAL", "DOUBLE_WEIGHT", "CRIT_DUAL_LOG")
BOUNDARY_CUTOFF = 0.25  # chi = 1 on [0.75, 1], 0 below 0.5
FIT_POINTS = 3


# ---------------------------------------------------------------- corpus


@dataclass(frozen=True)
class CorpusSpec:
    seed: int = 0
    count: int = 10
    support: Region = field(default_factory=lambda: Region.annulus(0.2, 3.0))
    depth: int = 4
    value_field: str = "real"

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 1:
            raise ValueError("corpus count must be a positive integer")
        if self.value_field not in ("real", "complex"):
            raise ValueError("value_field must be 'real' or 'complex'")
        s = self.support
        if not (s.r0 > 0 and math.isfinite(s.r1)):
            raise ValueError("corpus support must be bounded and away from the pole")


def _bump_profile(lo, hi, ramp, centers, widths, amps, phase):
    inner = CutoffSpec(lo, lo + ramp, "outer")
    outer = CutoffSpec(hi - ramp, hi, "inner")

    def profile(x: Jet) -> Jet:
        lg = jx.log(x)
        g = None
        for m, s, a in zip(centers, widths, amps):
            term = jx.exp(((lg - m) * (1.0 / s)) ** 2 * -1.0) * a
            g = term if g is None else g + term
        g = g * inner.jet(x) * outer.jet(x)
        if phase is not None:
            theta = x * phase[0] + x * x * phase[1]
            g = g * jx.exp(theta * 1j)
        return g

    def values(r):
        lg = np.log(r)
        g = sum(a * np.exp(-(((lg - m) / s) ** 2)) for m, s, a in zip(centers, widths, amps))
        g = g * inner.values(r) * outer.values(r)
        if phase is not None:
            g = g * np.exp(1j * (r * phase[0] + r * r * phase[1]))
        return g
    return profile, values


def generate_corpus(spec: CorpusSpec) -> list[RadialFunction]:
    """Seeded smooth bumps on ``spec.support``: 1-3 Gaussians in log r times a
    two-sided smooth cutoff, optionally with a polynomial phase."""
    rng = np.random.default_rng(spec.seed)
    lo, hi = spec.support.r0, spec.support.r1
    llo, lhi = math.log(lo), math.log(hi)
    out = []
    for i in range(spec.count):
        ramp = (hi - lo) * rng.uniform(0.1, 0.3)
        n = int(rng.integers(1, 4))
        centers = rng.uniform(llo, lhi, n)
        widths = rng.uniform(0.15, 0.6, n) * (lhi - llo)
        amps = rng.uniform(0.5, 1.5, n) * rng.choice([-1.0, 1.0], n)
        phase = rng.uniform(-2.0, 2.0, 2) if spec.value_field == "complex" else None
        prof, values = _bump_profile(lo, hi, ramp, centers, widths, amps, phase)
        label = f"corpus[s{spec.seed}:{i}:{spec.value_field}]"
        out.append(RadialFunction(label, Region.annulus(lo, hi),
                                  jet_fn=lambda r, n, prof=prof: prof(Jet.variable(r, n)),
                                  value_fn=values))
    return out


# ---------------------------------------------------------------- sweeps


@dataclass
class SweepResult:
    case: str
    params: dict
    model: str
    values: list[float]
    ratios: list[float]
    ratio_errors: list[float]
    limit: float
    target: float
    errors: dict = field(default_factory=dict)  # sweep value -> message
    lhs_values: list[float] = field(default_factory=list)
    rhs_values: list[float] = field(default_factory=list)
    max_gap: float = 0.02

    @property
    def gap(self) -> float:
        """Relative gap |limit - target| / target."""
        return abs(self.limit - self.target) / abs(self.target)

    def slack(self, i: int) -> float:
        return 10.0 * self.ratio_errors[i] + 1e-9 * abs(self.ratios[i])

    def never_below_target(self) -> bool:
        return all(r >= self.target - self.slack(i) for i, r in enumerate(self.ratios)
                   if math.isfinite(r))

    @property
    def passed(self) -> bool:
        return bool(math.isfinite(self.limit) and self.gap <= self.max_gap and self.never_below_target())

    def to_dict(self) -> dict:
        return {"case": self.case, "params": self.params, "model": self.model,
                "values": self.values, "ratios": self.ratios, "ratio_errors": self.ratio_errors,
                "limit": self.limit, "target": self.target, "gap": self.gap, "max_gap": self.max_gap,
                "pass": self.passed,
                "errors": {f"{k:.17g}": v for k, v in sorted(self.errors.items())}}

    def point_results(self) -> list[dict]:
        """One report row per sweep value (ratio checked against the target)."""
        rows = []
        for i, s in enumerate(self.values):
            L = self.lhs_values[i] if i < len(self.lhs_values) else math.nan
            Rv = self.rhs_values[i] if i < len(self.rhs_values) else math.nan
            r = self.ratios[i]
            ok = math.isfinite(r) and r >= self.target - self.slack(i)
            err_l = L * self.ratio_errors[i] / r if math.isfinite(r) and r else math.nan
            rows.append({
                "case": self.case, "params": self.params, "model": self.model,
                "function": f"extremal family at sweep value {s:.6g}",
                "lhs": L, "rhs": Rv, "ratio": r, "constant": self.target,
                "deficit": Rv - self.target * L, "margin": Rv - self.target * L,
                "slack": self.slack(i) * L if math.isfinite(L) else math.nan,
                "error_estimates": {"lhs": err_l, "rhs": 0.0},
                "pass": bool(ok),
                "notes": [self.errors[s]] if s in self.errors else [],
            })
        return rows


def extrapolate_linear(values, ratios, points: int = FIT_POINTS) -> float:
    """Intercept at 0 of the least-squares line through the ``points``
    smallest sweep values."""
    pairs = sorted((v, r) for v, r in zip(values, ratios) if math.isfinite(r))
    if not pairs:
        raise ValueError("no finite sweep ratios to extrapolate")
    pairs = pairs[:points]
    if len(pairs) == 1:
        return pairs[0][1]
    x = np.array([p[0] for p in pairs])
    y = np.array([p[1] for p in pairs])
    slope, intercept = np.polyfit(x, y, 1)
    return float(intercept)


def _core_log(model, kappa_param: float, p: float, R: float, spec) -> IntegralResult:
    """|S| int_{log 2}^inf u^{-1-p s} J(R e^{-u}) du, leading part in closed form."""
    ps = p * kappa_param
    u0 = math.log(2.0)
    closed = u0 ** (-ps) / ps
    res = IntegralResult(closed, 1e-15 * closed, 0)
    if not model.is_euclidean:
        corr = integrate_adaptive(lambda u: u ** (-1 - ps) * (density(model, np.maximum(R * np.exp(-u), 1e-300)) - 1.0),
                                  u0, math.inf, spec)
        res = res + corr
    return res.scaled(sphere_area(model.N))


def _log_family(exponent: float, R: float) -> RadialFunction:
    cut = CutoffSpec(0.5 * R, 0.75 * R, "inner")

    def jet_fn(r, n):
        x = Jet.variable(np.minimum(r, cut.outer), n)
        L = (jx.log(x) * -1.0) + math.log(R)
        return (L ** exponent) * cut.jet(x)
    return RadialFunction(f"logpow[e={exponent:g},R={R:g}]", Region.annulus(0.0, cut.outer), jet_fn=jet_fn)


def _ratio_log_type(case_id, ps: ParamSet, model, s: float, spec):
    """Ratio rhs/lhs for the log-power family with core exponent -1 - p s."""
    p = ps.p
    if case_id == "CRIT_LOG_GENERAL":
        R, gamma = ps.R, ps.gamma
        e = (gamma - 1 - p * s) / p
        if not e > 0:
            raise ValueError(f"sweep value {s:g} too large: exponent (gamma-1-p delta)/p <= 0")
        lw = lambda r: 1.0 / (r ** model.N * np.abs(np.log(R / r)) ** gamma)
        rw = lambda r: r ** (p - model.N) * np.abs(np.log(R / r)) ** (p - gamma)
    else:  # CRIT_DUAL_LOG, family (log 1/r)^{-(1/p + s)}
        R, e = 1.0, -(1.0 / p + s)
        lw = lambda r: 1.0 / r ** model.N
        rw = lambda r: np.abs(np.log(r)) ** p * r ** (p - model.N)
    f = _log_family(e, R)
    core = _core_log(model, s, p, R, spec)
    ring = Region.annulus(0.5 * R, 0.75 * R)
    tl = ball_integral(model, ring, lambda r: np.abs(f.value(r)) ** p * lw(r), spec)
    tr = ball_integral(model, ring, lambda r: np.abs(f.d1(r)) ** p * rw(r), spec)
    lhs = core + tl
    rhs = core.scaled(abs(e) ** p) + tr
    return lhs, rhs


def _ratio_boundary(ps: ParamSet, model, s: float, spec):
    """Ratio for f_t = chi (1 - r^c)^t with t = (b-1)/p + s."""
    p, a, b, c, N = ps.p, ps.a, ps.b, ps.c, model.N
    t = (b - 1) / p + s
    dl = BOUNDARY_CUTOFF
    f = extremal_boundary_family(t, c, dl)
    S = sphere_area(N)
    ex = p * t - b  # = -1 + p s
    w0 = 1.0 - (1.0 - dl) ** c

    def g(w, extra):
        r = (1.0 - w) ** (1.0 / c)
        return r ** (N - a - c + extra) * density(model, r)

    def core(extra):
        g0 = float(g(np.array([1e-300]), extra)[0])
        closed = g0 * w0 ** (ex + 1) / (ex + 1)
        rem = integrate_adaptive(lambda w: w ** ex * (g(w, extra) - g0), 0.0, w0,
                                 spec.with_(singular=(True, False)))
        return (IntegralResult(closed, 1e-15 * abs(closed), 0) + rem).scaled(S / c)

    ring = Region.annulus(1.0 - 2 * dl, 1.0 - dl)
    tl = ball_integral(model, ring, lambda r: np.abs(f.value(r)) ** p / (r ** a * (1 - r ** c) ** b), spec)
    tr = ball_integral(model, ring, lambda r: np.abs(f.d1(r)) ** p / (r ** (a - p) * (1 - r ** c) ** (b - p)),
                       spec)
    lhs = core(0.0) + tl
    rhs = core(c).scaled((t * c) ** p) + tr
    return lhs, rhs


def sharpness_sweep(case_id: str, params: ParamSet | None, model: ManifoldModel,
                    values=DEFAULT_LADDER, spec: QuadratureSpec | None = None,
                    max_gap: float = 0.02) -> SweepResult:
    """Drive the case's extremal family toward its limit and extrapolate.

    ``values`` are delta for CRIT_LOG_GENERAL, t - (b-1)/p for DOUBLE_WEIGHT
    and the excess exponent over 1/p for CRIT_DUAL_LOG.
    """
    if case_id not in SWEEP_CASES:
        raise ValueError(f"no sharpness sweep for {case_id}; available: {', '.join(SWEEP_CASES)}")
    spec = spec or QuadratureSpec()
    ps = resolve_params(case_id, params, model)
    bad = validate_params(case_id, ps)
    if bad:
        raise HypothesisError(f"{case_id}: " + "; ".join(bad))
    if case_id == "CRIT_DUAL_LOG" and not model.is_euclidean:
        raise AdmissibilityError("CRIT_DUAL_LOG needs a model with constant density (Euclidean)")
    vals = [float(v) for v in values]
    if not vals or any(v <= 0 for v in vals) or any(x <= y for x, y in zip(vals, vals[1:])):
        raise ValueError("sweep values must be positive and strictly decreasing")
    p = ps.p
    if case_id == "CRIT_LOG_GENERAL":
        target = ((ps.gamma - 1) / p) ** p
    elif case_id == "DOUBLE_WEIGHT":
        target = ((ps.b - 1) * ps.c / p) ** p
    else:
        target = p ** (-p)
    ratios, rerrs, errors, lhs_v, rhs_v = [], [], {}, [], []
    for s in vals:
        try:
            if case_id == "DOUBLE_WEIGHT":
                lhs, rhs = _ratio_boundary(ps, model, s, spec)
            else:
                lhs, rhs = _ratio_log_type(case_id, ps, model, s, spec)
            L, Rv = float(np.real(lhs.value)), float(np.real(rhs.value))
            ratio = Rv / L
            if not math.isfinite(ratio):
                raise ValueError("non-finite ratio")
            # CRIT_DUAL_LOG is normalized as p^-p lhs <= rhs, so the ratio is rhs/lhs as well
            err = abs(ratio) * (rhs.error_estimate / abs(Rv) + lhs.error_estimate / abs(L))
        except (QuadratureError, ValueError, ZeroDivisionError) as exc:
            ratio, err, L, Rv = math.nan, math.nan, math.nan, math.nan
            errors[s] = str(exc)
        lhs_v.append(L)
        rhs_v.append(Rv)
        ratios.append(ratio)
        rerrs.append(err)
    limit = extrapolate_linear(vals, ratios) if any(math.isfinite(r) for r in ratios) else math.nan
    return SweepResult(case_id, ps.as_dict(), model.name, vals, ratios, rerrs, limit, target, errors,
                       lhs_v, rhs_v, max_gap)


# ---------------------------------------------------------------- stability


def stability_deficit_scan(kind: str, params: ParamSet | None, model: ManifoldModel,
                           corpus: list[RadialFunction], spec: QuadratureSpec | None = None
                           ) -> list[VerificationReport]:
    """One report per corpus function; margin = deficit - c_p((p-1)/p)^p sup d^p."""
    case_id = "STAB_SUBCRIT" if kind == SUBCRITICAL else "STAB_CRIT"
    if not corpus:
        raise ValueError("empty corpus")
    return [run_case(case_id, params, model, f, spec)[0] for f in corpus]


@dataclass
class OpenProblemValue:
    E: float
    lower_bound: float
    sup_distance: float
    deficit: float
    R_star: float
    slack: float


def open_problem_value(f: RadialFunction, params: ParamSet | None, model: ManifoldModel,
                       spec: QuadratureSpec | None = None) -> OpenProblemValue:
    spec = spec or QuadratureSpec()
    ps = resolve_params("STAB_SUBCRIT", params, model)
    bad = validate_params("STAB_SUBCRIT", ps)
    if bad:
        raise HypothesisError("; ".join(bad))
    sup, se, dfc, de, R_star, const = stability_measure("STAB_SUBCRIT", ps, model, f, spec)
    if not sup > 0:
        raise ValueError("sup_R d_H vanishes; E(f) is undefined")
    E = dfc / sup
    # slack on E from the error estimates of both parts
    slack = 10.0 * (de / sup + abs(dfc) * se / sup ** 2) + 1e-9 * abs(E)
    return OpenProblemValue(E, stability_constant(ps.p), sup, dfc, R_star, slack)


def open_problem_E(f, params, model, spec=None) -> float:
    """Deficit divided by sup_R d_H(f, R)^p."""
    return open_problem_value(f, params, model, spec).E
