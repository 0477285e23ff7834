"""Adaptive 1-D quadrature for radial integrands.

The workhorse is a vectorized adaptive Gauss-Kronrod (10/21) scheme.  Panels
never touch their endpoints, which makes every panel an open rule.  Singular
ends (and every declared split point) are handled by the change of variables
``x = e +/- exp(-u)``, which turns algebraic and logarithmic endpoint
singularities into smooth, decaying integrands in ``u``; infinite upper
limits are treated the same way in the original variable.  Whatever lies
beyond the last representable abscissa is added in closed form from a
three-point fit of the model ``A u^{-q} exp(-lam u)``, which is exact for
pure power and pure logarithmic singularities.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import mpmath
import numpy as np

from .manifold import ManifoldModel, Region, density, sphere_area

# Gauss-Kronrod 21-point nodes/weights (QUADPACK qk21), nonnegative half.
_XGK = np.array([
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525452472, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
])
_WG = np.array([
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
])
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
W_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
W_GAUSS = np.zeros(21)
# Gauss nodes are the odd-indexed Kronrod nodes in the half table.
for _i, _w in enumerate(_WG):
    _j = 2 * _i + 1
    W_GAUSS[_j] = _w
    W_GAUSS[20 - _j] = _w
_EPS = np.finfo(float).eps


class QuadratureError(RuntimeError):
    """Raised when tolerance is not met; carries the best estimate."""

    def __init__(self, message: str, result: "IntegralResult | None" = None):
        super().__init__(message)
        self.result = result


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 2000
    endpoint_offsets: tuple[float, float] = (0.0, 0.0)
    split_points: tuple[float, ...] = ()
    singular: tuple[bool, bool] = (False, False)
    initial_panels: int = 4

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if min(self.endpoint_offsets) < 0:
            raise ValueError("endpoint offsets must be nonnegative")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be positive")

    def with_(self, **changes) -> "QuadratureSpec":
        return replace(self, **changes)


@dataclass
class IntegralResult:
    value: complex | float
    error_estimate: float
    subdivisions_used: int = 0
    tail: complex | float = 0.0

    def __add__(self, other: "IntegralResult") -> "IntegralResult":
        return IntegralResult(
            self.value + other.value,
            self.error_estimate + other.error_estimate,
            self.subdivisions_used + other.subdivisions_used,
            self.tail + other.tail,
        )

    def scaled(self, factor: float) -> "IntegralResult":
        return IntegralResult(self.value * factor, self.error_estimate * abs(factor),
                              self.subdivisions_used, self.tail * factor)

    @property
    def real(self) -> float:
        return float(np.real(self.value))


# --------------------------------------------------------------------------
# segments: a variable t on [t0, t_cap] mapped into x


@dataclass
class _Segment:
    kind: str  # "linear", "left", "right", "infinite"
    anchor: float
    t0: float
    t_cap: float
    tail: bool

    def map(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if self.kind == "linear":
            return t, np.ones_like(t)
        if self.kind == "infinite":
            e = np.exp(t)
            return self.anchor + e, e
        d = np.exp(-t)
        if self.kind == "left":
            return self.anchor + d, d
        return self.anchor - d, d


def _probe(integrand, seg: _Segment, t: np.ndarray) -> np.ndarray:
    x, jac = seg.map(np.asarray(t, dtype=float))
    with np.errstate(all="ignore"):
        v = np.asarray(integrand(x)) * jac
    return v


def _choose_cap(integrand, seg: _Segment, candidates) -> float:
    for cap in candidates:
        if cap <= seg.t0 + 1.0:
            continue
        pts = _fit_points(seg.t0, cap)
        v = _probe(integrand, seg, np.concatenate([pts, np.linspace(seg.t0, cap, 17)[1:]]))
        if np.all(np.isfinite(v)):
            return cap
    raise QuadratureError("integrand is not finite near a singular end")


def _fit_points(t0: float, cap: float, shift: int = 0) -> np.ndarray:
    # three points ending at the cap; shift=1 doubles the spacing (error check)
    lo = max(t0, 0.0)
    step = (cap - lo) / 8.0 * (2.0 ** shift)
    return cap - step * np.array([2.0, 1.0, 0.0])


CF_MIN_X = 1.0


def _upper_gamma_ratio(q: float, x: float) -> float | None:
    """x e^x x^(q-1) Gamma(1-q, x) by the Lentz continued fraction, or None
    for small x or no convergence (the caller then uses mpmath)."""
    if x < CF_MIN_X:
        return None
    sa = 1.0 - q
    tiny = 1e-300
    b = x + 1.0 - sa
    if abs(b) < 1e-8:
        return None
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 300):
        an = -i * (i - sa)
        b += 2.0
        d = an * d + b
        d = d if abs(d) > tiny else tiny
        c = b + an / c
        c = c if abs(c) > tiny else tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return x * h
    return None


def _fit_tail(vals: np.ndarray, ts: np.ndarray, cap: float) -> complex | float | None:
    """Closed-form tail beyond ``cap`` of the model A t^-q e^{-lam t}
    fitted through three samples; None if the fit says divergence."""
    mags = np.abs(vals)
    if mags[-1] == 0.0:
        return 0.0
    if np.any(mags == 0.0):
        return None
    M = np.column_stack([np.ones(3), -np.log(ts), -ts])
    try:
        logA, q, lam = np.linalg.solve(M, np.log(mags))
    except np.linalg.LinAlgError:
        return None
    phase = vals[-1] / mags[-1]
    # model value at the cap (the fit points need not include it)
    g_cap = math.exp(logA - q * math.log(cap) - lam * cap)
    if abs(lam) * cap < 1e-9:
        if q <= 1.0 + 1e-12:
            return None
        tail = g_cap * cap / (q - 1.0)
    elif lam < 0:
        return None
    else:
        x = lam * cap
        series = _upper_gamma_ratio(q, x)
        if series is not None:
            tail = g_cap * cap * series / x
            return phase * tail if np.iscomplexobj(vals) else float(np.real(phase) * tail)
        # A lam^(q-1) Gamma(1-q, lam cap); written relative to g_cap for range safety
        gi = mpmath.gammainc(1.0 - q, x, mpmath.inf)
        tail = float(g_cap * cap * mpmath.exp(x) * gi / mpmath.power(x, 1.0 - q))
        if not math.isfinite(tail):
            tail = float(mpmath.exp(logA) * mpmath.power(lam, q - 1.0) * gi)
    return phase * tail if np.iscomplexobj(vals) else float(np.real(phase) * tail)


def _tail_estimate(integrand, seg: _Segment) -> tuple[complex | float, float]:
    ts1 = _fit_points(seg.t0, seg.t_cap)
    ts2 = _fit_points(seg.t0, seg.t_cap, shift=1)
    v1 = _probe(integrand, seg, ts1)
    v2 = _probe(integrand, seg, ts2)
    t1 = _fit_tail(v1, ts1, seg.t_cap)
    t2 = _fit_tail(v2, ts2, seg.t_cap)
    if t1 is None:
        raise QuadratureError(
            f"integrand does not decay integrably towards the {seg.kind} end at {seg.anchor:g}")
    if t2 is None:
        t2 = t1
    err = abs(t1 - t2) + 1e3 * _EPS * abs(t1)
    return t1, err


def _initial_breaks(seg: _Segment, n_linear: int) -> np.ndarray:
    if seg.kind == "linear":
        return np.linspace(seg.t0, seg.t_cap, n_linear + 1)
    # geometric grading: unit steps near the start, then doubling widths
    pts = [seg.t0]
    w = math.log(2.0)
    while pts[-1] + w < seg.t_cap:
        pts.append(pts[-1] + w)
        if len(pts) > 8:
            w *= 2.0
    pts.append(seg.t_cap)
    return np.array(pts)


def _build_segments(integrand, a: float, b: float, spec: QuadratureSpec) -> list[_Segment]:
    a = a + spec.endpoint_offsets[0]
    b = b - spec.endpoint_offsets[1]
    if not b > a:
        raise ValueError(f"empty integration interval [{a}, {b}]")
    splits = sorted(s for s in spec.split_points if a < s < b)
    knots = [a, *splits, b]
    segs: list[_Segment] = []
    for i in range(len(knots) - 1):
        lo, hi = knots[i], knots[i + 1]
        left_sing = (i > 0) or spec.singular[0]
        right_sing = (i < len(knots) - 2) or spec.singular[1]
        if math.isinf(hi):
            # x = lo + e^t beyond lo + w: algebraic decay becomes exponential in t
            w = max(1.0, abs(lo))
            if left_sing:
                segs += _log_segment(integrand, "left", lo, w)
            else:
                segs.append(_Segment("linear", 0.0, lo, lo + w, False))
            seg = _Segment("infinite", lo, math.log(w), 0.0, True)
            seg.t_cap = _choose_cap(integrand, seg, [690.0, 345.0, 115.0, 46.0])
            segs.append(seg)
            continue
        if math.isinf(lo):
            raise ValueError("lower limit must be finite")
        if left_sing and right_sing:
            mid = 0.5 * (lo + hi)
            segs += _log_segment(integrand, "left", lo, mid - lo)
            segs += _log_segment(integrand, "right", hi, hi - mid)
        elif left_sing:
            mid = lo + 0.5 * (hi - lo)
            segs += _log_segment(integrand, "left", lo, mid - lo)
            segs.append(_Segment("linear", 0.0, mid, hi, False))
        elif right_sing:
            mid = lo + 0.5 * (hi - lo)
            segs.append(_Segment("linear", 0.0, lo, mid, False))
            segs += _log_segment(integrand, "right", hi, hi - mid)
        else:
            segs.append(_Segment("linear", 0.0, lo, hi, False))
    return segs


def _log_segment(integrand, side: str, anchor: float, h: float) -> list[_Segment]:
    t0 = -math.log(h)
    seg = _Segment(side, anchor, t0, 0.0, True)
    if anchor == 0.0:
        candidates = [345.0, 230.0, 115.0, 69.0, 46.0, 30.0]
    else:
        # distances below ~1e-8 |anchor| carry rounding noise from x - anchor
        cap = -math.log(1e-8 * abs(anchor))
        candidates = [cap, 0.75 * cap, 0.5 * cap]
    seg.t_cap = _choose_cap(integrand, seg, candidates)
    return [seg]


def _gk_panels(integrand, seg: _Segment, lo: np.ndarray, hi: np.ndarray):
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    t = mid[:, None] + half[:, None] * NODES[None, :]
    x, jac = seg.map(t)
    with np.errstate(over="ignore", invalid="ignore"):
        f = np.asarray(integrand(x.ravel())).reshape(x.shape) * jac
    if not np.all(np.isfinite(f)):
        bad = x[~np.isfinite(f)]
        raise QuadratureError(f"non-finite integrand value near x={bad.flat[0]:.17g}")
    k = f @ W_KRONROD * half
    g = f @ W_GAUSS * half
    mean = k / (2.0 * half)
    resasc = (np.abs(f - mean[:, None]) @ W_KRONROD) * half
    resabs = (np.abs(f) @ W_KRONROD) * half
    err = np.abs(k - g)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where((resasc > 0) & (err > 0),
                          resasc * np.minimum(1.0, (200.0 * err / np.where(resasc > 0, resasc, 1.0)) ** 1.5),
                          err)
    scaled = np.maximum(scaled, 50.0 * _EPS * resabs)
    return k, scaled


def integrate_adaptive(integrand: Callable, a: float, b: float,
                       spec: QuadratureSpec | None = None) -> IntegralResult:
    """Integrate a vectorized ``integrand`` over [a, b] (b may be inf).

    Raises :class:`QuadratureError` (carrying the best estimate) if the
    tolerance ``max(rel_tol |I|, abs_tol)`` cannot be met.
    """
    spec = spec or QuadratureSpec()
    if not a < b:
        raise ValueError("integrate_adaptive requires a < b")
    segs = _build_segments(integrand, float(a), float(b), spec)

    tail_val: complex | float = 0.0
    tail_err = 0.0
    for seg in segs:
        if seg.tail:
            tv, te = _tail_estimate(integrand, seg)
            tail_val = tail_val + tv
            tail_err += te

    # panel table: segment index, lo, hi, value, error
    seg_ids, los, his = [], [], []
    for i, seg in enumerate(segs):
        br = _initial_breaks(seg, spec.initial_panels)
        seg_ids.append(np.full(len(br) - 1, i))
        los.append(br[:-1])
        his.append(br[1:])
    sid = np.concatenate(seg_ids)
    lo = np.concatenate(los)
    hi = np.concatenate(his)
    val, err = _evaluate(integrand, segs, sid, lo, hi)

    subdivisions = 0
    while True:
        total = val.sum() + tail_val
        total_err = float(err.sum() + tail_err)
        tol = max(spec.rel_tol * abs(total), spec.abs_tol)
        if total_err <= tol:
            break
        if subdivisions >= spec.max_subdivisions:
            res = IntegralResult(_clean(total), total_err, subdivisions, _clean(tail_val))
            raise QuadratureError(
                f"tolerance {tol:.3g} not met after {subdivisions} subdivisions "
                f"(error estimate {total_err:.3g})", res)
        if tail_err > tol and err.sum() < 0.5 * tail_err:
            res = IntegralResult(_clean(total), total_err, subdivisions, _clean(tail_val))
            raise QuadratureError(f"tail extrapolation uncertainty {tail_err:.3g} exceeds tolerance", res)
        pick = err >= 0.25 * err.max()
        pick &= (hi - lo) > 1e-14 * np.maximum(1.0, np.abs(lo))
        if not pick.any():
            res = IntegralResult(_clean(total), total_err, subdivisions, _clean(tail_val))
            raise QuadratureError("panels reached the minimum width without converging", res)
        n_new = int(pick.sum())
        if subdivisions + n_new > spec.max_subdivisions:
            order = np.argsort(-err)
            keep = order[: max(1, spec.max_subdivisions - subdivisions)]
            pick = np.zeros_like(pick)
            pick[keep] = True
            n_new = int(pick.sum())
        m = 0.5 * (lo[pick] + hi[pick])
        new_sid = np.concatenate([sid[pick], sid[pick]])
        new_lo = np.concatenate([lo[pick], m])
        new_hi = np.concatenate([m, hi[pick]])
        nv, ne = _evaluate(integrand, segs, new_sid, new_lo, new_hi)
        keep = ~pick
        sid = np.concatenate([sid[keep], new_sid])
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], nv])
        err = np.concatenate([err[keep], ne])
        subdivisions += n_new

    # fixed summation order: by segment then position
    order = np.lexsort((lo, sid))
    total = val[order].sum() + tail_val
    return IntegralResult(_clean(total), float(err.sum() + tail_err), subdivisions, _clean(tail_val))


def _evaluate(integrand, segs, sid, lo, hi):
    val = np.zeros(len(lo), dtype=complex)
    err = np.zeros(len(lo))
    for i, seg in enumerate(segs):
        m = sid == i
        if m.any():
            k, e = _gk_panels(integrand, seg, lo[m], hi[m])
            val[m] = k
            err[m] = e
    return val, err


def _clean(z):
    z = complex(z)
    return z.real if z.imag == 0.0 else z


def ball_integral(model: ManifoldModel, region: Region, integrand: Callable,
                  spec: QuadratureSpec | None = None) -> IntegralResult:
    """|S^{N-1}| * int_region integrand(r) r^{N-1} J(r) dr."""
    spec = spec or QuadratureSpec()
    N = model.N

    def radial(r):
        v = np.asarray(integrand(r))
        with np.errstate(over="ignore", invalid="ignore"):
            w = r ** (N - 1) * density(model, r)
            out = v * w
        return np.where(v == 0, 0.0, out)

    res = integrate_adaptive(radial, region.r0, region.r1, spec)
    return res.scaled(sphere_area(N))
