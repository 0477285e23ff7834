"""Scalar functionals and constants used by the stability and identity checks."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import jets as jx
from .jets import Jet
from .manifold import ManifoldModel, ModelError, density, sphere_area
from .quadrature import IntegralResult, QuadratureSpec, integrate_adaptive
from .radial import RadialFunction

SUBCRITICAL = "subcritical"
CRITICAL = "critical"


@dataclass(frozen=True)
class StabilityParams:
    p: float
    beta: float
    N: int
    kind: str = SUBCRITICAL

    def violations(self) -> list[str]:
        out = []
        if self.kind not in (SUBCRITICAL, CRITICAL):
            out.append(f"unknown stability kind {self.kind!r}")
        if not (2 <= self.p < self.N):
            out.append(f"need 2 <= p < N (p={self.p:g}, N={self.N})")
        if self.kind == SUBCRITICAL and not self.p + self.beta < self.N:
            out.append(f"need p + beta < N (p+beta={self.p + self.beta:g}, N={self.N})")
        return out

    def validate(self) -> "StabilityParams":
        bad = self.violations()
        if bad:
            raise ValueError("; ".join(bad))
        return self


# ------------------------------------------------------------------ R_p


_PSI_SERIES_CUT = 1e-2
_PSI_TERMS = 9


def _psi(p: float, s):
    """(1+s)^p/p - (1+s)^2/2 + 1/2 - 1/p, accurate for small s (it is O(s^2))."""
    s = np.asarray(s, dtype=float)
    small = np.abs(s) < _PSI_SERIES_CUT
    with np.errstate(divide="ignore", invalid="ignore"):
        direct = np.expm1(p * np.log1p(s)) / p - s - s * s / 2
    ser = (p - 2) / 2 * s ** 2
    coef = (p - 1) * (p - 2) / 2  # binom(p, k) / p, built up from k = 3
    for k in range(3, _PSI_TERMS):
        coef = coef / k if k == 3 else coef * (p - k + 1) / k
        ser = ser + coef * s ** k
    return np.where(small, ser, direct)


def r_p_weighted(p: float, zeta, eta):
    """(1/p)|eta|^p + ((p-1)/p)|zeta|^p - |zeta|^{p-2} Re(zeta conj(eta)).

    This is R_p(zeta, eta) |zeta - eta|^2, the Bregman divergence of
    |x|^p/p. It is 0 at zeta = eta and at zeta = 0 reduces to |eta|^p / p.
    Near the diagonal it is evaluated as
    |zeta|^{p-2}|eta-zeta|^2/2 + |zeta|^p psi((|eta|-|zeta|)/|zeta|)
    so that nothing cancels.
    """
    if not p > 1:
        raise ValueError(f"R_p needs p > 1, got {p}")
    zeta = np.asarray(zeta)
    eta = np.asarray(eta)
    az = np.abs(zeta)
    ae = np.abs(eta)
    cross = np.real(zeta * np.conj(eta))
    safe = np.where(az > 0, az, 1.0)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        mixed = np.where(az > 0, safe ** (p - 2) * cross, 0.0)
        plain = ae ** p / p + (p - 1) / p * az ** p - mixed
        w = eta - zeta
        # |eta| - |zeta| without cancellation
        gap = np.real(w * np.conj(eta + zeta)) / np.where(ae + az > 0, ae + az, 1.0)
        s = gap / safe
        near = safe ** (p - 2) * np.abs(w) ** 2 / 2 + safe ** p * _psi(p, np.clip(s, -0.5, 0.5))
    return np.where((az > 0) & (np.abs(s) <= 0.5), near, plain)


def r_p(p: float, zeta, eta):
    """Unweighted R_p; the zeta = eta branch is ((p-1)/2)|zeta|^{p-2}."""
    zeta = np.asarray(zeta, dtype=complex)
    eta = np.asarray(eta, dtype=complex)
    d2 = np.abs(zeta - eta) ** 2
    same = d2 == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        out = r_p_weighted(p, zeta, eta) / np.where(same, 1.0, d2)
    return np.where(same, (p - 1) / 2 * np.abs(zeta) ** (p - 2), out)


# ------------------------------------------------------------------ constants

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(fn: Callable[[float], float], lo: float, hi: float,
                   tol: float = 1e-12, maximize: bool = False) -> tuple[float, float]:
    """Golden-section search on [lo, hi]; returns (x*, fn(x*))."""
    sgn = -1.0 if maximize else 1.0
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = sgn * fn(c), sgn * fn(d)
    while abs(b - a) > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = sgn * fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = sgn * fn(d)
    x = 0.5 * (a + b)
    return x, fn(x)


def _cp_objective(p: float, t):
    return (1 - t) ** p - t ** p + p * t ** (p - 1)


def c_p_constant(p: float, grid: int = 10_000) -> float:
    """min over 0 < t < 1/2 of (1-t)^p - t^p + p t^{p-1}."""
    if not p >= 2:
        raise ValueError(f"c_p is defined for p >= 2, got {p}")
    t = (np.arange(grid) + 0.5) * (0.5 / grid)
    vals = _cp_objective(p, t)
    i = int(np.argmin(vals))
    lo = max(t[i] - 0.5 / grid, 1e-15)
    hi = min(t[i] + 0.5 / grid, 0.5)
    _, v = golden_section(lambda s: _cp_objective(p, s), lo, hi, tol=1e-12)
    return float(min(v, vals[i]))


def lambda_constant(i: int, N: int, p: float, beta: float) -> float:
    """((N(p-1) + beta + i p)/p)^p, with the i = -1 entry fixed to 1."""
    if int(i) != i or i < -1:
        raise ValueError("index i must be an integer >= -1")
    if i == -1:
        return 1.0
    base = (N * (p - 1) + beta + i * p) / p
    if not base > 0:
        raise ValueError(f"Lambda_{i}: base {base:g} must be positive")
    return base ** p


def stability_constant(p: float) -> float:
    """c_p ((p-1)/p)^p."""
    return c_p_constant(p) * ((p - 1) / p) ** p


# ------------------------------------------------------------------ distances

# inside this relative band around the removable point the quotient
# numerator/log is evaluated from its Taylor expansion instead
REMOVABLE_BAND = 1e-5


def _quotient_near(num: Jet, den: Jet, d):
    """num/den at offset d from a common zero, from order-3 jets."""
    n1, n2, n3 = num.c[1], num.c[2], num.c[3]
    l1, l2, l3 = den.c[1], den.c[2], den.c[3]
    return (n1 + n2 * d + n3 * d * d) / (l1 + l2 * d + l3 * d * d)


def _support(f: RadialFunction) -> tuple[float, float]:
    s0, s1 = f.support.r0, f.support.r1
    if not (s0 > 0 and math.isfinite(s1)):
        raise ModelError(f"{f.label}: stability distances need support away from 0 and bounded")
    return s0, s1


def d_H_power(model: ManifoldModel, f: RadialFunction, R: float, params: StabilityParams,
              spec: QuadratureSpec | None = None) -> IntegralResult:
    """d_H(f, R)^p together with its quadrature error estimate."""
    if params.kind != SUBCRITICAL:
        raise ValueError("d_H needs sub-critical parameters")
    spec = spec or QuadratureSpec()
    p, beta, N = params.p, params.beta, model.N
    kappa = (N - p - beta) / p
    s0, s1 = _support(f)
    fR = complex(f.value(R)) if s0 <= R < s1 else 0.0
    A = R ** kappa * fR
    CA = abs(A) ** p

    if CA > 0 and not model.is_euclidean:
        # the trace term decays like r^{-kappa} while J grows exponentially
        return IntegralResult(math.inf, 0.0, 0)

    x = Jet.variable(np.array([R]), 3)
    num_jet = f.jet(np.array([R]), 3) - (x ** (-kappa)) * A
    den_jet = (jx.log(x) * -1.0) + math.log(R)

    def integrand(r):
        w = r ** (N - 1 - p - beta) * density(model, r)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = (f.value(r) - A * r ** (-kappa)) / np.log(R / r)
        near = np.abs(r - R) < REMOVABLE_BAND * R
        if near.any():
            q = np.where(near, _quotient_near(num_jet, den_jet, r - R), q)
        return np.abs(q) ** p * w

    splits = (R,) if s0 < R < s1 else ()
    res = integrate_adaptive(integrand, s0, s1, spec.with_(split_points=splits))
    if CA > 0:
        # outside the support: |A|^p / (r |log(R/r)|^p), closed form in u = log(R/r)
        u0, u1 = math.log(R / s0), math.log(s1 / R)
        tails = CA * (u0 ** (1 - p) + u1 ** (1 - p)) / (p - 1) if u0 > 0 and u1 > 0 else math.inf
        res = IntegralResult(res.value + tails, res.error_estimate, res.subdivisions_used, tails)
    return res.scaled(sphere_area(N))


def d_H(model, f, R, params, spec=None) -> float:
    v = d_H_power(model, f, R, params, spec).value
    return float(abs(v)) ** (1.0 / params.p)


def d_C_power(model: ManifoldModel, f: RadialFunction, R: float, params: StabilityParams,
              spec: QuadratureSpec | None = None) -> IntegralResult:
    """d_C(f, R)^p on the unit ball, trace taken at tau = exp(-1/R)."""
    if params.kind != CRITICAL:
        raise ValueError("d_C needs critical parameters")
    if not model.is_euclidean:
        raise ModelError("d_C is only defined here for models with constant density (Euclidean)")
    spec = spec or QuadratureSpec()
    p, N = params.p, model.N
    s0, s1 = _support(f)
    if s1 > 1:
        raise ModelError(f"{f.label}: d_C needs support inside the unit ball")
    tau = math.exp(-1.0 / R)
    ft = complex(f.value(tau)) if s0 <= tau < s1 else 0.0
    C = R ** ((p - 1) / p) * ft
    CC = abs(C) ** p
    e = (p - 1) / p

    # for small R, tau underflows and the expansion is never used
    with np.errstate(all="ignore"):
        x = Jet.variable(np.array([tau]), 3)
        Lx = jx.log(x) * -1.0
        num_jet = f.jet(np.array([tau]), 3) - (Lx ** e) * C
        den_jet = jx.log(Lx) + math.log(R)

    def integrand(r):
        L = np.log(1.0 / r)
        with np.errstate(divide="ignore", invalid="ignore"):
            q = (f.value(r) - L ** e * C) / np.log(R * L)
        near = np.abs(r - tau) < REMOVABLE_BAND * tau
        if near.any():
            q = np.where(near, _quotient_near(num_jet, den_jet, r - tau), q)
        return np.abs(q) ** p / (r * L ** p)

    splits = (tau,) if s0 < tau < s1 else ()
    res = integrate_adaptive(integrand, s0, s1, spec.with_(split_points=splits))
    if CC > 0:
        v0 = math.log(R * math.log(1.0 / s0))
        v1 = -math.log(R * math.log(1.0 / s1))
        tails = CC * (v0 ** (1 - p) + v1 ** (1 - p)) / (p - 1) if v0 > 0 and v1 > 0 else math.inf
        res = IntegralResult(res.value + tails, res.error_estimate, res.subdivisions_used, tails)
    return res.scaled(sphere_area(N))


def d_C(model, f, R, params, spec=None) -> float:
    v = d_C_power(model, f, R, params, spec).value
    return float(abs(v)) ** (1.0 / params.p)


@dataclass(frozen=True)
class SearchRange:
    lo: float = 1e-3
    hi: float = 1e3
    points: int = 61
    refine_tol: float = 1e-6  # in log R


def sup_over_R(distance: Callable[[float], float], search: SearchRange | None = None
               ) -> tuple[float, float]:
    """Log-grid scan plus golden-section refinement; returns (R*, value).

    The result is a lower bound for the true supremum.
    """
    search = search or SearchRange()
    grid = np.geomspace(search.lo, search.hi, search.points)
    vals = np.array([distance(float(R)) for R in grid], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise ValueError("distance is not finite on the search grid")
    if np.all(vals == 0):
        raise ValueError("distance vanishes on the whole search grid")
    i = int(np.argmax(vals))
    best_R, best = float(grid[i]), float(vals[i])
    lo = math.log(grid[max(i - 1, 0)])
    hi = math.log(grid[min(i + 1, len(grid) - 1)])
    x, v = golden_section(lambda s: distance(math.exp(s)), lo, hi,
                          tol=search.refine_tol, maximize=True)
    if v > best:
        best_R, best = math.exp(x), float(v)
    return best_R, best
