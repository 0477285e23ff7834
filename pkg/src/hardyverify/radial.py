"""Radial test functions, cutoffs, the radial Laplacian and its iterates.

A :class:`RadialFunction` is normally backed by a *jet function*
``jet_fn(r, order) -> Jet`` that returns the Taylor jet of the profile at the
points ``r``; every derivative then comes out exactly.  Functions given only
by plain callables fall back to Richardson-checked central differences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import jets as jx
from .jets import Jet
from .manifold import ManifoldModel, ModelError, Region, mean_curvature_jet

JetFn = Callable[[np.ndarray, int], Jet]


class SmoothnessError(ValueError):
    """Finite-difference derivatives failed the Richardson agreement check."""


FD_AGREEMENT = 1e-6


def _fd_step(r: np.ndarray) -> np.ndarray:
    return np.maximum(1e-6, 1e-4 * np.abs(r))


@dataclass(frozen=True)
class RadialFunction:
    """A radial profile with its support.

    With ``jet_fn`` every derivative is exact; an optional ``value_fn`` next
    to it is a faster path for plain values and must agree with the jet.
    """

    label: str
    support: Region
    jet_fn: JetFn | None = field(default=None, compare=False)
    value_fn: Callable | None = field(default=None, compare=False)
    d1_fn: Callable | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.jet_fn is None and self.value_fn is None:
            raise ValueError("a RadialFunction needs jet_fn or value_fn")

    # ---------------------------------------------------------------
    @property
    def analytic(self) -> bool:
        return self.jet_fn is not None

    def _inside(self, r: np.ndarray) -> np.ndarray:
        s = self.support
        return (r >= s.r0) & (r < s.r1) & (r > 0)

    def jet(self, r, order: int) -> Jet:
        """Taylor jet of order ``order`` at ``r``; zero outside the support."""
        if self.jet_fn is None:
            raise SmoothnessError(f"{self.label}: no analytic jet available")
        r = np.atleast_1d(np.asarray(r, dtype=float))
        inside = self._inside(r)
        out = np.zeros((order + 1,) + r.shape, dtype=complex)
        if inside.any():
            j = self.jet_fn(r[inside], order)
            out[:, inside] = j.c[: order + 1]
        if not np.any(out.imag):
            out = out.real
        return Jet(out)

    def derivative(self, r, k: int = 0):
        """k-th radial derivative at ``r`` (k = 0 gives the value)."""
        scalar = np.ndim(r) == 0
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if k == 0 and self.value_fn is not None:
            inside = self._inside(r)
            v = np.where(inside, self.value_fn(np.where(inside, r, 1.0)), 0.0)
        elif self.jet_fn is not None:
            v = self.jet(r, k).derivative(k)
        elif k == 0:
            v = np.where(self._inside(r), self.value_fn(np.where(self._inside(r), r, 1.0)), 0.0)
        elif k == 1 and self.d1_fn is not None:
            v = np.where(self._inside(r), self.d1_fn(np.where(self._inside(r), r, 1.0)), 0.0)
        else:
            v = self._fd_derivative(r, k)
        return v[0] if scalar else v

    def value(self, r):
        return self.derivative(r, 0)

    def d1(self, r):
        return self.derivative(r, 1)

    def d2(self, r):
        return self.derivative(r, 2)

    def _fd_derivative(self, r: np.ndarray, k: int) -> np.ndarray:
        h = _fd_step(r)
        lower = lambda x: self.derivative(x, k - 1)
        d_h = (lower(r + h) - lower(r - h)) / (2 * h)
        d_h2 = (lower(r + h / 2) - lower(r - h / 2)) / h
        scale = max(float(np.max(np.abs(d_h2))), 1e-300)
        gap = float(np.max(np.abs(d_h2 - d_h)))
        if gap > FD_AGREEMENT * scale:
            raise SmoothnessError(
                f"{self.label}: order-{k} finite differences disagree by {gap / scale:.2e} (relative)")
        return (4.0 * d_h2 - d_h) / 3.0

    # ---------------------------------------------------------------
    def scaled(self, lam: complex) -> "RadialFunction":
        """lam * f, keeping the same support."""
        lab = f"{lam:g}*{self.label}" if isinstance(lam, (int, float)) else f"({lam})*{self.label}"
        vf, df = self.value_fn, self.d1_fn
        if self.jet_fn is not None:
            base = self.jet_fn
            return RadialFunction(lab, self.support, jet_fn=lambda r, n: base(r, n) * lam,
                                  value_fn=None if vf is None else (lambda r: lam * vf(r)))
        return RadialFunction(lab, self.support, value_fn=lambda r: lam * vf(r),
                              d1_fn=None if df is None else (lambda r: lam * df(r)))

    def check_support(self, n: int = 64) -> float:
        """Largest |value| at sample points outside the support."""
        s = self.support
        pts = []
        if s.r0 > 0:
            pts.append(np.linspace(0.0, s.r0, n, endpoint=False)[1:])
        if math.isfinite(s.r1):
            pts.append(s.r1 * np.geomspace(1.0, 10.0, n))
        if not pts:
            return 0.0
        return float(np.max(np.abs(self.value(np.concatenate(pts)))))

    def richardson_slope(self, r: float, h0: float = 1e-2) -> float:
        """Observed convergence order of central differences to d1 at ``r``."""
        exact = self.d1(r)
        errs = []
        hs = h0 * np.array([1.0, 0.5, 0.25])
        for h in hs:
            cd = (self.value(r + h) - self.value(r - h)) / (2 * h)
            errs.append(abs(cd - exact))
        e = np.array(errs)
        if np.any(e == 0):
            return 2.0
        return float(np.mean(np.log2(e[:-1] / e[1:])))


def from_callables(label: str, support: Region, value: Callable,
                   d1: Callable | None = None) -> RadialFunction:
    """Wrap plain vectorized callables (derivatives by finite differences)."""
    return RadialFunction(label, support, value_fn=value, d1_fn=d1)


def from_jet(label: str, support: Region, profile: Callable[[Jet], Jet]) -> RadialFunction:
    """Wrap a profile written with :mod:`hardyverify.jets` operations."""
    return RadialFunction(label, support, jet_fn=lambda r, n: _as_jet(profile(Jet.variable(r, n)), r, n))


def _as_jet(v, r, n) -> Jet:
    return v if isinstance(v, Jet) else Jet.constant(v, n, np.shape(r))


# ------------------------------------------------------------------- cutoffs

STEP_CLAMP = 0.01


def _step_jet(x: Jet) -> Jet:
    """s(x) = 1/(1 + exp(1/x - 1/(1-x))): 0 at x<=0, 1 at x>=1, C^inf.

    Below x=0.01 (above 0.99) s is within e^-98 of its limit and is clamped,
    which keeps the jet arithmetic free of overflow.
    """
    xv = x.c[0]
    lo = xv <= STEP_CLAMP
    hi = xv >= 1.0 - STEP_CLAMP
    c = x.c.copy()
    c[0] = np.clip(xv, STEP_CLAMP, 1.0 - STEP_CLAMP)
    xc = Jet(c)
    z = xc.reciprocal() - (1.0 - xc).reciprocal()
    s = (jx.exp(z) + 1.0).reciprocal()
    zero = Jet(np.zeros_like(s.c))
    one = zero + 1.0
    return jx.where(lo, zero, jx.where(hi, one, s))


def step_values(x):
    """Plain-array twin of :func:`_step_jet`."""
    x = np.asarray(x, dtype=float)
    xc = np.clip(x, STEP_CLAMP, 1.0 - STEP_CLAMP)
    s = 1.0 / (np.exp(1.0 / xc - 1.0 / (1.0 - xc)) + 1.0)
    return np.where(x <= STEP_CLAMP, 0.0, np.where(x >= 1.0 - STEP_CLAMP, 1.0, s))


@dataclass(frozen=True)
class CutoffSpec:
    """Smooth monotone cutoff with transition on [inner, outer].

    plateau="inner": chi = 1 for r <= inner, 0 for r >= outer.
    plateau="outer": chi = 0 for r <= inner, 1 for r >= outer.
    """

    inner: float
    outer: float
    plateau: str = "inner"

    def __post_init__(self):
        if not (0 <= self.inner < self.outer):
            raise ValueError(f"cutoff needs 0 <= inner < outer, got {self.inner}, {self.outer}")
        if self.plateau not in ("inner", "outer"):
            raise ValueError("plateau must be 'inner' or 'outer'")

    def jet(self, x: Jet) -> Jet:
        t = (x - self.inner) / (self.outer - self.inner)
        s = _step_jet(t)
        return 1.0 - s if self.plateau == "inner" else s

    def values(self, r):
        s = step_values((np.asarray(r, dtype=float) - self.inner) / (self.outer - self.inner))
        return 1.0 - s if self.plateau == "inner" else s


def smooth_cutoff(spec: CutoffSpec) -> RadialFunction:
    if spec.plateau == "inner":
        support = Region("annulus", 0.0, spec.outer)
    else:
        support = Region("annulus", spec.inner, math.inf)
    label = f"cutoff[{spec.plateau}:{spec.inner:g},{spec.outer:g}]"
    return RadialFunction(label, support, jet_fn=lambda r, n: spec.jet(Jet.variable(r, n)))


# ------------------------------------------------------------------ operators

def radial_laplacian(model: ManifoldModel, f: RadialFunction, r):
    """f'' + ((N-1)/r + J'/J) f'."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ModelError("the radial Laplacian is singular at the pole (r must be > 0)")
    rr = np.atleast_1d(r)
    h = mean_curvature_jet(model, rr, 0).c[0]
    out = f.derivative(rr, 2) + h * f.derivative(rr, 1)
    return out[0] if np.ndim(r) == 0 else out


def _laplacian_jet(model: ManifoldModel, g: Jet, r: np.ndarray) -> Jet:
    d1 = g.d()
    d2 = d1.d()
    h = mean_curvature_jet(model, r, d2.order)
    return d2 + h * d1.truncate(d2.order)


def operator_jet(model: ManifoldModel, g: Jet, r: np.ndarray, k: int) -> Jet:
    """Jet of d/dr Lap^{(k-1)/2} g (k odd) or Lap^{k/2} g (k even)."""
    for _ in range(k // 2):
        g = _laplacian_jet(model, g, r)
    if k % 2:
        g = g.d()
    return g


def iterate_operator(model: ManifoldModel, f: RadialFunction, k: int) -> RadialFunction:
    """The order-k radial operator applied to f, as a new RadialFunction."""
    if int(k) != k or k < 1:
        raise ValueError("operator order k must be a positive integer")
    name = f"D{k}[{f.label}]"
    if f.jet_fn is not None:
        def jet_fn(r, n, f=f):
            return operator_jet(model, f.jet(r, n + k), r, k)
        return RadialFunction(name, f.support, jet_fn=jet_fn)

    def value(r, f=f):
        g = f
        for _ in range(k // 2):
            g = _FDLaplacian(model, g)
        return g.derivative(r, 1) if k % 2 else g.derivative(r, 0)
    return RadialFunction(name, f.support, value_fn=value)


def _FDLaplacian(model: ManifoldModel, f: RadialFunction) -> RadialFunction:
    return RadialFunction(f"Lap[{f.label}]", f.support,
                          value_fn=lambda r: radial_laplacian(model, f, r))


# ----------------------------------------------------------- extremal families

LOG_CUTOFF = (0.5, 0.75)  # plateau r <= R/2, gone by 3R/4


def extremal_log_family(gamma: float, p: float, delta: float, R: float = 1.0) -> RadialFunction:
    """f = (log(R/r))^{(gamma-1-p delta)/p} chi(r), chi = 1 on r <= R/2."""
    if not (gamma > 1 and p > max(1.0, gamma - 1)):
        raise ValueError(f"need 1 < gamma and max(1, gamma-1) < p, got gamma={gamma}, p={p}")
    if not (R > 0 and delta >= 0):
        raise ValueError("need R > 0 and delta >= 0")
    e = (gamma - 1 - p * delta) / p
    if not e > 0:
        raise ValueError("delta too large: the log exponent must stay positive")
    cut = CutoffSpec(LOG_CUTOFF[0] * R, LOG_CUTOFF[1] * R, "inner")

    def jet_fn(r, n):
        x = Jet.variable(np.minimum(r, cut.outer), n)
        L = (jx.log(x) * -1.0) + math.log(R)
        return (L ** e) * cut.jet(x)

    return RadialFunction(f"logfam[g={gamma:g},p={p:g},d={delta:g},R={R:g}]",
                          Region("annulus", 0.0, cut.outer), jet_fn=jet_fn)


def extremal_boundary_family(t: float, c: float, delta: float) -> RadialFunction:
    """f = chi(r) (1 - r^c)^t, chi = 1 on [1 - delta, 1], 0 below 1 - 2 delta."""
    if not (0 < 2 * delta < 1):
        raise ValueError(f"need 0 < 2 delta < 1, got delta={delta}")
    if not (c > 0 and t > 0):
        raise ValueError("need c > 0 and t > 0")
    cut = CutoffSpec(1.0 - 2 * delta, 1.0 - delta, "outer")

    def jet_fn(r, n):
        x = Jet.variable(r, n)
        return ((1.0 - x ** float(c)) ** float(t)) * cut.jet(x)

    return RadialFunction(f"bdryfam[t={t:g},c={c:g},d={delta:g}]",
                          Region("annulus", cut.inner, 1.0), jet_fn=jet_fn)


def scaling_trace(f: RadialFunction, R: float):
    """For radial f the rescaled function f(R x/|x|) is the constant f(R)."""
    if not R > 0:
        raise ValueError("R must be positive")
    return f.value(float(R))
