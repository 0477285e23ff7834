"""Rotationally symmetric Cartan-Hadamard model manifolds.

Everything here is radial: a model is fixed by its dimension and a warping
profile, and all quantities are functions of the geodesic distance ``r`` from
the pole.  The density ``J`` is the Jacobian correction relative to Euclidean
polar coordinates, so ``dv = |S^{N-1}| r^{N-1} J(r) dr``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import gamma, pi
from typing import Callable

import numpy as np

from . import jets as jx
from .jets import Jet


class ModelError(ValueError):
    pass


# series cut-over for x coth x and sinh x / x near the pole
_SERIES_X = 1e-3


def _sinhc(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SERIES_X
    xs = np.where(small, 1.0, x)
    x2 = x * x
    return np.where(small, 1.0 + x2 / 6.0 + x2 * x2 / 120.0, np.sinh(xs) / xs)


def _xcoth_minus_one(x):
    """x coth(x) - 1, accurate near 0 and for large x."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < _SERIES_X
    xs = np.where(small, 1.0, x)
    x2 = x * x
    return np.where(small, x2 / 3.0 - x2 * x2 / 45.0, xs / np.tanh(xs) - 1.0)


def comparison_C(b: float, t):
    """C^b(t): 1/t for b = 0, sqrt(b) coth(sqrt(b) t) otherwise."""
    if b < 0:
        raise ModelError("curvature bound b must be nonnegative")
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise ModelError("C^b is defined for t > 0 only")
    if b == 0:
        return 1.0 / t
    sb = np.sqrt(b)
    return sb / np.tanh(sb * t)


def comparison_D(b: float, t):
    """D^b(t) = t C^b(t) - 1, with D^b(0) = 0.  Always nonnegative."""
    if b < 0:
        raise ModelError("curvature bound b must be nonnegative")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ModelError("D^b is defined for t >= 0 only")
    if b == 0:
        return np.zeros_like(t)
    return _xcoth_minus_one(np.sqrt(b) * t)


def sphere_area(N: int) -> float:
    """|S^{N-1}| = 2 pi^{N/2} / Gamma(N/2)."""
    if int(N) != N or N < 2:
        raise ModelError(f"dimension must be an integer >= 2, got {N}")
    return 2.0 * pi ** (N / 2.0) / gamma(N / 2.0)


@dataclass(frozen=True)
class Euclidean:
    pass


@dataclass(frozen=True)
class Hyperbolic:
    b: float = 1.0

    def __post_init__(self):
        if not self.b > 0:
            raise ModelError("hyperbolic curvature magnitude must be positive")


@dataclass(frozen=True)
class Warped:
    """Model metric dt^2 + psi(t)^2 dsigma^2.

    ``psi`` must accept plain arrays and :class:`~hardyverify.jets.Jet`
    arguments (write it with the functions in :mod:`hardyverify.jets`).
    """

    psi: Callable = field(compare=False)
    key: str = "warped"


@dataclass(frozen=True)
class ManifoldModel:
    name: str
    N: int
    kind: Euclidean | Hyperbolic | Warped

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ModelError(f"dimension must be an integer >= 2, got {self.N}")

    @property
    def is_euclidean(self) -> bool:
        return isinstance(self.kind, Euclidean)

    @property
    def curvature_bound(self) -> float | None:
        """b with K <= -b known in closed form, else None."""
        if isinstance(self.kind, Euclidean):
            return 0.0
        if isinstance(self.kind, Hyperbolic):
            return self.kind.b
        return None

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Region:
    """Ball(R) = [0, R), Exterior(R) = [R, inf), Annulus(r0, r1) = [r0, r1]."""

    kind: str
    r0: float
    r1: float

    def __post_init__(self):
        if self.kind not in ("ball", "exterior", "annulus"):
            raise ModelError(f"unknown region kind {self.kind!r}")
        if self.r0 < 0 or not self.r1 > self.r0:
            raise ModelError(f"region radii must satisfy 0 <= r0 < r1, got {self.r0}, {self.r1}")

    @classmethod
    def ball(cls, R: float = 1.0) -> "Region":
        if not R > 0:
            raise ModelError("ball radius must be positive")
        return cls("ball", 0.0, float(R))

    @classmethod
    def exterior(cls, R: float = 1.0) -> "Region":
        if not R > 0:
            raise ModelError("exterior radius must be positive")
        return cls("exterior", float(R), float("inf"))

    @classmethod
    def annulus(cls, r0: float, r1: float) -> "Region":
        return cls("annulus", float(r0), float(r1))

    @property
    def bounds(self) -> tuple[float, float]:
        return self.r0, self.r1

    def contains(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        return (r >= self.r0) & (r <= self.r1)

    def intersect(self, other: "Region") -> "Region | None":
        lo, hi = max(self.r0, other.r0), min(self.r1, other.r1)
        if not hi > lo:
            return None
        return Region("annulus", lo, hi)

    def __str__(self) -> str:
        if self.kind == "ball":
            return f"Ball({self.r1:g})"
        if self.kind == "exterior":
            return f"Exterior({self.r0:g})"
        return f"Annulus({self.r0:g}, {self.r1:g})"


def euclidean(N: int) -> ManifoldModel:
    return ManifoldModel(f"euclidean:{N}", N, Euclidean())


def hyperbolic(N: int, b: float = 1.0) -> ManifoldModel:
    return ManifoldModel(f"hyperbolic:{N}:{b:g}", N, Hyperbolic(float(b)))


def warped(N: int, psi: Callable, key: str = "custom") -> ManifoldModel:
    return ManifoldModel(f"warped:{N}:{key}", N, Warped(psi, key))


def _psi_jet(model: ManifoldModel, r, order: int) -> Jet:
    return model.kind.psi(Jet.variable(r, order))


def density(model: ManifoldModel, r):
    """J(r): 1, (sinh(sqrt(b) r)/(sqrt(b) r))^{N-1}, or (psi(r)/r)^{N-1}."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ModelError("density requires r > 0")
    kind = model.kind
    if isinstance(kind, Euclidean):
        return np.ones_like(r)
    if isinstance(kind, Hyperbolic):
        return _sinhc(np.sqrt(kind.b) * r) ** (model.N - 1)
    rr = np.maximum(r, 1e-300)
    return (np.asarray(kind.psi(rr), dtype=float) / rr) ** (model.N - 1)


def log_density_derivative(model: ManifoldModel, r):
    """J'(r)/J(r)."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ModelError("log_density_derivative requires r > 0")
    kind = model.kind
    if isinstance(kind, Euclidean):
        return np.zeros_like(r)
    if isinstance(kind, Hyperbolic):
        return (model.N - 1) * comparison_D(kind.b, r) / r
    j = _psi_jet(model, np.maximum(r, 1e-300), 1)
    psi, dpsi = j.c[0], j.c[1]
    return (model.N - 1) * (dpsi / psi - 1.0 / r)


def mean_curvature_jet(model: ManifoldModel, r, order: int) -> Jet:
    """Jet of h(r) = (N-1)/r + J'(r)/J(r), the first-order coefficient of
    the radial Laplacian."""
    x = Jet.variable(r, order)
    kind = model.kind
    n1 = model.N - 1
    if isinstance(kind, Euclidean):
        return x.reciprocal() * n1
    if isinstance(kind, Hyperbolic):
        sb = np.sqrt(kind.b)
        return jx.coth(x * sb) * (n1 * sb)
    p = _psi_jet(model, r, order + 1)
    return p.d() / p.truncate(order) * n1


def check_cartan_hadamard(model: ManifoldModel, r_max: float = 10.0, n: int = 512) -> list[str]:
    """Grid checks of the model invariants; returns a list of violations."""
    problems: list[str] = []
    grid = np.geomspace(1e-4, r_max, n)
    if isinstance(model.kind, Warped):
        j = _psi_jet(model, grid, 2)
        psi, d2 = j.c[0], 2.0 * j.c[2]
        if np.any(psi <= 0):
            problems.append("psi must be positive for r > 0")
        ratio = np.asarray(model.kind.psi(np.array([1e-7])), dtype=float)[0] / 1e-7
        if abs(ratio - 1.0) > 1e-6:
            problems.append(f"psi'(0) must be 1 (psi(r)/r -> {ratio:.8g})")
        if np.any(d2 < -1e-12 * np.maximum(1.0, np.abs(psi))):
            problems.append("psi'' >= 0 (non-positive curvature) violated on grid")
    J = density(model, grid)
    if np.any(J < 1.0 - 1e-12):
        problems.append("density must be >= 1")
    if np.any(np.diff(J) < -1e-12 * J[1:]):
        problems.append("density must be non-decreasing")
    return problems


def sectional_curvature_bound(model: ManifoldModel, r_max: float = 10.0, n: int = 512) -> float:
    """Largest b with -psi''/psi <= -b on a grid (0 for Euclidean)."""
    b = model.curvature_bound
    if b is not None:
        return b
    grid = np.geomspace(1e-3, r_max, n)
    j = _psi_jet(model, grid, 2)
    return float(max(0.0, np.min(2.0 * j.c[2] / j.c[0])))


# Named warped profiles usable from the command line as warped:N:<key>.
WARPED_PROFILES: dict[str, Callable] = {
    "sinh": lambda r: jx.sinh(r),
    "sinh2": lambda r: jx.sinh(r * 2.0) * 0.5,
    "cubic": lambda r: r + r * r * r / 6.0,
}


def parse_model(text: str) -> ManifoldModel:
    """Parse ``euclidean:N``, ``hyperbolic:N:b`` or ``warped:N:key``."""
    parts = text.strip().split(":")
    try:
        kind = parts[0].lower()
        N = int(parts[1])
        if kind == "euclidean" and len(parts) == 2:
            return euclidean(N)
        if kind == "hyperbolic" and len(parts) in (2, 3):
            return hyperbolic(N, float(parts[2]) if len(parts) == 3 else 1.0)
        if kind == "warped" and len(parts) == 3:
            if parts[2] not in WARPED_PROFILES:
                raise ModelError(f"unknown warped profile {parts[2]!r}; known: {sorted(WARPED_PROFILES)}")
            model = warped(N, WARPED_PROFILES[parts[2]], parts[2])
            bad = check_cartan_hadamard(model)
            if bad:
                raise ModelError("; ".join(bad))
            return model
    except (IndexError, ValueError) as exc:
        if isinstance(exc, ModelError):
            raise
        raise ModelError(f"cannot parse model spec {text!r}") from exc
    raise ModelError(f"cannot parse model spec {text!r}")
