"""Truncated Taylor arithmetic ("jets") over numpy arrays.

A :class:`Jet` of order ``K`` at points ``x`` stores the normalized Taylor
coefficients ``c[k] = f^{(k)}(x) / k!`` for ``k = 0..K``.  Arithmetic and the
elementary functions below propagate these coefficients exactly (up to
rounding), which gives closed-form derivatives of any composite expression
without finite differences.

The module-level functions (:func:`exp`, :func:`log`, :func:`sinh`, ...)
accept either plain arrays or jets, so user-supplied profiles such as a
warping function can be written once and evaluated in both modes.
"""
from __future__ import annotations

from math import factorial

import numpy as np


class Jet:
    __slots__ = ("c",)
    __array_priority__ = 1000  # make ndarray <op> Jet defer to Jet

    def __init__(self, coeffs):
        self.c = np.asarray(coeffs)

    # construction -------------------------------------------------------
    @classmethod
    def variable(cls, x, order: int) -> "Jet":
        x = np.asarray(x, dtype=float)
        c = np.zeros((order + 1,) + x.shape)
        c[0] = x
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value, order: int, shape=()) -> "Jet":
        value = np.asarray(value)
        c = np.zeros((order + 1,) + np.broadcast_shapes(shape, value.shape), dtype=np.result_type(value, float))
        c[0] = value
        return cls(c)

    @property
    def order(self) -> int:
        return self.c.shape[0] - 1

    @property
    def value(self) -> np.ndarray:
        return self.c[0]

    def derivative(self, k: int) -> np.ndarray:
        return self.c[k] * factorial(k)

    def derivatives(self) -> list[np.ndarray]:
        return [self.derivative(k) for k in range(self.order + 1)]

    def truncate(self, order: int) -> "Jet":
        return Jet(self.c[: order + 1])

    def d(self) -> "Jet":
        """Jet of the derivative; one order lower."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        k = np.arange(1, self.order + 1).reshape((-1,) + (1,) * (self.c.ndim - 1))
        return Jet(self.c[1:] * k)

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.order)

    def _match(self, other: "Jet"):
        k = min(self.order, other.order)
        return self.c[: k + 1], other.c[: k + 1]

    def __neg__(self):
        return Jet(-self.c)

    def __add__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other)
            c = self.c.astype(np.result_type(self.c, other), copy=True)
            c[0] = c[0] + other
            return Jet(c)
        a, b = self._match(other)
        return Jet(a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c * np.asarray(other))
        a, b = self._match(other)
        K = a.shape[0] - 1
        out = np.zeros(np.broadcast_shapes(a.shape, b.shape), dtype=np.result_type(a, b))
        for k in range(K + 1):
            acc = a[0] * b[k]
            for i in range(1, k + 1):
                acc = acc + a[i] * b[k - i]
            out[k] = acc
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.c / np.asarray(other))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def reciprocal(self) -> "Jet":
        a = self.c
        K = self.order
        q = np.zeros_like(a, dtype=np.result_type(a, float))
        q[0] = 1.0 / a[0]
        for k in range(1, K + 1):
            acc = a[1] * q[k - 1]
            for i in range(2, k + 1):
                acc = acc + a[i] * q[k - i]
            q[k] = -acc * q[0]
        return Jet(q)

    def __pow__(self, s):
        if isinstance(s, Jet):
            return exp(log(self) * s)
        if isinstance(s, (int, np.integer)) and s >= 0:
            out = Jet.constant(1.0, self.order, self.c.shape[1:])
            base = self
            n = int(s)
            while n:
                if n & 1:
                    out = out * base
                base = base * base
                n >>= 1
            return out
        return self._real_power(float(s))

    def _real_power(self, s: float) -> "Jet":
        # k a0 p_k = sum_{i=1..k} (s i - (k - i)) a_i p_{k-i}
        a = self.c
        K = self.order
        p = np.zeros_like(a, dtype=np.result_type(a, float))
        p[0] = a[0] ** s
        inv = 1.0 / a[0]
        for k in range(1, K + 1):
            acc = 0.0
            for i in range(1, k + 1):
                acc = acc + (s * i - (k - i)) * a[i] * p[k - i]
            p[k] = acc * inv / k
        return Jet(p)

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, shape={self.c.shape[1:]})"


def _exp_jet(a: Jet) -> Jet:
    c = a.c
    e = np.zeros_like(c, dtype=np.result_type(c, float))
    e[0] = np.exp(c[0])
    for k in range(1, a.order + 1):
        acc = 0.0
        for i in range(1, k + 1):
            acc = acc + i * c[i] * e[k - i]
        e[k] = acc / k
    return Jet(e)


def _log_jet(a: Jet) -> Jet:
    c = a.c
    out = np.zeros_like(c, dtype=np.result_type(c, float))
    out[0] = np.log(c[0])
    inv = 1.0 / c[0]
    for k in range(1, a.order + 1):
        acc = 0.0
        for i in range(1, k):
            acc = acc + i * out[i] * c[k - i]
        out[k] = (c[k] - acc / k) * inv
    return Jet(out)


def _sinhcosh_jet(a: Jet) -> tuple[Jet, Jet]:
    c = a.c
    s = np.zeros_like(c, dtype=np.result_type(c, float))
    h = np.zeros_like(s)
    s[0] = np.sinh(c[0])
    h[0] = np.cosh(c[0])
    for k in range(1, a.order + 1):
        acc_s = 0.0
        acc_h = 0.0
        for i in range(1, k + 1):
            acc_s = acc_s + i * c[i] * h[k - i]
            acc_h = acc_h + i * c[i] * s[k - i]
        s[k] = acc_s / k
        h[k] = acc_h / k
    return Jet(s), Jet(h)


def exp(x):
    return _exp_jet(x) if isinstance(x, Jet) else np.exp(x)


def log(x):
    return _log_jet(x) if isinstance(x, Jet) else np.log(x)


def sinh(x):
    return _sinhcosh_jet(x)[0] if isinstance(x, Jet) else np.sinh(x)


def cosh(x):
    return _sinhcosh_jet(x)[1] if isinstance(x, Jet) else np.cosh(x)


def coth(x):
    if isinstance(x, Jet):
        s, h = _sinhcosh_jet(x)
        return h / s
    return 1.0 / np.tanh(x)


def sqrt(x):
    return x ** 0.5 if isinstance(x, Jet) else np.sqrt(x)


def value(x):
    """Plain value of a jet or array."""
    return x.value if isinstance(x, Jet) else x


def where(mask, jet_true: Jet, jet_false: Jet) -> Jet:
    """Pointwise selection between two jets of equal order."""
    a, b = jet_true.c, jet_false.c
    return Jet(np.where(mask, a, b))
