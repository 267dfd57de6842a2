"""Univariate jets: a function of ``t`` known through its first ``K`` derivatives.

Coefficients are stored as derivative values, ``coeffs[j] = d^j f / dt^j``
at ``base_point``.  Products follow the Leibniz rule and are truncated at
``K``; nothing is ever silently truncated across mismatched orders.

The array kernels (:func:`mul`, :func:`div`, :func:`power`, :func:`jeinsum`)
work on numpy arrays whose *last* axis is the jet axis, which is how
:class:`curvlab.frame_tensor.Tensor` stores its components.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

# |b0| below this is treated as a zero divisor
ZERO_DIVISOR_EPS = 1e-300


class JetError(ValueError):
    pass


class JetMismatchError(JetError):
    """Jets with different base points or orders were combined."""


class DivisionByZeroJet(JetError, ZeroDivisionError):
    pass


class NonPositiveBase(JetError):
    pass


class OrderExhausted(JetError):
    """A derivative was requested from a jet of order 0."""


@lru_cache(maxsize=None)
def _binom_row(n: int) -> tuple[int, ...]:
    return tuple(math.comb(n, i) for i in range(n + 1))


# ---------------------------------------------------------------------------
# array kernels (trailing jet axis)
# ---------------------------------------------------------------------------


def _check_orders(*arrays: np.ndarray) -> int:
    lengths = {a.shape[-1] for a in arrays}
    if len(lengths) != 1:
        raise JetMismatchError(f"jet orders differ: {sorted(n - 1 for n in lengths)}")
    return lengths.pop()


def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Leibniz product of two jet arrays (broadcasting over leading axes)."""
    n = _check_orders(a, b)
    shape = np.broadcast_shapes(a.shape, b.shape)
    out = np.zeros(shape, dtype=float)
    for j in range(n):
        row = _binom_row(j)
        acc = out[..., j]
        for i in range(j + 1):
            acc += row[i] * a[..., i] * b[..., j - i]
    return out


def div(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Jet quotient ``a / b``, solved order by order from ``b * q = a``."""
    n = _check_orders(a, b)
    b0 = b[..., 0]
    if np.any(np.abs(b0) < ZERO_DIVISOR_EPS):
        raise DivisionByZeroJet("divisor value is zero")
    shape = np.broadcast_shapes(a.shape, b.shape)
    q = np.zeros(shape, dtype=float)
    for j in range(n):
        row = _binom_row(j)
        acc = np.array(a[..., j], dtype=float)
        for i in range(1, j + 1):
            acc = acc - row[i] * b[..., i] * q[..., j - i]
        q[..., j] = acc / b0
    return q


def power(a: np.ndarray, p: float) -> np.ndarray:
    """Real power ``a**p`` of a jet array with positive value part.

    Uses the ODE ``a * y' = p * a' * y`` for ``y = a**p`` and expands it with
    the Leibniz rule, which gives each new derivative from the lower ones.
    """
    a = np.asarray(a, dtype=float)
    a0 = a[..., 0]
    if np.any(a0 <= 0):
        raise NonPositiveBase("power/sqrt of a jet needs a positive value part")
    n = a.shape[-1]
    y = np.zeros_like(a)
    y[..., 0] = a0**p
    for k in range(n - 1):
        # a0 * y^(k+1) = p * sum_i C(k,i) a^(i+1) y^(k-i) - sum_{i>=1} C(k,i) a^(i) y^(k+1-i)
        row = _binom_row(k)
        acc = np.zeros_like(a0)
        for i in range(k + 1):
            acc = acc + p * row[i] * a[..., i + 1] * y[..., k - i]
        for i in range(1, k + 1):
            acc = acc - row[i] * a[..., i] * y[..., k + 1 - i]
        y[..., k + 1] = acc / a0
    return y


def sqrt(a: np.ndarray) -> np.ndarray:
    """Square root from ``y * y = a``, independent of :func:`power`."""
    a = np.asarray(a, dtype=float)
    a0 = a[..., 0]
    if np.any(a0 <= 0):
        raise NonPositiveBase("power/sqrt of a jet needs a positive value part")
    n = a.shape[-1]
    y = np.zeros_like(a)
    y[..., 0] = np.sqrt(a0)
    for k in range(1, n):
        row = _binom_row(k)
        acc = np.array(a[..., k], dtype=float)
        for i in range(1, k):
            acc = acc - row[i] * y[..., i] * y[..., k - i]
        y[..., k] = acc / (2.0 * y[..., 0])
    return y


def shift(a: np.ndarray) -> np.ndarray:
    """Derivative map ``phi -> phi'``; drops the jet order by one."""
    if a.shape[-1] < 2:
        raise OrderExhausted("cannot differentiate a jet of order 0")
    return np.array(a[..., 1:], dtype=float)


def truncate(a: np.ndarray, order: int) -> np.ndarray:
    if order < 0 or order > a.shape[-1] - 1:
        raise OrderExhausted(f"cannot truncate order {a.shape[-1] - 1} jet to order {order}")
    return np.array(a[..., : order + 1], dtype=float)


@lru_cache(maxsize=None)
def _compositions(total: int, parts: int) -> tuple[tuple[int, ...], ...]:
    return tuple(
        c for c in itertools.product(range(total + 1), repeat=parts) if sum(c) == total
    )


def jeinsum(subscripts: str, *operands: np.ndarray) -> np.ndarray:
    """``np.einsum`` over jet-valued arrays with the Leibniz rule on the jet axis.

    ``subscripts`` names only the tensor axes.  An operand with exactly one
    more dimension than its subscript letters carries a trailing jet axis;
    an operand without it is treated as a constant (a jet with zero
    derivatives).  At least one operand must be a jet.
    """
    lhs, out_letters = subscripts.replace(" ", "").split("->")
    in_letters = lhs.split(",")
    if len(in_letters) != len(operands):
        raise ValueError("operand count does not match subscripts")
    is_jet = []
    for letters, op in zip(in_letters, operands):
        if op.ndim == len(letters) + 1:
            is_jet.append(True)
        elif op.ndim == len(letters):
            is_jet.append(False)
        else:
            raise ValueError(f"operand of ndim {op.ndim} does not fit '{letters}'")
    jets = [op for op, j in zip(operands, is_jet) if j]
    if not jets:
        raise ValueError("jeinsum needs at least one jet operand")
    n = _check_orders(*jets)
    consts = [op for op, j in zip(operands, is_jet) if not j]
    const_letters = [l for l, j in zip(in_letters, is_jet) if not j]
    jet_letters = [l for l, j in zip(in_letters, is_jet) if j]
    spec = ",".join(jet_letters + const_letters) + "->" + out_letters

    out = None
    fact = [math.factorial(i) for i in range(n)]
    for order in range(n):
        term = None
        for comp in _compositions(order, len(jets)):
            coef = fact[order]
            for c in comp:
                coef //= fact[c]
            slices = [op[..., c] for op, c in zip(jets, comp)]
            val = np.einsum(spec, *slices, *consts, optimize=True)
            term = coef * val if term is None else term + coef * val
        if out is None:
            out = np.zeros(np.shape(term) + (n,), dtype=float)
        out[..., order] = term
    return out


# ---------------------------------------------------------------------------
# scalar Jet value type
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Jet:
    """Scalar jet at ``base_point``; ``coeffs[j]`` is the j-th derivative."""

    coeffs: np.ndarray
    base_point: float

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).reshape(-1)
        if c.size == 0:
            raise JetError("a jet needs at least one coefficient")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "base_point", float(self.base_point))

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @property
    def value(self) -> float:
        return float(self.coeffs[0])

    def __repr__(self) -> str:
        return f"Jet({list(self.coeffs)}, t0={self.base_point})"

    def _coerce(self, other) -> "Jet":
        if isinstance(other, Jet):
            if other.base_point != self.base_point or other.order != self.order:
                raise JetMismatchError(
                    f"jet at t0={other.base_point}, K={other.order} combined with "
                    f"t0={self.base_point}, K={self.order}"
                )
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return jet_const(float(other), self.base_point, self.order)
        return NotImplemented

    def _wrap(self, coeffs) -> "Jet":
        return Jet(coeffs, self.base_point)

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.coeffs + o.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(self.coeffs - o.coeffs)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(o.coeffs - self.coeffs)

    def __neg__(self):
        return self._wrap(-self.coeffs)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(mul(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(div(self.coeffs, o.coeffs))

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self._wrap(div(o.coeffs, self.coeffs))

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)) and p >= 0:
            out = jet_const(1.0, self.base_point, self.order)
            for _ in range(int(p)):
                out = out * self
            return out
        return jet_pow(self, float(p))

    def sqrt(self) -> "Jet":
        return jet_sqrt(self)

    def shift(self) -> "Jet":
        return jet_shift(self)

    def truncate(self, order: int) -> "Jet":
        return self._wrap(truncate(self.coeffs, order))

    def allclose(self, other: "Jet", rtol: float = 1e-12, atol: float = 0.0) -> bool:
        o = self._coerce(other)
        return bool(np.allclose(self.coeffs, o.coeffs, rtol=rtol, atol=atol))


def jet_const(c: float, t0: float, K: int) -> Jet:
    if K < 0:
        raise JetError("jet order must be >= 0")
    coeffs = np.zeros(K + 1)
    coeffs[0] = c
    return Jet(coeffs, t0)


def jet_coordinate(t0: float, K: int) -> Jet:
    """The coordinate function ``t`` itself."""
    if K < 1:
        raise JetError("the coordinate jet needs order >= 1 to carry dt/dt = 1")
    coeffs = np.zeros(K + 1)
    coeffs[0] = t0
    coeffs[1] = 1.0
    return Jet(coeffs, t0)


def jet_arith(a: Jet, b: Jet, op: str) -> Jet:
    ops = {
        "add": lambda: a + b,
        "sub": lambda: a - b,
        "mul": lambda: a * b,
        "div": lambda: a / b,
    }
    if op not in ops:
        raise JetError(f"unknown jet operation {op!r}")
    if not isinstance(b, Jet):
        raise TypeError("jet_arith expects two Jets")
    a._coerce(b)
    return ops[op]()


def jet_pow(a: Jet, p: float) -> Jet:
    return Jet(power(a.coeffs, p), a.base_point)


def jet_sqrt(a: Jet) -> Jet:
    return Jet(sqrt(a.coeffs), a.base_point)


def jet_shift(a: Jet) -> Jet:
    return Jet(shift(a.coeffs), a.base_point)
