"""Dense jet-valued component tensors over an orthonormal frame.

The metric is the identity in the frame, so raising and lowering indices is
a no-op and every transvection is a plain index contraction.
"""

from __future__ import annotations

import math

import numpy as np

from . import jet as J
from .jet import Jet, JetMismatchError

MAX_RANK = 6


class TensorShapeError(ValueError):
    pass


class Tensor:
    """Rank ``0..6`` tensor in dimension ``dim``; ``data[i_1,...,i_r, j]`` is
    the j-th t-derivative of the component ``(i_1, ..., i_r)``."""

    __slots__ = ("data", "base_point")

    def __init__(self, data, base_point: float):
        data = np.array(data, dtype=float)
        if data.ndim < 1:
            raise TensorShapeError("tensor data needs a trailing jet axis")
        rank = data.ndim - 1
        if rank > MAX_RANK:
            raise TensorShapeError(f"rank {rank} exceeds the cap of {MAX_RANK}")
        if rank and len(set(data.shape[:-1])) != 1:
            raise TensorShapeError(f"non-square component array {data.shape[:-1]}")
        data.setflags(write=False)
        self.data = data
        self.base_point = float(base_point)

    # construction ---------------------------------------------------------

    @classmethod
    def constant(cls, values, base_point: float, order: int) -> "Tensor":
        values = np.asarray(values, dtype=float)
        data = np.zeros(values.shape + (order + 1,))
        data[..., 0] = values
        return cls(data, base_point)

    @classmethod
    def zeros(cls, dim: int, rank: int, base_point: float, order: int) -> "Tensor":
        return cls(np.zeros((dim,) * rank + (order + 1,)), base_point)

    @classmethod
    def identity(cls, dim: int, base_point: float, order: int) -> "Tensor":
        return cls.constant(np.eye(dim), base_point, order)

    @classmethod
    def scalar(cls, j: Jet) -> "Tensor":
        return cls(j.coeffs, j.base_point)

    # shape ----------------------------------------------------------------

    @property
    def rank(self) -> int:
        return self.data.ndim - 1

    @property
    def dim(self) -> int:
        return self.data.shape[0] if self.rank else 0

    @property
    def order(self) -> int:
        return self.data.shape[-1] - 1

    @property
    def value(self) -> np.ndarray:
        """Component values (jet coefficient 0)."""
        return self.data[..., 0]

    def __repr__(self) -> str:
        return f"Tensor(dim={self.dim}, rank={self.rank}, order={self.order}, t0={self.base_point})"

    def component(self, *idx: int) -> Jet:
        return Jet(self.data[tuple(idx)], self.base_point)

    def as_jet(self) -> Jet:
        if self.rank:
            raise TensorShapeError("only rank-0 tensors are scalars")
        return Jet(self.data, self.base_point)

    def truncate(self, order: int) -> "Tensor":
        return Tensor(J.truncate(self.data, order), self.base_point)

    def _check_compatible(self, other: "Tensor") -> None:
        if self.data.shape != other.data.shape:
            raise TensorShapeError(f"shape mismatch {self.data.shape} vs {other.data.shape}")
        if self.base_point != other.base_point:
            raise JetMismatchError("tensors sampled at different base points")

    # arithmetic -----------------------------------------------------------

    def __add__(self, other: "Tensor") -> "Tensor":
        self._check_compatible(other)
        return Tensor(self.data + other.data, self.base_point)

    def __sub__(self, other: "Tensor") -> "Tensor":
        self._check_compatible(other)
        return Tensor(self.data - other.data, self.base_point)

    def __neg__(self) -> "Tensor":
        return Tensor(-self.data, self.base_point)

    def scale(self, a) -> "Tensor":
        """Multiply by a real number or a Jet."""
        if isinstance(a, Jet):
            if a.base_point != self.base_point:
                raise JetMismatchError("scaling jet sampled at a different base point")
            return Tensor(J.mul(self.data, a.coeffs), self.base_point)
        return Tensor(float(a) * self.data, self.base_point)

    def max_abs(self) -> float:
        """Infinity norm of the component values."""
        return float(np.max(np.abs(self.value))) if self.value.size else 0.0


def contract(T: Tensor, slot_a: int, slot_b: int) -> Tensor:
    """Trace over two slots (transvection with the identity metric)."""
    r = T.rank
    if r < 2:
        raise TensorShapeError("contraction needs rank >= 2")
    if not (0 <= slot_a < r and 0 <= slot_b < r):
        raise TensorShapeError(f"slot out of range for rank {r}")
    if slot_a == slot_b:
        raise TensorShapeError("cannot contract a slot with itself")
    return Tensor(np.trace(T.data, axis1=slot_a, axis2=slot_b), T.base_point)


def permute(T: Tensor, perm) -> Tensor:
    """Move slot ``s`` to position ``perm[s]``."""
    perm = tuple(int(p) for p in perm)
    if sorted(perm) != list(range(T.rank)):
        raise TensorShapeError(f"{perm} is not a permutation of {T.rank} slots")
    inverse = [0] * T.rank
    for s, p in enumerate(perm):
        inverse[p] = s
    return Tensor(np.transpose(T.data, inverse + [T.rank]), T.base_point)


def frobenius_sq(T: Tensor) -> Jet:
    """Sum of squares of all components, as a jet.

    The sum over components is correctly rounded, so the result does not
    depend on the order of the slots.
    """
    sq = J.mul(T.data, T.data).reshape(-1, T.order + 1)
    return Jet([math.fsum(sq[:, j]) for j in range(T.order + 1)], T.base_point)


def linear_combine(a, T: Tensor, b, U: Tensor) -> Tensor:
    T._check_compatible(U)
    return T.scale(a) + U.scale(b)


def tensor_product(T: Tensor, U: Tensor) -> Tensor:
    if T.base_point != U.base_point:
        raise JetMismatchError("tensors sampled at different base points")
    lt = "abcdef"[: T.rank]
    lu = "ghijkl"[: U.rank]
    return Tensor(J.jeinsum(f"{lt},{lu}->{lt}{lu}", T.data, U.data), T.base_point)
