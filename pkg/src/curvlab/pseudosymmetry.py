"""Curvature-like operators acting as derivations, and the pseudosymmetry test.

A rank-4 array ``A[h, i, j, k]`` is read as the operator
``A(e_h, e_i) e_j = sum_k A[h, i, j, k] e_k``.  Acting on a ``(0, k)``
tensor it gives the ``(0, k+2)`` tensor

    (A . T)[p, q, j_1..j_k] = - sum_s sum_a A[p, q, j_s, a] T[.., a, ..]
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import jet as J
from .frame_tensor import Tensor, frobenius_sq
from .jet import Jet
from .kaehler_model import ComplexStructure, KaehlerPackage

DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class CurvatureLike:
    """Rank-4 tensor read as an operator; must be skew in its first pair."""

    comps: Tensor
    tol: float = 1e-12

    def __post_init__(self):
        T = self.comps
        if T.rank != 4:
            raise ValueError("a curvature-like tensor has rank 4")
        skew = np.max(np.abs(T.data + np.swapaxes(T.data, 0, 1)))
        scale = max(1.0, float(np.max(np.abs(T.data))))
        if skew > self.tol * scale:
            raise ValueError(f"operator is not skew in its first pair ({skew:.3g})")


def _as_tensor(A) -> Tensor:
    return A.comps if isinstance(A, CurvatureLike) else A


def rh_components(Jmat: np.ndarray) -> np.ndarray:
    """Values of the constant-holomorphic-curvature model operator."""
    n = Jmat.shape[0]
    d = np.eye(n)
    return (
        np.einsum("hk,ij->hijk", d, d)
        - np.einsum("hj,ik->hijk", d, d)
        + np.einsum("hk,ij->hijk", Jmat, Jmat)
        - np.einsum("hj,ik->hijk", Jmat, Jmat)
        - 2 * np.einsum("hi,jk->hijk", Jmat, Jmat)
    )


def build_rh(cs: ComplexStructure, base_point: float, order: int) -> CurvatureLike:
    return CurvatureLike(Tensor.constant(rh_components(cs.Jmat), base_point, order))


def derivation_action(A, T: Tensor) -> Tensor:
    A = _as_tensor(A)
    if T.rank < 1:
        raise ValueError("derivation action needs a tensor of rank >= 1")
    if T.rank + 2 > 6:
        raise ValueError("result would exceed rank 6")
    k = min(A.order, T.order)
    a = J.truncate(A.data, k)
    t = J.truncate(T.data, k)
    letters = "jklm"[: T.rank]
    out = None
    for s in range(T.rank):
        src = letters[:s] + "a" + letters[s + 1 :]
        term = J.jeinsum(f"pq{letters[s]}a,{src}->pq{letters}", a, t)
        out = -term if out is None else out - term
    return Tensor(out, T.base_point)


class Classification(str, enum.Enum):
    SEMISYMMETRIC = "semisymmetric"
    PSEUDOSYMMETRIC = "pseudosymmetric_with_f"
    NOT_PSEUDOSYMMETRIC = "not_pseudosymmetric"


@dataclass(frozen=True)
class PseudosymVerdict:
    f_hat: Jet
    residual_pseudo: float
    residual_semi: float
    classification: Classification
    scale: float

    @property
    def f_value(self) -> float:
        return self.f_hat.value


def solve_structure_function(RT: Tensor, RHT: Tensor, tol: float = DEFAULT_TOL) -> PseudosymVerdict:
    """Least-squares ``f`` with ``RT ~ f * RHT`` and the residuals that certify it.

    The fit uses value parts; the jet of ``f_hat`` is the ratio of the two
    inner products taken in jet arithmetic, so its derivative coefficients
    are only meaningful when the fit is exact.
    """
    RT._check_compatible(RHT)
    x, y = RT.value, RHT.value
    scale = max(1.0, float(np.max(np.abs(x))), float(np.max(np.abs(y))))
    residual_semi = float(np.max(np.abs(x))) / scale
    num = frobenius_sq_pair(RT, RHT)
    den = frobenius_sq(RHT)
    if den.value < tol * scale**2:
        f_hat = Jet(np.zeros(RT.order + 1), RT.base_point)
        if residual_semi < tol:
            cls = Classification.SEMISYMMETRIC
        else:
            cls = Classification.NOT_PSEUDOSYMMETRIC
        return PseudosymVerdict(f_hat, residual_semi, residual_semi, cls, scale)
    f_hat = num / den
    residual_pseudo = float(np.max(np.abs(x - f_hat.value * y))) / scale
    if residual_semi < tol:
        cls = Classification.SEMISYMMETRIC
    elif residual_pseudo < tol:
        cls = Classification.PSEUDOSYMMETRIC
    else:
        cls = Classification.NOT_PSEUDOSYMMETRIC
    return PseudosymVerdict(f_hat, residual_pseudo, residual_semi, cls, scale)


def frobenius_sq_pair(T: Tensor, U: Tensor) -> Jet:
    """Inner product ``sum T[idx] * U[idx]`` as a jet."""
    letters = "abcdef"[: T.rank]
    return Jet(J.jeinsum(f"{letters},{letters}->", T.data, U.data), T.base_point)


def projective_tensor(pkg: KaehlerPackage) -> Tensor:
    """Holomorphic projective curvature ``P[h, i, j, k]``."""
    R, S = pkg.riemann, pkg.ricci
    Jm = pkg.complex_structure.Jmat
    d = np.eye(pkg.dim)
    s = S.data
    # J^a_i S_aj = Jm[i, a] S[a, j]
    js = J.jeinsum("ia,aj->ij", s, Jm)
    corr = (
        J.jeinsum("ij,hk->hijk", s, d)
        - J.jeinsum("hj,ik->hijk", s, d)
        + J.jeinsum("ij,hk->hijk", js, Jm)
        - J.jeinsum("hj,ik->hijk", js, Jm)
        - 2 * J.jeinsum("hi,jk->hijk", js, Jm)
    )
    return Tensor(R.data - corr / (2 * (pkg.n + 1)), R.base_point)


def build_q(pkg: KaehlerPackage, f: Jet) -> CurvatureLike:
    """``Q = R - f R^H``; ``f`` is truncated to the curvature's jet order."""
    R = pkg.riemann
    rh = build_rh(pkg.complex_structure, R.base_point, R.order).comps
    return CurvatureLike(R - rh.scale(f.truncate(R.order)))
