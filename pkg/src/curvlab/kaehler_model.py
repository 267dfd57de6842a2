"""Levi-Civita connection, curvature and Kähler certificates from bracket data.

A frame is described by its structure functions ``c[i, j, k]`` with
``[e_i, e_j] = sum_k c[i, j, k] e_k``.  Scalar fields depend on ``t`` only and
exactly one frame field differentiates them: ``e_d(phi) = mu * phi'``.

Index conventions (0-based throughout):

* ``gamma[i, j, k] = g(nabla_{e_i} e_j, e_k)``
* ``riemann[h, i, j, k] = g(R(e_h, e_i) e_j, e_k)``
* ``ricci[i, j] = sum_a riemann[a, i, j, a]`` (trace of ``X -> R(X, e_i) e_j``)
* covariant derivatives put the new differentiation slot first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import jet as J
from .frame_tensor import Tensor, contract
from .jet import Jet, JetMismatchError

JACOBI_TOL = 1e-9


class FrameSpecError(ValueError):
    pass


class ConventionError(RuntimeError):
    """The curvature trace convention could not be pinned against the reference table."""


@dataclass(frozen=True)
class FrameSpec:
    """Bracket structure functions of an orthonormal frame.

    ``brackets`` is a rank-3 :class:`Tensor`; ``deriv_direction`` is the only
    frame index acting on scalar fields, via ``e_d(phi) = deriv_factor * phi'``.
    """

    brackets: Tensor
    deriv_direction: int
    deriv_factor: Jet
    validate: bool = True
    jacobi_tol: float = JACOBI_TOL

    def __post_init__(self):
        c = self.brackets
        if c.rank != 3:
            raise FrameSpecError("brackets must be a rank-3 tensor")
        if c.dim % 2:
            raise FrameSpecError(f"frame dimension must be even, got {c.dim}")
        if not 0 <= self.deriv_direction < c.dim:
            raise FrameSpecError("deriv_direction out of range")
        if self.deriv_factor.base_point != c.base_point:
            raise JetMismatchError("deriv_factor sampled at a different base point")
        if self.deriv_factor.order < c.order - 1:
            raise FrameSpecError("deriv_factor order too low for the bracket jets")
        if self.validate:
            skew = np.max(np.abs(c.data + np.swapaxes(c.data, 0, 1)))
            if skew > 0:
                raise FrameSpecError(f"brackets are not antisymmetric (residual {skew:.3g})")
            if c.order >= 1:
                res = jacobi_residual(self)
                if res > self.jacobi_tol:
                    raise FrameSpecError(f"Jacobi identity fails (residual {res:.3g})")

    @property
    def dim(self) -> int:
        return self.brackets.dim

    @property
    def base_point(self) -> float:
        return self.brackets.base_point

    @property
    def order(self) -> int:
        return self.brackets.order

    def frame_derivative(self, data: np.ndarray) -> np.ndarray:
        """``e_i(phi)`` for a jet array ``phi``; the new index ``i`` comes first."""
        d = J.shift(data)
        mu = J.truncate(self.deriv_factor.coeffs, d.shape[-1] - 1)
        out = np.zeros((self.dim,) + d.shape)
        out[self.deriv_direction] = J.mul(d, mu)
        return out


def jacobi_residual(F: FrameSpec) -> float:
    """Max over ``(i, j, k, l)`` of the cyclic sum of ``[[e_i, e_j], e_k]``."""
    c = F.brackets.data
    k = F.order - 1
    ck = J.truncate(c, k)
    # [[e_i,e_j],e_k] = sum_a c_ij^a c_ak^l e_l - e_k(c_ij^l) e_l
    quad = J.jeinsum("ija,akl->ijkl", ck, ck)
    dc = F.frame_derivative(c)  # dc[k, i, j, l] = e_k(c_ij^l)
    term = quad - np.einsum("kijl...->ijkl...", dc)
    cyc = term + np.einsum("jkil...->ijkl...", term) + np.einsum("kijl...->ijkl...", term)
    scale = max(1.0, float(np.max(np.abs(c[..., 0]))) ** 2)
    return float(np.max(np.abs(cyc[..., 0]))) / scale


@dataclass(frozen=True)
class ComplexStructure:
    """Constant frame matrix of ``J`` with ``J e_i = sum_s Jmat[i, s] e_s``."""

    Jmat: np.ndarray
    tol: float = 1e-12

    def __post_init__(self):
        m = np.array(self.Jmat, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("Jmat must be square")
        n = m.shape[0]
        if np.max(np.abs(m @ m + np.eye(n))) > self.tol:
            raise ValueError("J^2 != -I")
        if np.max(np.abs(m + m.T)) > self.tol:
            raise ValueError("J is not skew in an orthonormal frame")
        m.setflags(write=False)
        object.__setattr__(self, "Jmat", m)

    @property
    def dim(self) -> int:
        return self.Jmat.shape[0]

    def tensor(self, base_point: float, order: int) -> Tensor:
        return Tensor.constant(self.Jmat, base_point, order)

    @classmethod
    def standard(cls, dim: int) -> "ComplexStructure":
        """``J e_a = e_{a+n}``, ``J e_{a+n} = -e_a`` for ``n = dim // 2``."""
        n = dim // 2
        m = np.zeros((dim, dim))
        for a in range(n):
            m[a, a + n] = 1.0
            m[a + n, a] = -1.0
        return cls(m)


def koszul_connection(F: FrameSpec) -> Tensor:
    """``2 gamma[i,j,k] = c[i,j,k] - c[j,k,i] + c[k,i,j]``."""
    c = F.brackets.data
    g = 0.5 * (
        c - np.einsum("jki...->ijk...", c) + np.einsum("kij...->ijk...", c)
    )
    return Tensor(g, F.base_point)


def curvature(F: FrameSpec, gamma: Tensor) -> Tensor:
    """``R[h,i,j,k]`` for ``R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y]``."""
    g = gamma.data
    dg = F.frame_derivative(g)  # dg[h, i, j, k] = e_h(gamma_ij^k)
    k = dg.shape[-1] - 1
    gk = J.truncate(g, k)
    ck = J.truncate(F.brackets.data, k)
    r = dg - np.swapaxes(dg, 0, 1)
    r = r + J.jeinsum("ija,hak->hijk", gk, gk) - J.jeinsum("hja,iak->hijk", gk, gk)
    r = r - J.jeinsum("hia,ajk->hijk", ck, gk)
    return Tensor(r, F.base_point)


def _ricci_candidates(R: Tensor) -> dict[str, Tensor]:
    return {
        "aija": contract(R, 0, 3),
        "aiaj": contract(R, 0, 2),
    }


@lru_cache(maxsize=None)
def ricci_convention() -> str:
    """Pick the Ricci trace that reproduces the reference table.

    The reference is the ``m = 1``, ``h = t**-2`` member of the built-in
    family at ``t = 1``, where the ``(0, 0)`` Ricci component is ``-2``.
    """
    from .example_family import FamilyParams, PowerH, build_family

    F, _ = build_family(FamilyParams(m=1, h=PowerH(-2.0), t0=1.0, K=2))
    R = curvature(F, koszul_connection(F))
    expected = -2.0
    hits = [
        name
        for name, S in _ricci_candidates(R).items()
        if abs(S.value[0, 0] - expected) < 1e-12
    ]
    if len(hits) != 1:
        raise ConventionError(f"Ricci trace convention ambiguous or missing: {hits}")
    return hits[0]


def ricci(R: Tensor) -> Tensor:
    return _ricci_candidates(R)[ricci_convention()]


def scalar_curvature(S: Tensor) -> Jet:
    return contract(S, 0, 1).as_jet()


def covariant_derivative(T: Tensor, frame: FrameSpec, gamma: Tensor) -> Tensor:
    """``(nabla T)[i, j_1..j_k] = e_i(T[j..]) - sum_s gamma[i, j_s, a] T[.. a ..]``."""
    if T.rank >= 6:
        raise ValueError("covariant derivative would exceed rank 6")
    out = frame.frame_derivative(T.data)
    k = out.shape[-1] - 1
    g = J.truncate(gamma.data, k)
    t = J.truncate(T.data, k)
    letters = "bcdef"[: T.rank]
    for s in range(T.rank):
        src = letters[:s] + "a" + letters[s + 1 :]
        out = out - J.jeinsum(f"i{letters[s]}a,{src}->i{letters}", g, t)
    return Tensor(out, T.base_point)


@dataclass
class KaehlerPackage:
    """Connection, curvature, Ricci and scalar curvature at one sample point."""

    frame: FrameSpec
    complex_structure: ComplexStructure
    gamma: Tensor
    riemann: Tensor
    ricci: Tensor
    scalar: Jet
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self) -> int:
        return self.frame.dim

    @property
    def n(self) -> int:
        return self.frame.dim // 2

    @property
    def base_point(self) -> float:
        return self.frame.base_point

    def nabla(self, T: Tensor) -> Tensor:
        return covariant_derivative(T, self.frame, self.gamma)

    def jtensor(self, order: int | None = None) -> Tensor:
        o = self.gamma.order if order is None else order
        return self.complex_structure.tensor(self.base_point, o)

    def cached(self, key: str, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    # frequently reused derivatives
    @property
    def nabla_r(self) -> Tensor:
        return self.cached("nabla_r", lambda: self.nabla(self.riemann))

    @property
    def nabla2_r(self) -> Tensor:
        return self.cached("nabla2_r", lambda: self.nabla(self.nabla_r))

    @property
    def nabla_s(self) -> Tensor:
        return self.cached("nabla_s", lambda: self.nabla(self.ricci))

    @property
    def nabla2_s(self) -> Tensor:
        return self.cached("nabla2_s", lambda: self.nabla(self.nabla_s))


def build_package(frame: FrameSpec, cs: ComplexStructure) -> KaehlerPackage:
    if cs.dim != frame.dim:
        raise ValueError("complex structure and frame dimensions differ")
    gamma = koszul_connection(frame)
    R = curvature(frame, gamma)
    S = ricci(R)
    return KaehlerPackage(frame, cs, gamma, R, S, scalar_curvature(S))


def scalar_drift(pkg: KaehlerPackage) -> float:
    """Largest derivative coefficient of ``r`` relative to the curvature terms it sums.

    Coefficients are derivative values, so their size grows like ``k! t^-k``;
    the reference for coefficient ``k`` is the largest ``k``-th coefficient
    among the curvature components summed into ``r``.
    """
    r = pkg.scalar.coeffs
    if r.size < 2:
        return 0.0
    ref = np.max(np.abs(pkg.riemann.data), axis=(0, 1, 2, 3))
    return float(np.max(np.abs(r[1:]) / np.maximum(1.0, ref[1:])))


@dataclass(frozen=True)
class Certificates:
    nijenhuis: float
    nabla_j: float
    d_omega: float
    tol: float

    @property
    def verdicts(self) -> dict[str, bool]:
        return {
            "nijenhuis": self.nijenhuis < self.tol,
            "nabla_j": self.nabla_j < self.tol,
            "d_omega": self.d_omega < self.tol,
        }

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())


def nijenhuis(frame: FrameSpec, cs: ComplexStructure) -> np.ndarray:
    """Components ``N[i, j, l]`` of ``N_J(e_i, e_j)``; J is constant in the frame."""
    c = frame.brackets.data
    Jm = cs.Jmat
    t1 = J.jeinsum("abl,ia,jb->ijl", c, Jm, Jm)
    t2 = J.jeinsum("ibx,jb,xl->ijl", c, Jm, Jm)
    t3 = J.jeinsum("ajx,ia,xl->ijl", c, Jm, Jm)
    return t1 - t2 - t3 - c


def d_omega(frame: FrameSpec, cs: ComplexStructure) -> np.ndarray:
    """``dOmega(e_i, e_j, e_k)`` with ``Omega[i, j] = Jmat[i, j]`` constant."""
    c = frame.brackets.data
    om = J.jeinsum("ija,ak->ijk", c, cs.Jmat)  # Omega([e_i, e_j], e_k)
    return -om + np.einsum("ikj...->ijk...", om) - np.einsum("jki...->ijk...", om)


def kaehler_certificates(
    frame: FrameSpec, cs: ComplexStructure, pkg: KaehlerPackage, tol: float = 1e-9
) -> Certificates:
    """Residual norms of ``N_J``, ``nabla J`` and ``dOmega``, all jet coefficients."""
    scale = max(1.0, float(np.max(np.abs(frame.brackets.value))))
    nj = float(np.max(np.abs(nijenhuis(frame, cs)))) / scale
    dj = float(np.max(np.abs(pkg.nabla(pkg.jtensor()).data))) / scale
    do = float(np.max(np.abs(d_omega(frame, cs)))) / scale
    return Certificates(nj, dj, do, tol)
