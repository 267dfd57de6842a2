"""Pointwise audit of the Kähler curvature identities and the Laplacian formulas.

Every check is evaluated on the value parts of the package tensors (jets are
only needed to produce the covariant derivatives and Laplacians).  A check
that holds only under a hypothesis is reported as skipped when the
hypothesis fails at the sample point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .frame_tensor import Tensor, frobenius_sq
from .jet import Jet
from .kaehler_model import KaehlerPackage
from .pseudosymmetry import (
    DEFAULT_TOL,
    build_rh,
    derivation_action,
    projective_tensor,
)

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped: precondition"

TOL_EXACT = 1e-9
TOL_RICCI_IDENTITY = 1e-8
TOL_SECOND_ORDER = 1e-7


@dataclass
class AuditEntry:
    id: str
    residual: Optional[float]
    scale: Optional[float]
    verdict: str
    tol: float
    detail: Optional[dict] = None

    def to_dict(self) -> dict:
        d = {"id": self.id, "residual": self.residual, "scale": self.scale, "verdict": self.verdict}
        if self.detail:
            d["detail"] = self.detail
        return d


@dataclass
class AuditReport:
    point: float
    params: dict
    entries: list[AuditEntry] = field(default_factory=list)
    preconditions: dict = field(default_factory=dict)

    def by_id(self) -> dict[str, AuditEntry]:
        return {e.id: e for e in self.entries}

    @property
    def passed(self) -> bool:
        return all(e.verdict != FAIL for e in self.entries)

    def failures(self) -> list[AuditEntry]:
        return [e for e in self.entries if e.verdict == FAIL]


class Op:
    """An array together with a bound on the size of the terms that produced it.

    ``mag`` is what residuals are measured against: a quantity obtained by
    cancellation (say ``nabla S`` on an Einstein frame) keeps the magnitude
    of its inputs rather than its own, possibly tiny, value.
    """

    __slots__ = ("v", "mag")

    def __init__(self, v, mag: float):
        self.v = np.asarray(v, dtype=float)
        self.mag = float(mag)

    def __add__(self, o: "Op") -> "Op":
        return Op(self.v + o.v, self.mag + o.mag)

    def __sub__(self, o: "Op") -> "Op":
        return Op(self.v - o.v, self.mag + o.mag)

    def __neg__(self) -> "Op":
        return Op(-self.v, self.mag)

    def __mul__(self, a: float) -> "Op":
        return Op(a * self.v, abs(a) * self.mag)

    __rmul__ = __mul__


def ein(spec: str, *ops: Op) -> Op:
    lhs, out = spec.split("->")
    sizes = {}
    for letters, op in zip(lhs.split(","), ops):
        sizes.update(zip(letters, op.v.shape))
    count = 1
    for letter, size in sizes.items():
        if letter not in out:
            count *= size
    mag = count * float(np.prod([op.mag for op in ops]))
    return Op(np.einsum(spec, *(op.v for op in ops), optimize=True), mag)


def _residual(terms: list[Op], tol: float) -> tuple[float, float, bool]:
    """Residual of ``sum(terms) == 0`` relative to the largest term entering it."""
    scale = max([1.0] + [t.mag for t in terms])
    total = sum((t.v for t in terms[1:]), terms[0].v)
    res = float(np.max(np.abs(total))) / scale
    return res, scale, res < tol


def _level(*arrays: np.ndarray) -> float:
    return max(float(np.max(np.abs(a))) for a in arrays)


class _Ctx:
    """Value-level views of everything the catalog needs, computed lazily.

    Magnitudes are shared per derivative level: ``L0`` bounds ``R``, ``S``
    and ``P``; ``L1`` bounds ``nabla R`` and ``nabla S``; ``L2`` bounds the
    second derivatives.
    """

    def __init__(self, pkg: KaehlerPackage, f: Jet):
        self.pkg = pkg
        self.n = pkg.n
        self.dim = pkg.dim
        self.Jm = Op(pkg.complex_structure.Jmat, 1.0)
        self.g = Op(np.eye(pkg.dim), 1.0)
        self.f = f.value
        self._cache: dict = {}

    def get(self, key: str, build: Callable):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    @property
    def L0(self) -> float:
        return self.get("L0", lambda: _level(self.pkg.riemann.value, self.pkg.ricci.value))

    @property
    def L1(self) -> float:
        return self.get("L1", lambda: _level(self.pkg.nabla_r.value, self.pkg.nabla_s.value))

    @property
    def L2(self) -> float:
        return self.get("L2", lambda: _level(self.pkg.nabla2_r.value, self.pkg.nabla2_s.value))

    @property
    def R(self) -> Op:
        return Op(self.pkg.riemann.value, self.L0)

    @property
    def S(self) -> Op:
        return Op(self.pkg.ricci.value, self.L0)

    @property
    def r(self) -> Op:
        return Op(self.pkg.scalar.value, self.dim * self.L0)

    @property
    def dS(self) -> Op:
        return Op(self.pkg.nabla_s.value, self.L1)

    @property
    def ddS(self) -> Op:
        return Op(self.pkg.nabla2_s.value, self.L2)

    @property
    def dR(self) -> Op:
        return Op(self.pkg.nabla_r.value, self.L1)

    @property
    def ddR(self) -> Op:
        return Op(self.pkg.nabla2_r.value, self.L2)

    @property
    def F(self) -> Op:
        return self.get("F", lambda: self.ddR - Op(np.swapaxes(self.ddR.v, 0, 1), self.L2))

    @property
    def P(self) -> Op:
        return self.get("P", lambda: Op(projective_tensor(self.pkg).value, 2 * self.L0))

    def grad(self, phi: Jet) -> Tensor:
        return Tensor(self.pkg.frame.frame_derivative(phi.coeffs), phi.base_point)

    def laplacian(self, phi: Jet) -> float:
        """Trace of the second covariant derivative of a scalar."""
        hess = self.pkg.nabla(self.grad(phi))
        return float(np.trace(hess.value))

    def _lap_mag(self, rank: int) -> float:
        # |S|^2 or |R|^2 has dim**rank terms; its Laplacian mixes L0*L2 and L1**2
        return 2 * self.dim ** (rank + 1) * (self.L0 * self.L2 + self.L1**2)

    @property
    def lap_s_norm(self) -> Op:
        return self.get("lap_s", lambda: Op(
            self.laplacian(frobenius_sq(self.pkg.ricci)), self._lap_mag(2)))

    @property
    def lap_r_norm(self) -> Op:
        return self.get("lap_r", lambda: Op(
            self.laplacian(frobenius_sq(self.pkg.riemann)), self._lap_mag(4)))

    @property
    def grad_r(self) -> Op:
        return self.get("grad_r", lambda: Op(self.grad(self.pkg.scalar).value, self.dim * self.L1))

    def action(self, key: str, A: Tensor, T: Tensor, a_mag: float, t_mag: float) -> Op:
        """Derivation action as an :class:`Op`."""
        return self.get(key, lambda: Op(
            derivation_action(A, T).value, 2 * T.rank * self.dim * a_mag * t_mag))

    def rh(self, order: int) -> Tensor:
        return build_rh(self.pkg.complex_structure, self.pkg.base_point, order).comps


def _rh_expansion(T: Op, Jm: Op) -> Op:
    """``R^H . T`` written out slot by slot for a J-invariant, J-skew ``T``:

    ``-sum_s [g(V,X_s) T(..U..) - g(U,X_s) T(..V..) + g(JV,X_s) T(..JU..) - g(JU,X_s) T(..JV..)]``
    at ``(U, V) = (e_p, e_q)``; the ``g(JU,V) JX`` part cancels for such ``T``.
    """
    k = T.v.ndim
    dim = Jm.v.shape[0]
    g = Op(np.eye(dim), 1.0)
    letters = "wxyz"[:k]
    tgt = f"pq{letters}"
    out = None
    for s in range(k):
        xs = letters[s]
        with_p = letters[:s] + "p" + letters[s + 1 :]
        with_q = letters[:s] + "q" + letters[s + 1 :]
        with_a = letters[:s] + "a" + letters[s + 1 :]
        term = (
            ein(f"p{xs},{with_q}->{tgt}", g, T)
            - ein(f"q{xs},{with_p}->{tgt}", g, T)
            - ein(f"q{xs},pa,{with_a}->{tgt}", Jm, Jm, T)
            + ein(f"p{xs},qa,{with_a}->{tgt}", Jm, Jm, T)
        )
        out = term if out is None else out + term
    return out


# ---------------------------------------------------------------------------
# catalog: each check yields (id, tolerance, precondition, terms builder);
# the terms of a check sum to zero when the identity holds
# ---------------------------------------------------------------------------


def _swap(spec: str, x: Op) -> Op:
    return Op(np.einsum(spec, x.v), x.mag)


def _kaehler_checks(c: _Ctx):
    R, S, Jm = c.R, c.S, c.Jm
    yield "riemann.skew_first_pair", TOL_EXACT, None, lambda: [R, _swap("ihjk->hijk", R)]
    yield "riemann.skew_last_pair", TOL_EXACT, None, lambda: [R, _swap("hikj->hijk", R)]
    yield "riemann.pair_symmetry", TOL_EXACT, None, lambda: [R, -_swap("jkhi->hijk", R)]
    yield "riemann.first_bianchi", TOL_EXACT, None, lambda: [
        R, _swap("hjki->hijk", R), _swap("hkij->hijk", R)]
    # R(JU,JV) = R(U,V)
    yield "kaehler.r_j_invariant", TOL_EXACT, None, lambda: [
        ein("ha,ib,abjk->hijk", Jm, Jm, R), -R]
    # R(JU,V) + R(U,JV) = 0
    yield "kaehler.r_j_skew", TOL_EXACT, None, lambda: [
        ein("ha,aijk->hijk", Jm, R), ein("ia,hajk->hijk", Jm, R)]
    yield "kaehler.s_j_invariant", TOL_EXACT, None, lambda: [ein("ia,jb,ab->ij", Jm, Jm, S), -S]
    yield "kaehler.s_j_skew", TOL_EXACT, None, lambda: [
        ein("ia,aj->ij", Jm, S), ein("ja,ia->ij", Jm, S)]
    # Trace{X -> R(JX,U)V} = -S(JU,V)
    yield "kaehler.trace_r_jx", TOL_EXACT, None, lambda: [
        ein("xa,aijx->ij", Jm, R), ein("ia,aj->ij", Jm, S)]
    # Trace_g{(X,Y) -> R(JX,Y,U,V)} = 2 S(JU,V)
    yield "kaehler.trace_g_r_jx", TOL_EXACT, None, lambda: [
        ein("xa,axij->ij", Jm, R), -2 * ein("ia,aj->ij", Jm, S)]
    # (nabla_X S)(Y,JZ) + (nabla_Y S)(Z,JX) + (nabla_Z S)(X,JY) = 0
    yield "kaehler.ricci_form_closed", TOL_EXACT, None, lambda: [
        ein("xyb,zb->xyz", c.dS, Jm), ein("yzb,xb->xyz", c.dS, Jm), ein("zxb,yb->xyz", c.dS, Jm)]


def _ricci_checks(c: _Ctx):
    S, Jm, g, n, f = c.S, c.Jm, c.g, c.n, c.f
    yield "ricci.contracted_bianchi", TOL_EXACT, None, lambda: [
        ein("hkh->k", c.dS), -0.5 * c.grad_r]
    # Laplacian of |S|^2 by the product rule
    yield "ricci.laplacian_norm_expansion", TOL_EXACT, None, lambda: [
        c.lap_s_norm, -2 * ein("iijk,jk->", c.ddS, S), -2 * ein("ijk,ijk->", c.dS, c.dS)]
    # -nabla_i S_jk + nabla_j S_ki + nabla_b S_ia J^b_k J^a_j = 0
    yield "ricci.form_j_variant", TOL_EXACT, None, lambda: [
        -c.dS, _swap("jki->ijk", c.dS), ein("bia,kb,ja->ijk", c.dS, Jm, Jm)]
    # S_ab J^a_i J^b_j = S_ij
    yield "ricci.s_j_components", TOL_EXACT, None, lambda: [ein("ab,ia,jb->ij", S, Jm, Jm), -S]
    # (nabla^i nabla_i S_jk) S^jk = 2 g^hi (nabla_h nabla_j S_ki) S^jk
    yield "ricci.hessian_contraction", TOL_EXACT, None, lambda: [
        ein("iijk,jk->", c.ddS, S), -2 * ein("hjkh,jk->", c.ddS, S)]
    yield "ricci.rh_dot_s_expansion", TOL_EXACT, None, lambda: [
        c.action("rh_s", c.rh(c.pkg.ricci.order), c.pkg.ricci, 4.0, c.L0), -_rh_expansion(S, Jm)]
    # nabla^2_{UV} S - nabla^2_{VU} S = R(U,V) . S
    yield "ricci.ricci_identity", TOL_RICCI_IDENTITY, None, lambda: [
        c.ddS - _swap("jh...->hj...", c.ddS),
        -c.action("r_s", c.pkg.riemann, c.pkg.ricci, c.L0, c.L0)]
    yield "ricci.pseudosym_hessian", TOL_RICCI_IDENTITY, "ricci_pseudosymmetric", lambda: [
        c.ddS - _swap("jhki->hjki", c.ddS),
        -f * (
            -ein("jk,hi->hjki", g, S) + ein("hk,ji->hjki", g, S)
            - ein("ji,kh->hjki", g, S) + ein("hi,kj->hjki", g, S)
            - ein("jk,ha,ai->hjki", Jm, Jm, S) + ein("hk,ja,ai->hjki", Jm, Jm, S)
            - ein("ji,ka,ha->hjki", Jm, S, Jm) + ein("hi,ka,ja->hjki", Jm, S, Jm))]
    yield "ricci.traced_pseudosym", TOL_RICCI_IDENTITY, "ricci_pseudosymmetric", lambda: [
        ein("hjkh->jk", c.ddS) - ein("jhkh->jk", c.ddS),
        -f * (2 * n * S - Op(c.r.v * g.v, c.r.mag))]
    yield "ricci.traced_hessian_const_r", TOL_RICCI_IDENTITY, "ricci_pseudosymmetric+constant_r", lambda: [
        ein("hjkh->jk", c.ddS), -f * (2 * n * S - Op(c.r.v * g.v, c.r.mag))]
    yield "ricci.laplacian_norm_pseudosym", TOL_SECOND_ORDER, "ricci_pseudosymmetric+constant_r", lambda: [
        c.lap_s_norm,
        -8 * n * f * (ein("ij,ij->", S, S) - Op(c.r.v**2 / (2 * n), c.r.mag**2 / (2 * n))),
        -2 * ein("ijk,ijk->", c.dS, c.dS)]


def _riemann_checks(c: _Ctx):
    R, S, Jm, g, n, f = c.R, c.S, c.Jm, c.g, c.n, c.f
    # J^a_i J^b_j R_abkl = R_ijkl ; J^a_i R_ajkl = J^a_j R_aikl
    yield "riemann.j_pair_invariance", TOL_EXACT, None, lambda: [
        ein("ia,jb,abkl->ijkl", Jm, Jm, R), -R]
    yield "riemann.j_slot_exchange", TOL_EXACT, None, lambda: [
        ein("ia,ajkl->ijkl", Jm, R), -ein("ja,aikl->ijkl", Jm, R)]
    # J^ab R_ajkb = J^a_j S_ak ; J^ab R_abkl = -2 J^a_k S_al
    yield "riemann.j_trace_mixed", TOL_EXACT, None, lambda: [
        ein("ab,ajkb->jk", Jm, R), -ein("ja,ak->jk", Jm, S)]
    yield "riemann.j_trace_first_pair", TOL_EXACT, None, lambda: [
        ein("ab,abkl->kl", Jm, R), 2 * ein("ka,al->kl", Jm, S)]
    # R_ikql + R_ilkq = R_iqkl
    yield "riemann.bianchi_pair_sum", TOL_EXACT, None, lambda: [
        _swap("ikql->iqkl", R), _swap("ilkq->iqkl", R), -R]
    # -J^a_k J^b_q R_iabl - J^a_l J^b_q R_iakb = R_iqkl
    yield "riemann.j_double_contraction", TOL_EXACT, None, lambda: [
        -ein("ka,qb,iabl->iqkl", Jm, Jm, R), -ein("la,qb,iakb->iqkl", Jm, Jm, R), -R]
    # F = nabla^2 R antisymmetrized = R . R
    yield "riemann.ricci_identity", TOL_RICCI_IDENTITY, None, lambda: [
        c.F, -c.action("r_r", c.pkg.riemann, c.pkg.riemann, c.L0, c.L0)]
    yield "riemann.rh_dot_r_expansion", TOL_EXACT, None, lambda: [
        c.action("rh_r", c.rh(c.pkg.riemann.order), c.pkg.riemann, 4.0, c.L0), -_rh_expansion(R, Jm)]
    yield "riemann.lichnerowicz", TOL_SECOND_ORDER, None, lambda: [
        c.lap_r_norm,
        -2 * ein("pijkl,pijkl->", c.dR, c.dR),
        -4 * (ein("ijkl,jkil->", R, c.ddS) - ein("ijkl,jlik->", R, c.ddS)),
        4 * ein("ijkl,pijpkl->", R, c.F)]
    yield "riemann.pseudosym_f_tensor", TOL_RICCI_IDENTITY, "pseudosymmetric", lambda: [
        c.F, -f * _rh_expansion(R, Jm)]
    # g^pj F_pqijkl written out before simplification
    yield "riemann.traced_f_tensor", TOL_RICCI_IDENTITY, "pseudosymmetric", lambda: [
        ein("pqipkl->qikl", c.F),
        -f * (
            (2 * n - 1) * _swap("iqkl->qikl", R) + _swap("ikql->qikl", R) + _swap("ilkq->qikl", R)
            + ein("ia,qb,abkl->qikl", Jm, Jm, R)
            - ein("ka,qb,iabl->qikl", Jm, Jm, R) - ein("la,qb,iakb->qikl", Jm, Jm, R)
            - ein("qk,il->qikl", g, S) + ein("ql,ik->qikl", g, S)
            - ein("qk,ab,ailb->qikl", Jm, Jm, R) + ein("ql,ab,aikb->qikl", Jm, Jm, R)
            + ein("qi,ab,abkl->qikl", Jm, Jm, R))]
    yield "riemann.traced_f_reduced", TOL_SECOND_ORDER, "pseudosymmetric", lambda: [
        ein("pqipkl->qikl", c.F),
        -f * (
            2 * (n + 1) * _swap("kliq->qikl", R)
            - ein("li,kq->qikl", S, g) + ein("ki,lq->qikl", S, g)
            - ein("la,ai,kq->qikl", Jm, S, Jm) + ein("ka,ai,lq->qikl", Jm, S, Jm)
            + 2 * ein("ka,al,iq->qikl", Jm, S, Jm))]
    yield "riemann.traced_f_projective", TOL_SECOND_ORDER, "pseudosymmetric", lambda: [
        ein("pqipkl->qikl", c.F), -2 * (n + 1) * f * _swap("kliq->qikl", c.P)]
    # R^ijkl g^pq F_pijqkl = 2(n+1) f P_klji R^ijkl
    yield "riemann.f_contracted_with_r", TOL_SECOND_ORDER, "pseudosymmetric", lambda: [
        ein("ijkl,pijpkl->", R, c.F), -2 * (n + 1) * f * ein("klji,ijkl->", c.P, R)]
    yield "riemann.projective_norm_pr", TOL_EXACT, None, lambda: [
        ein("ijkl,ijkl->", c.P, c.P), -ein("ijkl,ijkl->", c.P, R)]
    yield "riemann.projective_norm_formula", TOL_EXACT, None, lambda: [
        ein("ijkl,ijkl->", c.P, R), -ein("ijkl,ijkl->", R, R), (4.0 / (n + 1)) * ein("ij,ij->", S, S)]
    # R^ijkl g^pq F_pijqkl = -2(n+1) f |P|^2
    yield "riemann.f_contracted_norm", TOL_SECOND_ORDER, "pseudosymmetric", lambda: [
        ein("ijkl,pijpkl->", R, c.F), 2 * (n + 1) * f * ein("ijkl,ijkl->", c.P, c.P)]
    yield "riemann.laplacian_norm_pseudosym", TOL_SECOND_ORDER, "pseudosymmetric+parallel_ricci", lambda: [
        c.lap_r_norm,
        -2 * ein("pijkl,pijkl->", c.dR, c.dR),
        -8 * (n + 1) * f * ein("ijkl,ijkl->", c.P, c.P)]


def _bound_checks(c: _Ctx):
    """Non-negativity statements; the residual is the relative violation."""
    S, n = c.S.v, c.n
    s2 = float(np.einsum("ij,ij->", S, S))
    yield "ricci.norm_bound", lambda: (s2 - c.r.v**2 / (2 * n), max(1.0, s2, c.r.v**2 / (2 * n)))
    yield "riemann.projective_norm_nonneg", lambda: (
        float(np.einsum("ijkl,ijkl->", c.P.v, c.P.v)),
        max(1.0, float(np.einsum("ijkl,ijkl->", c.R.v, c.R.v))))


CATALOG_GROUPS = (_kaehler_checks, _ricci_checks, _riemann_checks)

CATALOG = (
    "riemann.skew_first_pair",
    "riemann.skew_last_pair",
    "riemann.pair_symmetry",
    "riemann.first_bianchi",
    "kaehler.r_j_invariant",
    "kaehler.r_j_skew",
    "kaehler.s_j_invariant",
    "kaehler.s_j_skew",
    "kaehler.trace_r_jx",
    "kaehler.trace_g_r_jx",
    "kaehler.ricci_form_closed",
    "ricci.contracted_bianchi",
    "ricci.laplacian_norm_expansion",
    "ricci.form_j_variant",
    "ricci.s_j_components",
    "ricci.hessian_contraction",
    "ricci.rh_dot_s_expansion",
    "ricci.ricci_identity",
    "ricci.pseudosym_hessian",
    "ricci.traced_pseudosym",
    "ricci.traced_hessian_const_r",
    "ricci.laplacian_norm_pseudosym",
    "riemann.j_pair_invariance",
    "riemann.j_slot_exchange",
    "riemann.j_trace_mixed",
    "riemann.j_trace_first_pair",
    "riemann.bianchi_pair_sum",
    "riemann.j_double_contraction",
    "riemann.ricci_identity",
    "riemann.rh_dot_r_expansion",
    "riemann.lichnerowicz",
    "riemann.pseudosym_f_tensor",
    "riemann.traced_f_tensor",
    "riemann.traced_f_reduced",
    "riemann.traced_f_projective",
    "riemann.f_contracted_with_r",
    "riemann.projective_norm_pr",
    "riemann.projective_norm_formula",
    "riemann.f_contracted_norm",
    "riemann.laplacian_norm_pseudosym",
    "ricci.norm_bound",
    "riemann.projective_norm_nonneg",
)


def preconditions(pkg: KaehlerPackage, f: Jet, tol: float = DEFAULT_TOL) -> dict[str, bool]:
    """Hypotheses some identities are derived under, tested at this point."""
    R, S = pkg.riemann, pkg.ricci
    rh_r = derivation_action(build_rh(pkg.complex_structure, pkg.base_point, R.order), R).value
    rr = derivation_action(R, R).value
    rh_s = derivation_action(build_rh(pkg.complex_structure, pkg.base_point, S.order), S).value
    rs = derivation_action(R, S).value
    fv = f.value
    r0 = float(np.max(np.abs(R.value)))

    def fits(x, y):
        # both actions are bounded by 2 * rank * dim * |R|^2 (or |R^H| |R|)
        scale = max(1.0, float(np.max(np.abs(x))), abs(fv) * float(np.max(np.abs(y))), r0**2)
        return float(np.max(np.abs(x - fv * y))) / scale < tol

    r = pkg.scalar.coeffs
    level1 = max(1.0, float(np.max(np.abs(pkg.nabla_r.value))))
    r_scale = max(1.0, float(np.max(np.abs(pkg.riemann.data[..., 1:])))) * pkg.dim
    return {
        "pseudosymmetric": fits(rr, rh_r),
        "ricci_pseudosymmetric": fits(rs, rh_s),
        "constant_r": bool(r.size > 1 and np.max(np.abs(r[1:])) / r_scale < tol),
        "parallel_ricci": float(np.max(np.abs(pkg.nabla_s.value))) / level1 < tol,
    }


def _gate(pre: dict, need: Optional[str]) -> bool:
    if need is None:
        return True
    return all(pre.get(k, False) for k in need.split("+"))


def run_audit(pkg: KaehlerPackage, f: Jet, params: Optional[dict] = None, tol: float = DEFAULT_TOL) -> AuditReport:
    """Evaluate the whole catalog at ``pkg``'s sample point.

    ``f`` is the structure function used by the identities that assume
    pseudosymmetry; ``tol`` is the tolerance of the precondition tests.
    """
    ctx = _Ctx(pkg, f)
    pre = preconditions(pkg, f, tol)
    report = AuditReport(point=pkg.base_point, params=dict(params or {}), preconditions=pre)
    for grp in CATALOG_GROUPS:
        for cid, id_tol, need, build in grp(ctx):
            if not _gate(pre, need):
                report.entries.append(AuditEntry(cid, None, None, SKIPPED, id_tol))
                continue
            res, scale, ok = _residual(build(), id_tol)
            detail = None
            if cid == "riemann.bianchi_pair_sum":
                R = ctx.R
                alt, _, _ = _residual([_swap("ikql->iqkl", R), _swap("ilkq->iqkl", R), R], id_tol)
                detail = {"opposite_sign_residual": alt}
            report.entries.append(AuditEntry(cid, res, scale, PASS if ok else FAIL, id_tol, detail))
    for cid, build in _bound_checks(ctx):
        value, scale = build()
        violation = max(0.0, -value) / scale
        report.entries.append(
            AuditEntry(cid, violation, scale, PASS if violation < TOL_EXACT else FAIL, TOL_EXACT,
                       {"value": value}))
    ids = tuple(e.id for e in report.entries)
    if ids != CATALOG:
        raise AssertionError("audit catalog drifted from CATALOG")
    return report
