"""The ``(2m+2)``-dimensional family of Kähler frames driven by a function ``h(t)``.

Frame indices (0-based): ``a`` and ``a' = a + m`` for ``a < m``, then
``z = 2m`` and ``w = 2m + 1``.  The non-zero brackets are

    [e_a, e_b'] = 2 h delta_ab e_z
    [e_a, e_w]  = h e_a,     [e_a', e_w] = h e_a'
    [e_z, e_w]  = (2h + t h') e_z

with ``e_w(phi) = t h phi'`` on scalar fields and ``J e_a = e_a'``,
``J e_z = e_w``.  Every closed form is available through
:func:`oracle_eval` so engine output can be cross-checked.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .frame_tensor import Tensor
from .jet import Jet, jet_const, jet_coordinate, jet_pow, jet_sqrt
from .kaehler_model import ComplexStructure, FrameSpec

DEFAULT_ORDER = 5


class InvalidParams(ValueError):
    pass


@dataclass(frozen=True)
class PowerH:
    """``h(t) = coef * t**p``."""

    p: float
    coef: float = 1.0

    def __call__(self, t0: float, K: int, m: int) -> Jet:
        return self.coef * jet_pow(jet_coordinate(t0, K), self.p)

    def label(self) -> str:
        return f"power:p={self.p:g}" + (f",coef={self.coef:g}" if self.coef != 1.0 else "")


@dataclass(frozen=True)
class SqrtH:
    """``h(t) = t**-(2+m) * sqrt(a + b t**2 + c t**(4+2m))``; ``r`` is constant."""

    a: float
    b: float
    c: float

    def radicand(self, t0: float, K: int, m: int) -> Jet:
        t = jet_coordinate(t0, K)
        return self.a + self.b * t * t + self.c * jet_pow(t, 4.0 + 2 * m)

    def __call__(self, t0: float, K: int, m: int) -> Jet:
        rad = self.radicand(t0, K, m)
        if rad.value <= 0:
            raise InvalidParams(
                f"radicand a + b t^2 + c t^(4+2m) = {rad.value:g} must be positive at t={t0:g}"
            )
        return jet_pow(jet_coordinate(t0, K), -(2.0 + m)) * jet_sqrt(rad)

    def label(self) -> str:
        return f"sqrt:a={self.a:g},b={self.b:g},c={self.c:g}"


@dataclass(frozen=True)
class CustomH:
    """Any jet provider ``(t0, K) -> Jet``."""

    provider: Callable[[float, int], Jet]
    name: str = "custom"

    def __call__(self, t0: float, K: int, m: int) -> Jet:
        return self.provider(t0, K)

    def label(self) -> str:
        return self.name


HSpec = Union[PowerH, SqrtH, CustomH]


@dataclass(frozen=True)
class FamilyParams:
    """``K`` is the jet order of the bracket functions; ``h`` is evaluated one order higher."""

    m: int
    h: HSpec
    t0: float
    K: int = DEFAULT_ORDER

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 1:
            raise InvalidParams(f"m must be a positive integer, got {self.m!r}")
        if self.K < 1:
            raise InvalidParams("jet order K must be >= 1")
        if not self.t0 > 0:
            raise InvalidParams(f"t0 must be positive, got {self.t0!r}")
        if self.h_jet().value == 0:
            raise InvalidParams(f"h vanishes at t0={self.t0}")

    @property
    def dim(self) -> int:
        return 2 * self.m + 2

    @property
    def n(self) -> int:
        return self.m + 1

    def h_jet(self, order: int | None = None) -> Jet:
        return self.h(self.t0, self.K + 1 if order is None else order, self.m)

    def h_parts(self) -> tuple[Jet, Jet, Jet, Jet]:
        """``(t, h, h', h'')`` as jets of order ``K``."""
        hk = self.h(self.t0, self.K + 2, self.m)
        h = hk.truncate(self.K)
        hp = hk.shift().truncate(self.K)
        hpp = hk.shift().shift()
        return jet_coordinate(self.t0, self.K), h, hp, hpp

    def to_dict(self) -> dict:
        return {"m": self.m, "h": self.h.label(), "t0": self.t0, "K": self.K}


def indices(m: int) -> tuple[range, range, int, int]:
    """``(unprimed, primed, z, w)`` frame indices."""
    return range(m), range(m, 2 * m), 2 * m, 2 * m + 1


def standard_j(m: int) -> ComplexStructure:
    """``J e_a = e_a'``, ``J e_a' = -e_a``, ``J e_z = e_w``, ``J e_w = -e_z``."""
    dim = 2 * m + 2
    Jm = np.zeros((dim, dim))
    for a in range(m):
        Jm[a, a + m] = 1.0
        Jm[a + m, a] = -1.0
    Jm[2 * m, 2 * m + 1] = 1.0
    Jm[2 * m + 1, 2 * m] = -1.0
    return ComplexStructure(Jm)


def build_family(p: FamilyParams, validate: bool = True) -> tuple[FrameSpec, ComplexStructure]:
    t = jet_coordinate(p.t0, p.K)
    hjet = p.h_jet()
    h = hjet.truncate(p.K)
    hp = hjet.shift()
    m = p.m
    dim = p.dim
    un, pr, z, w = indices(m)

    c = np.zeros((dim, dim, dim, p.K + 1))

    def put(i, j, k, val: Jet):
        c[i, j, k] += val.coeffs
        c[j, i, k] -= val.coeffs

    for a in un:
        put(a, a + m, z, 2 * h)
        put(a, w, a, h)
        put(a + m, w, a + m, h)
    put(z, w, z, 2 * h + t * hp)

    brackets = Tensor(c, p.t0)
    frame = FrameSpec(brackets, w, t * h, validate=validate)
    return frame, standard_j(m)


def perturbed_family(p: FamilyParams, eps: float) -> tuple[FrameSpec, ComplexStructure]:
    """Negative control: add ``eps`` to ``[e_0, e_z]`` along ``e_0``.

    The result is generally not a Lie algebra of vector fields any more, so
    Jacobi validation is off; J stops being integrable and parallel.
    """
    frame, cs = build_family(p)
    c = np.array(frame.brackets.data)
    z = 2 * p.m
    c[0, z, 0, 0] += eps
    c[z, 0, 0, 0] -= eps
    bad = FrameSpec(Tensor(c, p.t0), frame.deriv_direction, frame.deriv_factor, validate=False)
    return bad, cs


# ---------------------------------------------------------------------------
# closed-form oracles
# ---------------------------------------------------------------------------


def _jet_array(shape, K) -> np.ndarray:
    return np.zeros(tuple(shape) + (K + 1,))


def _kaehler_closure(entries: dict, m: int, K: int, dim: int) -> np.ndarray:
    """Fill a rank-4 array from listed components using the curvature symmetries
    (pair skewness, pair exchange) and ``J``-invariance of the first pair."""
    cs = standard_j(m).Jmat
    jmap = {}
    for a in range(dim):
        (b,) = np.nonzero(cs[a])[0]
        jmap[a] = (int(b), float(cs[a, b]))

    def images(idx, val):
        h, i, j, k = idx
        yield (i, h, j, k), -val
        yield (h, i, k, j), -val
        yield (j, k, h, i), val
        (jh, sh), (ji, si) = jmap[h], jmap[i]
        # R(J e_h, J e_i) = R(e_h, e_i)  =>  R[Jh, Ji, ...] = sh*si*R[h, i, ...]
        yield (jh, ji, j, k), sh * si * val

    known = dict(entries)
    frontier = list(known.items())
    while frontier:
        nxt = []
        for idx, val in frontier:
            for im, v in images(idx, val):
                if im in known:
                    if not np.allclose(known[im], v, rtol=1e-13, atol=1e-13):
                        raise AssertionError(f"inconsistent closed-form table at {im}")
                    continue
                known[im] = v
                nxt.append((im, v))
        frontier = nxt

    out = _jet_array((dim,) * 4, K)
    for idx, val in known.items():
        out[idx] = val
    return out


def _delta(a, b) -> float:
    return 1.0 if a == b else 0.0


def _oracle_connection(p: FamilyParams) -> Tensor:
    t, h, hp, _ = p.h_parts()
    m = p.m
    un, _, z, w = indices(m)
    G = _jet_array((p.dim,) * 3, p.K)
    for a in un:
        ap = a + m
        G[a, a, w] = (-h).coeffs
        G[ap, ap, w] = (-h).coeffs
        G[a, ap, z] = h.coeffs
        G[ap, a, z] = (-h).coeffs
        G[a, z, ap] = (-h).coeffs
        G[z, a, ap] = (-h).coeffs
        G[ap, w, ap] = h.coeffs
        G[a, w, a] = h.coeffs
        G[ap, z, a] = h.coeffs
        G[z, ap, a] = h.coeffs
    G[z, z, w] = (-(2 * h + t * hp)).coeffs
    G[z, w, z] = (2 * h + t * hp).coeffs
    return Tensor(G, p.t0)


def _riemann_entries(p: FamilyParams, which: str) -> dict:
    t, h, hp, hpp = p.h_parts()
    m = p.m
    un, _, z, w = indices(m)
    if which == "riemann":
        k1 = h * h
        k2 = h * (h + t * hp)
        top = 4 * h * h + 7 * t * h * hp + t * t * (hp * hp + h * hpp)
    else:  # q
        k1 = -(t * h * hp)
        k2 = None
        top = 3 * t * h * hp + t * t * (hp * hp + h * hpp)

    entries = {}

    def put(idx, val):
        if np.any(val != 0):
            entries[idx] = val

    for al, be, ga, de in itertools.product(un, repeat=4):
        A, B, C, D = al + m, be + m, ga + m, de + m
        v1 = _delta(al, ga) * _delta(be, de) - _delta(al, de) * _delta(be, ga)
        if v1:
            put((al, be, ga, de), (v1 * k1).coeffs)
            put((al, be, C, D), (v1 * k1).coeffs)
            put((A, B, C, D), (v1 * k1).coeffs)
        v2 = (
            _delta(al, ga) * _delta(be, de)
            + _delta(be, ga) * _delta(al, de)
            + 2 * _delta(al, be) * _delta(ga, de)
        )
        if v2:
            put((al, B, ga, D), (v2 * k1).coeffs)
    if k2 is not None:
        for al in un:
            A = al + m
            put((al, A, z, w), (2 * k2).coeffs)
            for idx in [(al, z, al, z), (al, z, A, w), (al, w, al, w), (A, z, A, z), (A, w, A, w)]:
                put(idx, k2.coeffs)
            put((al, w, A, z), (-k2).coeffs)
    put((z, w, z, w), top.coeffs)
    return entries


def _oracle_rank4(p: FamilyParams, which: str) -> Tensor:
    data = _kaehler_closure(_riemann_entries(p, which), p.m, p.K, p.dim)
    return Tensor(data, p.t0)


def _oracle_ricci(p: FamilyParams) -> Tensor:
    t, h, hp, hpp = p.h_parts()
    m = p.m
    un, _, z, w = indices(m)
    S = _jet_array((p.dim,) * 2, p.K)
    s1 = -2 * ((m + 2) * h * h + t * h * hp)
    s2 = -2 * (m + 2) * h * h - (2 * m + 7) * t * h * hp - t * t * (hp * hp + h * hpp)
    for a in un:
        S[a, a] = s1.coeffs
        S[a + m, a + m] = s1.coeffs
    S[z, z] = s2.coeffs
    S[w, w] = s2.coeffs
    return Tensor(S, p.t0)


def _oracle_scalar(p: FamilyParams) -> Jet:
    t, h, hp, hpp = p.h_parts()
    m = p.m
    return (
        -4 * (m + 1) * (m + 2) * h * h
        - 2 * (4 * m + 7) * t * h * hp
        - 2 * t * t * (hp * hp + h * hpp)
    )


def _oracle_f(p: FamilyParams) -> Jet:
    t, h, hp, _ = p.h_parts()
    return -h * (h + t * hp)


def _oracle_rr_witness(p: FamilyParams) -> Jet:
    t, h, hp, _ = p.h_parts()
    return t * h * h * hp * (h + t * hp)


def _oracle_rr_at_index(p: FamilyParams) -> Jet:
    # for m = 1 the witness index pairs slot 2 with e_1', which picks up
    # three more terms of the same size as the generic one
    w = _oracle_rr_witness(p)
    return 4.0 * w if p.m == 1 else w


def _require_sqrt(p: FamilyParams) -> SqrtH:
    if not isinstance(p.h, SqrtH):
        raise InvalidParams("closed forms for constant scalar curvature need h = sqrt:a,b,c")
    return p.h


def _oracle_sqrt_scalar(p: FamilyParams) -> Jet:
    s = _require_sqrt(p)
    return jet_const(-4 * s.c * (p.m + 1) * (p.m + 2), p.t0, p.K)


def _oracle_sqrt_f(p: FamilyParams) -> Jet:
    s = _require_sqrt(p)
    m = p.m
    t = jet_coordinate(p.t0, p.K)
    tp = jet_pow(t, 4.0 + 2 * m)
    return (s.a * (m + 1) + s.b * m * t * t - s.c * tp) / tp


def rr_witness_index(m: int) -> tuple[int, ...]:
    """0-based position of the reference non-semisymmetry witness of ``R . R``."""
    z = 2 * m
    return (0, z, 0, 1, 1, z)


ORACLES = {
    "connection": _oracle_connection,
    "riemann": lambda p: _oracle_rank4(p, "riemann"),
    "ricci": _oracle_ricci,
    "scalar": _oracle_scalar,
    "f": _oracle_f,
    "q": lambda p: _oracle_rank4(p, "q"),
    "rr_witness": _oracle_rr_witness,
    "rr_at_index": _oracle_rr_at_index,
    "sqrt_scalar": _oracle_sqrt_scalar,
    "sqrt_f": _oracle_sqrt_f,
}


def oracle_eval(p: FamilyParams, which: str):
    """Closed-form table ``which`` assembled at ``p.t0`` (Tensor or Jet)."""
    try:
        fn = ORACLES[which]
    except KeyError:
        raise KeyError(f"unknown table id {which!r}; known: {sorted(ORACLES)}") from None
    return fn(p)


# ---------------------------------------------------------------------------
# the three preset constant-r cases
# ---------------------------------------------------------------------------

CASES = ("i", "ii", "iii")


def case_interval(which: str) -> tuple[float, float]:
    return (0.0, 1.0) if which == "iii" else (0.0, float("inf"))


def case_presets(which: str, m: int, t0: float = 1.0, a: float = 1.0, K: int = DEFAULT_ORDER) -> FamilyParams:
    if which == "i":
        h = SqrtH(0.0, 1.0, 0.0)
    elif which == "ii":
        h = SqrtH(1.0, 0.0, 0.0)
    elif which == "iii":
        if not a > 0:
            raise InvalidParams("case iii needs a > 0")
        h = SqrtH(a, 0.0, -a)
    else:
        raise InvalidParams(f"unknown case {which!r}; expected one of {CASES}")
    lo, hi = case_interval(which)
    if not lo < t0 < hi:
        raise InvalidParams(f"t0={t0} outside the interval ({lo}, {hi}) of case {which}")
    return FamilyParams(m=m, h=h, t0=t0, K=K)


def case_closed_forms(which: str, m: int, t0: float, a: float = 1.0) -> tuple[float, float]:
    """Closed-form ``(r, f(t0))`` for a preset case."""
    if which == "i":
        return 0.0, m / t0 ** (2 * m + 2)
    if which == "ii":
        return 0.0, (m + 1) / t0 ** (2 * m + 4)
    if which == "iii":
        return 4 * a * (m + 1) * (m + 2), a * (1 + (m + 1) / t0 ** (2 * m + 4))
    raise InvalidParams(f"unknown case {which!r}")


def default_t_grid(which: str | None = None) -> tuple[float, ...]:
    if which == "iii":
        return (0.35, 0.6, 0.85)
    return (0.8, 1.0, 1.6, 2.4)
