import numpy as np
import pytest

from conftest import sweep
from curvlab.example_family import FamilyParams, PowerH, SqrtH, build_family, case_presets, oracle_eval
from curvlab.frame_tensor import Tensor, frobenius_sq
from curvlab.identity_audit import CATALOG, FAIL, PASS, SKIPPED, preconditions, run_audit
from curvlab.jet import jet_const
from curvlab.kaehler_model import ComplexStructure, FrameSpec, build_package
from curvlab.pseudosymmetry import projective_tensor

KAEHLER_IDS = [i for i in CATALOG if i.startswith("kaehler.")]


def audit(p, f=None, cs=None):
    F, cs0 = build_family(p)
    pkg = build_package(F, cs or cs0)
    return pkg, run_audit(pkg, f or oracle_eval(p, "f"), p.to_dict())


def test_catalog_is_complete_and_unique():
    assert len(CATALOG) == len(set(CATALOG)) == 42
    _, rep = audit(FamilyParams(1, PowerH(-2.0), 1.0))
    assert [e.id for e in rep.entries] == list(CATALOG)


@pytest.mark.parametrize("m,h,t0", list(sweep())[::4])
def test_audit_passes_on_family(m, h, t0):
    _, rep = audit(FamilyParams(m, h, t0))
    assert rep.passed, [(e.id, e.residual) for e in rep.failures()]
    by = rep.by_id()
    for cid in CATALOG[:18]:
        assert by[cid].verdict == PASS, cid
    assert by["riemann.ricci_identity"].verdict == PASS


@pytest.mark.parametrize("which", ["i", "ii", "iii"])
def test_constant_r_identities_run_on_cases(which):
    p = case_presets(which, 2, 0.6)
    _, rep = audit(p)
    by = rep.by_id()
    assert rep.preconditions["constant_r"]
    for cid in ("ricci.traced_hessian_const_r", "ricci.laplacian_norm_pseudosym"):
        assert by[cid].verdict == PASS
    einstein = rep.preconditions["parallel_ricci"]
    assert einstein == (which != "i")
    for cid in ("riemann.lichnerowicz", "riemann.traced_f_reduced", "riemann.f_contracted_norm"):
        assert by[cid].verdict == PASS
    lap = by["riemann.laplacian_norm_pseudosym"].verdict
    assert lap == (PASS if einstein else SKIPPED)


def test_generic_h_skips_constant_r_identities():
    _, rep = audit(FamilyParams(2, PowerH(-1.5), 1.3))
    by = rep.by_id()
    assert not rep.preconditions["constant_r"]
    assert by["ricci.laplacian_norm_pseudosym"].verdict == SKIPPED
    assert by["ricci.laplacian_norm_pseudosym"].residual is None
    assert rep.passed


def test_laplacian_of_ricci_norm_case_i():
    # r = 0, n = 2, f = 1, |S|^2 = 16: Laplacian of |S|^2 is 256 + 2|nabla S|^2
    p = case_presets("i", 1, 1.0)
    pkg = build_package(*build_family(p))
    S = pkg.ricci
    assert abs(frobenius_sq(S).value - 16) < 1e-12
    from curvlab.identity_audit import _Ctx

    c = _Ctx(pkg, oracle_eval(p, "f"))
    lhs = c.lap_s_norm.v
    rhs = 256 + 2 * np.sum(pkg.nabla_s.value ** 2)
    assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(rhs))


def test_laplacian_of_curvature_norm_case_ii():
    p = case_presets("ii", 1, 1.3)
    pkg = build_package(*build_family(p))
    from curvlab.identity_audit import _Ctx

    c = _Ctx(pkg, oracle_eval(p, "f"))
    P = projective_tensor(pkg).value
    f = oracle_eval(p, "f").value
    rhs = 2 * np.sum(pkg.nabla_r.value**2) + 8 * (pkg.n + 1) * f * np.sum(P**2)
    assert abs(c.lap_r_norm.v - rhs) < 1e-7 * abs(rhs)


def test_bianchi_pair_sum_reports_other_sign():
    _, rep = audit(FamilyParams(1, PowerH(-2.0), 1.0))
    e = rep.by_id()["riemann.bianchi_pair_sum"]
    assert e.verdict == PASS
    assert e.detail["opposite_sign_residual"] > 1e-3


def test_flat_frame_passes_exactly():
    F = FrameSpec(Tensor.zeros(4, 3, 1.0, 5), 3, jet_const(1.0, 1.0, 5))
    pkg = build_package(F, ComplexStructure.standard(4))
    rep = run_audit(pkg, jet_const(0.0, 1.0, 5))
    assert rep.passed
    assert all(e.residual == 0 for e in rep.entries if e.residual is not None)


def test_wrong_j_fails_kaehler_identities():
    p = FamilyParams(2, PowerH(-2.0), 1.2)
    _, rep = audit(p, cs=ComplexStructure.standard(6))
    by = rep.by_id()
    failed = [cid for cid in KAEHLER_IDS if by[cid].verdict == FAIL]
    assert "kaehler.r_j_invariant" in failed
    assert len(failed) >= 3


def relabel(frame, cs, sigma):
    sigma = np.asarray(sigma)
    c = np.empty_like(frame.brackets.data)
    c[np.ix_(sigma, sigma, sigma)] = frame.brackets.data
    Jm = np.empty_like(cs.Jmat)
    Jm[np.ix_(sigma, sigma)] = cs.Jmat
    F = FrameSpec(Tensor(c, frame.base_point), int(sigma[frame.deriv_direction]), frame.deriv_factor)
    return F, ComplexStructure(Jm)


@pytest.mark.parametrize("sigma", [(1, 0, 3, 2, 4, 5), (4, 5, 2, 3, 0, 1), (2, 3, 0, 1, 4, 5)])
def test_residuals_invariant_under_relabeling(sigma):
    p = FamilyParams(2, SqrtH(1, 0, -1), 0.6)
    F, cs = build_family(p)
    f = oracle_eval(p, "f")
    base = run_audit(build_package(F, cs), f)
    moved = run_audit(build_package(*relabel(F, cs, sigma)), f)
    for a, b in zip(base.entries, moved.entries):
        assert a.id == b.id and a.verdict == b.verdict
        if a.residual is not None:
            assert abs(a.residual - b.residual) < 1e-12, a.id


def test_preconditions_detect_non_pseudosymmetry():
    p = FamilyParams(2, PowerH(-2.0), 1.2)
    pkg = build_package(*build_family(p))
    wrong_f = oracle_eval(p, "f") + 1.0
    pre = preconditions(pkg, wrong_f)
    assert not pre["pseudosymmetric"]
    rep = run_audit(pkg, wrong_f)
    assert rep.by_id()["riemann.pseudosym_f_tensor"].verdict == SKIPPED
