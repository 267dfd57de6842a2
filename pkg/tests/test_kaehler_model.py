import numpy as np
import pytest

from conftest import coeff_scale, rel_err, sweep
from curvlab.example_family import FamilyParams, PowerH, SqrtH, build_family, perturbed_family, oracle_eval
from curvlab.frame_tensor import Tensor
from curvlab.jet import jet_const, jet_coordinate
from curvlab.kaehler_model import (
    ComplexStructure,
    FrameSpec,
    FrameSpecError,
    build_package,
    curvature,
    kaehler_certificates,
    koszul_connection,
    ricci_convention,
)

SWEEP = list(sweep())


def flat_frame(dim=4, K=3):
    c = Tensor.zeros(dim, 3, 1.0, K)
    return FrameSpec(c, dim - 1, jet_const(1.0, 1.0, K))


def test_flat_frame_has_no_curvature():
    F = flat_frame()
    g = koszul_connection(F)
    assert not np.any(g.data)
    assert not np.any(curvature(F, g).data)
    cs = ComplexStructure.standard(4)
    cert = kaehler_certificates(F, cs, build_package(F, cs))
    assert (cert.nijenhuis, cert.nabla_j, cert.d_omega) == (0.0, 0.0, 0.0)


def test_connection_examples(packages):
    # Gamma_{z z}^{w} = -(2h + t h') and Gamma_{ab}^{w} = -h delta_ab
    p, pkg = packages(2, PowerH(-2.0), 1.6)
    t, h, hp, _ = p.h_parts()
    z, w = 4, 5
    assert abs(pkg.gamma.value[z, z, w] + (2 * h + t * hp).value) < 1e-12
    for a in range(2):
        for b in range(2):
            want = -h.value if a == b else 0.0
            assert abs(pkg.gamma.value[a, b, w] - want) < 1e-12


def test_curvature_example_m1():
    p = FamilyParams(1, PowerH(-2.0), 1.0)
    pkg = build_package(*build_family(p))
    # 4h^2 + 7thh' + t^2(h'^2 + hh'') at h=1, h'=-2, h''=6
    assert abs(pkg.riemann.value[2, 3, 2, 3]) < 1e-12
    assert abs(pkg.ricci.value[0, 0] + 2.0) < 1e-12
    assert abs(pkg.scalar.value) < 1e-12


def test_ricci_convention_is_pinned():
    assert ricci_convention() == "aija"


@pytest.mark.parametrize("m,h,t0", SWEEP)
def test_oracles(m, h, t0, packages):
    p, pkg = packages(m, h, t0)
    gs = coeff_scale(pkg.gamma)
    assert rel_err(pkg.gamma.data, oracle_eval(p, "connection").data, gs) < 1e-9
    rs = coeff_scale(pkg.riemann)
    assert rel_err(pkg.riemann.data, oracle_eval(p, "riemann").data, rs) < 1e-9
    assert rel_err(pkg.ricci.data, oracle_eval(p, "ricci").data, rs) < 1e-9
    assert rel_err(pkg.scalar.coeffs, oracle_eval(p, "scalar").coeffs, rs * p.dim) < 1e-9


@pytest.mark.parametrize("m,h,t0", SWEEP[::3])
def test_structural_invariants(m, h, t0, packages):
    p, pkg = packages(m, h, t0)
    g = pkg.gamma.data
    assert np.array_equal(g, -np.swapaxes(g, 1, 2))
    R = pkg.riemann.value
    s = max(1.0, np.max(np.abs(R)))
    assert np.max(np.abs(R + R.transpose(1, 0, 2, 3))) / s < 1e-9
    assert np.max(np.abs(R + R.transpose(0, 1, 3, 2))) / s < 1e-9
    assert np.max(np.abs(R - R.transpose(2, 3, 0, 1))) / s < 1e-9
    bianchi = R + np.einsum("ijhk->hijk", R) + np.einsum("jhik->hijk", R)
    assert np.max(np.abs(bianchi)) / s < 1e-9
    # nabla g = 0 and nabla J = 0
    assert not np.any(pkg.nabla(Tensor.identity(p.dim, t0, pkg.gamma.order)).data)
    assert np.max(np.abs(pkg.nabla(pkg.jtensor()).data)) < 1e-12


def test_case_ii_ricci_parallel():
    from curvlab.example_family import case_presets

    pkg = build_package(*build_family(case_presets("ii", 2, t0=1.3)))
    assert np.max(np.abs(pkg.ricci.value)) < 1e-10
    assert np.max(np.abs(pkg.nabla_s.value)) < 1e-9


def test_gradient_of_scalar_lives_in_one_slot():
    F, _ = build_family(FamilyParams(1, PowerH(-1.0), 2.0))
    phi = Tensor.scalar(jet_coordinate(2.0, F.order))
    d = F.frame_derivative(phi.data)
    assert np.count_nonzero(d[..., 0]) == 1
    assert d[F.deriv_direction, 0] == F.deriv_factor.value


def test_frame_validation():
    K = 2
    c = np.zeros((4, 4, 4, K + 1))
    c[0, 1, 2, 0] = 1.0
    with pytest.raises(FrameSpecError):
        FrameSpec(Tensor(c, 1.0), 3, jet_const(1.0, 1.0, K))  # not antisymmetric
    with pytest.raises(FrameSpecError):
        FrameSpec(Tensor(np.zeros((3, 3, 3, K + 1)), 1.0), 0, jet_const(1.0, 1.0, K))
    # [e0,e1] = e2, [e1,e2] = e1: the cyclic sum on (0,1,2) is -e2
    c = np.zeros((4, 4, 4, K + 1))
    for i, j, k in ((0, 1, 2), (1, 2, 1)):
        c[i, j, k, 0], c[j, i, k, 0] = 1.0, -1.0
    with pytest.raises(FrameSpecError):
        FrameSpec(Tensor(c, 1.0), 3, jet_const(1.0, 1.0, K))


def test_complex_structure_validation():
    with pytest.raises(ValueError):
        ComplexStructure(np.eye(4))
    with pytest.raises(ValueError):
        ComplexStructure(np.array([[0, 2.0], [-0.5, 0]]))
    cs = ComplexStructure.standard(4)
    assert np.array_equal(cs.Jmat @ cs.Jmat, -np.eye(4))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_certificates_and_negative_control(m):
    p = FamilyParams(m, SqrtH(1, 0, -1), 0.6)
    F, cs = build_family(p)
    assert kaehler_certificates(F, cs, build_package(F, cs)).passed
    bad, cs = perturbed_family(p, 1e-3)
    cert = kaehler_certificates(bad, cs, build_package(bad, cs))
    assert not any(cert.verdicts.values())
