import numpy as np
import pytest

from curvlab.example_family import (
    CASES,
    CustomH,
    FamilyParams,
    InvalidParams,
    PowerH,
    SqrtH,
    build_family,
    case_closed_forms,
    case_presets,
    default_t_grid,
    oracle_eval,
)
from curvlab.jet import jet_coordinate, jet_pow
from curvlab.kaehler_model import build_package, scalar_drift


def test_bracket_examples():
    p = FamilyParams(1, PowerH(-2.0), 1.5)
    F, cs = build_family(p)
    c = F.brackets.value
    t, h, hp, _ = p.h_parts()
    assert c[0, 1, 2] == pytest.approx(2 * h.value)
    assert c[2, 3, 2] == pytest.approx((2 * h + t * hp).value)
    assert F.deriv_direction == 3
    assert F.deriv_factor.value == pytest.approx(1.5 * h.value)
    # J e_0 = e_1, J e_2 = e_3
    assert cs.Jmat[0, 1] == 1 and cs.Jmat[2, 3] == 1


@pytest.mark.parametrize("m", [1, 2, 3])
def test_unprimed_pairs_commute(m):
    c = build_family(FamilyParams(m, SqrtH(1, 2, 0), 0.9))[0].brackets.data
    assert not np.any(c[:m, :m])


def test_oracle_examples():
    assert abs(oracle_eval(FamilyParams(1, PowerH(-2.0), 1.0), "scalar").value) < 1e-12
    assert oracle_eval(case_presets("ii", 1, 1.0), "f").value == pytest.approx(2.0)
    assert oracle_eval(case_presets("iii", 1, 0.5), "sqrt_scalar").value == 24.0
    with pytest.raises(KeyError):
        oracle_eval(FamilyParams(1, PowerH(-2.0), 1.0), "torsion")


def test_case_examples():
    p = case_presets("i", 1, 1.0)
    assert p.h_jet().allclose(jet_pow(jet_coordinate(1.0, p.K + 1), -2.0))
    assert oracle_eval(p, "f").value == pytest.approx(1.0)
    p = case_presets("ii", 2, 1.3)
    assert oracle_eval(p, "f").value == pytest.approx(3 / 1.3**8)
    p = case_presets("iii", 1, 0.5)
    assert oracle_eval(p, "f").value == pytest.approx(129.0)
    assert case_closed_forms("iii", 1, 0.5) == (24, 129.0)


@pytest.mark.parametrize("which", CASES)
@pytest.mark.parametrize("m", [1, 2, 3])
def test_cases_constant_r_positive_f(which, m):
    for t0 in default_t_grid(which):
        p = case_presets(which, m, t0)
        pkg = build_package(*build_family(p))
        r_ref, f_ref = case_closed_forms(which, m, t0)
        assert abs(pkg.scalar.value - r_ref) < 1e-9 * max(1.0, abs(r_ref))
        assert scalar_drift(pkg) < 1e-9
        f = oracle_eval(p, "f").value
        assert f == pytest.approx(f_ref, rel=1e-12) and f > 0
        assert oracle_eval(p, "sqrt_f").value == pytest.approx(f_ref, rel=1e-12)
        assert pkg.nabla_r.max_abs() > 0


def test_einstein_flags():
    for which in ("ii", "iii"):
        p = case_presets(which, 2, 0.6)
        pkg = build_package(*build_family(p))
        S = pkg.ricci.value
        gap = np.max(np.abs(S - pkg.scalar.value / (2 * pkg.n) * np.eye(pkg.dim)))
        assert gap < 1e-9
    pkg = build_package(*build_family(case_presets("i", 1, 1.0)))
    S = pkg.ricci.value
    assert np.allclose(np.diag(S), [-2, -2, 2, 2])


def test_invalid_params():
    with pytest.raises(InvalidParams):
        FamilyParams(0, PowerH(-1.0), 1.0)
    with pytest.raises(InvalidParams):
        FamilyParams(1, PowerH(-1.0), -1.0)
    with pytest.raises(InvalidParams):
        FamilyParams(1, PowerH(-1.0, coef=0.0), 1.0)
    with pytest.raises(InvalidParams):
        FamilyParams(1, SqrtH(1, 0, -1), 1.0)
    with pytest.raises(InvalidParams):
        case_presets("iii", 1, 1.5)
    with pytest.raises(InvalidParams):
        case_presets("iv", 1, 1.0)


def test_custom_provider_matches_power():
    custom = CustomH(lambda t0, K: jet_pow(jet_coordinate(t0, K), -2.0), "t^-2")
    a = build_package(*build_family(FamilyParams(1, custom, 1.3)))
    b = build_package(*build_family(FamilyParams(1, PowerH(-2.0), 1.3)))
    assert np.array_equal(a.riemann.data, b.riemann.data)
