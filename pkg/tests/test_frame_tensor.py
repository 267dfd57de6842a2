import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from curvlab.example_family import FamilyParams, PowerH, build_family, standard_j
from curvlab.frame_tensor import (
    Tensor,
    TensorShapeError,
    contract,
    frobenius_sq,
    linear_combine,
    permute,
    tensor_product,
)
from curvlab.jet import Jet, JetMismatchError, jet_const
from curvlab.kaehler_model import build_package


def test_trace_of_identity():
    d = Tensor.identity(4, 1.0, 2)
    dd = tensor_product(d, d)
    assert contract(contract(dd, 0, 1), 0, 1).as_jet().value == 16
    assert contract(d, 0, 1).as_jet().value == 4


def test_j_is_orthogonal():
    Jt = standard_j(1).tensor(1.0, 2)
    jj = contract(tensor_product(Jt, Jt), 1, 3)
    np.testing.assert_array_equal(jj.value, np.eye(4))


def test_permute_examples():
    Jt = standard_j(1).tensor(1.0, 2)
    np.testing.assert_array_equal(permute(Jt, (1, 0)).data, -Jt.data)
    S = Tensor.constant(np.diag([1.0, 2.0, 3.0, 4.0]), 1.0, 1)
    np.testing.assert_array_equal(permute(S, (1, 0)).data, S.data)


def test_permute_moves_slots():
    T = Tensor(np.arange(27.0).reshape(3, 3, 3, 1), 1.0)
    P = permute(T, (1, 2, 0))
    for i, j, k in itertools.product(range(3), repeat=3):
        assert P.value[k, i, j] == T.value[i, j, k]


def test_curvature_is_skew_under_permute():
    pkg = build_package(*build_family(FamilyParams(1, PowerH(-2.0), 1.0)))
    R = pkg.riemann
    np.testing.assert_allclose(permute(R, (1, 0, 2, 3)).data, -R.data, atol=1e-12)


def test_frobenius_examples():
    assert frobenius_sq(Tensor.identity(4, 1.0, 1)).value == 4
    assert frobenius_sq(standard_j(1).tensor(1.0, 1)).value == 4
    pkg = build_package(*build_family(FamilyParams(1, PowerH(-2.0), 1.0)))
    assert abs(frobenius_sq(pkg.ricci).value - 16.0) < 1e-12


def test_linear_combine():
    T = Tensor(np.random.default_rng(0).normal(size=(4, 4, 3)), 1.0)
    U = Tensor(np.random.default_rng(1).normal(size=(4, 4, 3)), 1.0)
    one, zero = jet_const(1.0, 1.0, 2), jet_const(0.0, 1.0, 2)
    assert not np.any(linear_combine(one, T, -1.0, T).data)
    np.testing.assert_array_equal(linear_combine(zero, T, one, U).data, U.data)


def test_errors():
    T = Tensor.zeros(4, 2, 1.0, 2)
    with pytest.raises(TensorShapeError):
        contract(T, 0, 0)
    with pytest.raises(TensorShapeError):
        contract(T, 0, 2)
    with pytest.raises(TensorShapeError):
        permute(T, (0, 0))
    with pytest.raises(TensorShapeError):
        Tensor(np.zeros((2,) * 7 + (1,)), 1.0)
    with pytest.raises(TensorShapeError):
        T + Tensor.zeros(4, 2, 1.0, 3)
    with pytest.raises(JetMismatchError):
        T + Tensor.zeros(4, 2, 2.0, 2)
    with pytest.raises(TensorShapeError):
        T.as_jet()


def test_scale_by_jet_is_leibniz():
    T = Tensor.constant(np.ones((2, 2)), 1.0, 2)
    f = Jet([2.0, 3.0, 4.0], 1.0)
    np.testing.assert_array_equal(T.scale(f).data[0, 0], [2, 3, 4])


@st.composite
def tensors(draw):
    rank = draw(st.integers(2, 4))
    dim = draw(st.integers(2, 3))
    K = draw(st.integers(0, 2))
    shape = (dim,) * rank + (K + 1,)
    vals = draw(st.lists(st.floats(-5, 5, allow_nan=False), min_size=int(np.prod(shape)),
                         max_size=int(np.prod(shape))))
    return Tensor(np.array(vals).reshape(shape), 0.5)


@settings(max_examples=50)
@given(tensors(), st.data())
def test_frobenius_invariant_under_permutation(T, data):
    perm = data.draw(st.permutations(range(T.rank)))
    assert frobenius_sq(permute(T, perm)).value == frobenius_sq(T).value
    assert frobenius_sq(T).value >= 0


@settings(max_examples=50)
@given(tensors(), st.data())
def test_contract_slot_order_independent(T, data):
    a, b = data.draw(st.lists(st.integers(0, T.rank - 1), min_size=2, max_size=2, unique=True))
    np.testing.assert_array_equal(contract(T, a, b).data, contract(T, b, a).data)
