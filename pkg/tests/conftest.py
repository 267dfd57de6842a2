import numpy as np
import pytest

from curvlab.example_family import PowerH, SqrtH, default_t_grid

# the sweep used by the oracle and acceptance tests
H_SWEEP = (PowerH(-1.0), PowerH(-2.0), SqrtH(1, 0, 0), SqrtH(0, 1, 0), SqrtH(1, 0, -1))
M_SWEEP = (1, 2, 3)


def t_grid_for(h):
    return default_t_grid("iii" if h == SqrtH(1, 0, -1) else None)


def sweep():
    for m in M_SWEEP:
        for h in H_SWEEP:
            for t0 in t_grid_for(h):
                yield m, h, t0


def coeff_scale(*tensors):
    """Per jet coefficient, the largest entry among the given tensors (at least 1)."""
    k = min(T.order for T in tensors)
    mags = [np.max(np.abs(T.data[..., : k + 1]).reshape(-1, k + 1), axis=0) for T in tensors]
    return np.maximum(1.0, np.max(mags, axis=0))


def rel_err(got, want, scale):
    k = min(got.shape[-1], want.shape[-1], scale.shape[-1])
    d = np.abs(got[..., :k] - want[..., :k]).reshape(-1, k)
    return float(np.max(d / scale[:k]))


@pytest.fixture(scope="session")
def packages():
    """Cache of built packages keyed by (m, h, t0)."""
    from curvlab.example_family import FamilyParams, build_family
    from curvlab.kaehler_model import build_package

    cache = {}

    def get(m, h, t0):
        key = (m, h, t0)
        if key not in cache:
            p = FamilyParams(m, h, t0)
            cache[key] = (p, build_package(*build_family(p)))
        return cache[key]

    return get
